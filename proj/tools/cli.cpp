#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "run.hpp"

namespace rclab_cli {

namespace {

std::string flag_name(const std::string& field) {
  std::string s = field;
  for (auto& c : s)
    if (c == '_') c = '-';
  return "--" + s;
}

std::string slurp(std::istream& in) {
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string read_source(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") return slurp(in);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file \"" + path + "\"");
  return slurp(f);
}

struct CommandFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  bool strict = false;
  CLI::App* app = nullptr;
  CLI::Option* strict_opt = nullptr;
};

std::vector<std::string> fields_of(const CommandSpec& c) {
  std::vector<std::string> out = {"out", "threads", "max_edges"};
  out.insert(out.end(), c.required.begin(), c.required.end());
  out.insert(out.end(), c.optional.begin(), c.optional.end());
  if (c.needs_p) {
    out.push_back("p");
    out.push_back("p_grid");
  }
  return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and Monte Carlo computations for the random-cluster model"};
  app.set_help_all_flag("--help-all", "Show help for every command");
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "check a JSON config and list every error");
  validate_cmd->add_option("config", validate_path, "config file, or - for stdin")->default_str("-");

  std::string run_path;
  auto* run_cmd = app.add_subcommand("run", "run the command named in a JSON config");
  run_cmd->add_option("config", run_path, "config file, or - for stdin")->required();

  std::vector<std::unique_ptr<CommandFlags>> flags;
  for (const auto& c : commands()) {
    auto f = std::make_unique<CommandFlags>();
    f->app = app.add_subcommand(c.name, c.help);
    f->app->add_option("--config", f->config_path, "JSON config; flags override its fields");
    for (const auto& name : fields_of(c)) {
      const auto* spec = find_field(name);
      auto* opt = f->app->add_option(flag_name(name), f->values[name], spec->help);
      opt->type_name(name == "S" ? "DESC" : "VALUE");
    }
    f->strict_opt = f->app->add_flag("--strict,!--no-strict", f->strict, "exit 1 on checker violations");
    flags.push_back(std::move(f));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalid;
  }

  try {
    if (validate_cmd->parsed()) {
      const auto errors = validate_text(read_source(validate_path, in));
      for (const auto& e : errors) out << e << "\n";
      if (errors.empty()) out << "ok\n";
      return errors.empty() ? kExitOk : kExitInvalid;
    }
    if (run_cmd->parsed()) return run(parse_config_text(read_source(run_path, in)), out, err);

    for (const auto& f : flags) {
      if (!f->app->parsed()) continue;
      const std::string name = f->app->get_name();
      Json config = Json::object();
      if (!f->config_path.empty()) {
        config = parse_config_text(read_source(f->config_path, in));
        if (!config.is_object()) throw ConfigError("config must be a JSON object");
        if (config.contains("command") && config["command"] != name)
          throw ConfigError("config command " + config["command"].dump() + " does not match '" + name + "'");
      }
      Json merged = Json::object();
      merged["command"] = name;
      for (const auto& [k, v] : config.items())
        if (k != "command") merged[k] = v;
      for (const auto& [field, text] : f->values) {
        if (f->app->count(flag_name(field)) == 0) continue;
        const auto v = flag_value(find_field(field)->type, text);
        // p and p_grid are alternatives: a flag replaces either.
        if (field == "p") merged.erase("p_grid");
        if (field == "p_grid") merged.erase("p");
        merged[field] = v;
      }
      if (f->strict_opt->count() > 0) merged["strict"] = f->strict;
      return run(merged, out, err);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace rclab_cli

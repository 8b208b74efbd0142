#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace rclab_cli {

namespace {

const std::vector<std::string> kMcFields = {"seed", "n_sweeps", "burn_in", "chains", "sampler"};
const std::vector<std::string> kCommonFields = {"command", "out", "threads", "strict", "max_edges"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto t = trim(s);
  if (t.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

std::optional<long long> to_int(const std::string& s) {
  long long v = 0;
  const auto t = trim(s);
  if (t.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

double round12(double v) {
  const double r = std::round(v * 1e12) / 1e12;
  return r == 0.0 ? 0.0 : r;
}

std::string show(const Json& v) { return v.dump(); }

struct Errors {
  std::vector<std::string> list;
  void add(const std::string& field, const std::string& msg) { list.push_back("field '" + field + "': " + msg); }
};

bool is_int(const Json& v) { return v.is_number_integer() || v.is_number_unsigned(); }

void check_range(Errors& err, const std::string& field, const Json& v, double lo, double hi) {
  if (!v.is_number()) return;
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi)) {
    std::ostringstream m;
    m << "value " << show(v) << " out of range [" << lo << ", " << hi << "]";
    err.add(field, m.str());
  }
}

void check_int_range(Errors& err, const std::string& field, const Json& v, long long lo, long long hi) {
  if (!is_int(v)) return;
  const long long x = v.is_number_unsigned() && v.get<unsigned long long>() > 0x7fffffffffffffffULL
                          ? std::numeric_limits<long long>::max()
                          : v.get<long long>();
  if (x < lo || x > hi)
    err.add(field, "value " + show(v) + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

void check_type(Errors& err, const FieldSpec& f, const Json& v) {
  auto expect = [&](bool ok, const char* what) {
    if (!ok) err.add(f.name, std::string("expected ") + what + ", got " + show(v));
  };
  switch (f.type) {
    case FieldType::integer:
      expect(is_int(v), "an integer");
      break;
    case FieldType::number:
      expect(v.is_number(), "a number");
      break;
    case FieldType::boolean:
      expect(v.is_boolean(), "a boolean");
      break;
    case FieldType::string:
    case FieldType::region:
    case FieldType::event:
      expect(v.is_string(), "a string");
      break;
    case FieldType::sampler:
      expect(v.is_string() && (v == "auto" || v == "heat_bath" || v == "swendsen_wang"),
             "one of auto, heat_bath, swendsen_wang");
      break;
    case FieldType::quantity:
      expect(v.is_string() && (v == "partition_function" || v == "log_partition_function" ||
                               v == "event_probability" || v == "connection_probability" || v == "derivative" ||
                               v == "pivotal_probability"),
             "one of partition_function, log_partition_function, event_probability, connection_probability, "
             "derivative, pivotal_probability");
      break;
    case FieldType::grid:
      try {
        parse_grid(v, f.name);
      } catch (const ConfigError& e) {
        err.list.push_back(e.what());
      }
      break;
    case FieldType::int_list:
      try {
        parse_int_list(v, f.name);
      } catch (const ConfigError& e) {
        err.list.push_back(e.what());
      }
      break;
    case FieldType::coord:
      try {
        parse_coord(v, f.name);
      } catch (const ConfigError& e) {
        err.list.push_back(e.what());
      }
      break;
    case FieldType::family:
      if (v.is_array()) {
        if (v.empty()) err.add(f.name, "family must be nonempty");
        for (const auto& x : v) expect(x.is_string(), "an array of region descriptors");
      } else {
        expect(v.is_string(), "a family descriptor or an array of region descriptors");
      }
      break;
  }
}

}  // namespace

const std::vector<FieldSpec>& fields() {
  static const std::vector<FieldSpec> table = {
      {"command", FieldType::string, "command name"},
      {"out", FieldType::string, "output path (default stdout)"},
      {"threads", FieldType::integer, "worker threads (0: RC_LAB_THREADS or hardware)"},
      {"strict", FieldType::boolean, "exit 1 when a checker reports a violation"},
      {"max_edges", FieldType::integer, "exact enumeration edge cap"},
      {"d", FieldType::integer, "dimension"},
      {"q", FieldType::number, "cluster weight (q >= 1)"},
      {"p", FieldType::number, "edge probability"},
      {"p_grid", FieldType::grid, "edge probabilities: start:stop:step or a comma list"},
      {"n", FieldType::int_list, "box radius (or list)"},
      {"region", FieldType::region, "region descriptor"},
      {"S", FieldType::region, "set S descriptor"},
      {"ambient", FieldType::region, "ambient region descriptor"},
      {"family", FieldType::family, "candidate family: boxes:a..b or candidates:R"},
      {"tol", FieldType::number, "bisection tolerance"},
      {"upper", FieldType::number, "external upper bound for the bracket"},
      {"lower", FieldType::number, "certified lower bracket for the critical point"},
      {"boundary_p", FieldType::grid, "per boundary edge open probabilities"},
      {"z", FieldType::coord, "target point"},
      {"x", FieldType::coord, "first point"},
      {"y", FieldType::coord, "second point"},
      {"origin", FieldType::coord, "origin point"},
      {"event", FieldType::event, "event: always, open:k, connect:a;b, boundary, joined with &"},
      {"event_b", FieldType::event, "second event"},
      {"quantity", FieldType::quantity, "exact quantity"},
      {"edge", FieldType::integer, "edge index"},
      {"seed", FieldType::integer, "random seed"},
      {"n_sweeps", FieldType::integer, "sweeps including burn-in"},
      {"burn_in", FieldType::integer, "burn-in sweeps (0: max(1000, n_sweeps/10))"},
      {"chains", FieldType::integer, "independent chains"},
      {"sampler", FieldType::sampler, "auto, heat_bath or swendsen_wang"},
      {"box_radius", FieldType::integer, "box radius for the decay fit"},
      {"distances", FieldType::int_list, "distances along the first axis"},
  };
  return table;
}

const FieldSpec* find_field(const std::string& name) {
  for (const auto& f : fields())
    if (f.name == name) return &f;
  return nullptr;
}

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> table = {
      {"exact", "exact quantities by enumeration", {"region", "q"},
       {"d", "quantity", "event", "x", "y", "edge", "origin"}, true, false},
      {"phi", "phi_p(S) over a p grid (CSV)", {"S", "q"}, {"d", "boundary_p"}, true, false},
      {"ptilde", "bracket the critical point from a family of sets", {"d", "q", "family"}, {"tol", "upper"}, false,
       false},
      {"simon", "Simon-type inequality on a finite ambient region", {"ambient", "S", "z", "q"}, {"d", "origin"}, true,
       false},
      {"diffineq", "differential inequality for theta_n", {"d", "n", "q"}, {"lower"}, true, false},
      {"derivcheck", "conditional-difference derivative identity", {"region", "q"}, {"d", "event", "origin"}, true, false},
      {"pivchain", "pivotal lower chain edge by edge", {"region", "q"}, {"d", "event", "origin"}, true, true},
      {"markov", "Markov factorization of the gamma decomposition", {"d", "n", "q", "S", "x", "y"}, {}, true, true},
      {"fkg", "FKG inequality for two increasing events", {"region", "q"}, {"d", "event", "event_b", "origin"}, true, true},
      {"tanh", "tanh bound", {}, {}, true, true},
      {"mc", "Monte Carlo estimate of an event", {"region", "q"}, concat({"d", "event", "x", "y", "origin"}, kMcFields), true,
       false},
      {"theta", "Monte Carlo theta_n", {"d", "q", "n"}, concat({"lower"}, kMcFields), true, false},
      {"fit", "Monte Carlo decay fit along an axis", {"d", "q", "p", "box_radius"}, concat({"distances"}, kMcFields),
       false, false},
      {"susceptibility", "exact expected cluster size", {"region", "q"}, {"d", "origin"}, true, false},
  };
  return table;
}

const CommandSpec* find_command(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<double> parse_grid(const Json& v, const std::string& field) {
  auto fail = [&](const std::string& m) -> ConfigError { return ConfigError("field '" + field + "': " + m); };
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw fail("expected numbers, got " + show(x));
      out.push_back(x.get<double>());
    }
  } else if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find(':') != std::string::npos) {
      const auto parts = split(s, ':');
      if (parts.size() != 3) throw fail("grid must be start:stop:step, got \"" + s + "\"");
      const auto a = to_double(parts[0]), b = to_double(parts[1]), h = to_double(parts[2]);
      if (!a || !b || !h) throw fail("grid must be start:stop:step, got \"" + s + "\"");
      if (!(*h > 0.0)) throw fail("grid step must be positive");
      if (*b < *a) throw fail("grid stop must not be below start");
      const double steps = (*b - *a) / *h;
      if (steps > 1e5) throw fail("grid has more than 100000 points");
      const auto count = static_cast<long>(std::floor(steps + 1e-9)) + 1;
      for (long i = 0; i < count; ++i) out.push_back(round12(*a + static_cast<double>(i) * *h));
    } else {
      for (const auto& part : split(s, ',')) {
        const auto x = to_double(part);
        if (!x) throw fail("cannot read \"" + part + "\" as a number");
        out.push_back(*x);
      }
    }
  } else {
    throw fail("expected a number, an array of numbers or start:stop:step, got " + show(v));
  }
  if (out.empty()) throw fail("grid is empty");
  for (double x : out)
    if (!std::isfinite(x)) throw fail("grid values must be finite");
  return out;
}

std::vector<int> parse_int_list(const Json& v, const std::string& field) {
  auto fail = [&](const std::string& m) -> ConfigError { return ConfigError("field '" + field + "': " + m); };
  auto narrow = [&](long long x) {
    if (x < -1000000 || x > 1000000) throw fail("value " + std::to_string(x) + " out of range");
    return static_cast<int>(x);
  };
  std::vector<int> out;
  if (is_int(v)) {
    out.push_back(narrow(v.get<long long>()));
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!is_int(x)) throw fail("expected integers, got " + show(x));
      out.push_back(narrow(x.get<long long>()));
    }
  } else if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
      const auto a = to_int(s.substr(0, dots)), b = to_int(s.substr(dots + 2));
      if (!a || !b || *b < *a) throw fail("range must be a..b with a <= b, got \"" + s + "\"");
      if (*b - *a > 100000) throw fail("range too long");
      for (long long i = *a; i <= *b; ++i) out.push_back(narrow(i));
    } else {
      for (const auto& part : split(s, ',')) {
        const auto x = to_int(part);
        if (!x) throw fail("cannot read \"" + part + "\" as an integer");
        out.push_back(narrow(*x));
      }
    }
  } else {
    throw fail("expected an integer, an array of integers or a..b, got " + show(v));
  }
  if (out.empty()) throw fail("list is empty");
  return out;
}

std::vector<int> parse_coord_text(const std::string& text, const std::string& field) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    const auto x = to_int(part);
    if (!x || *x < -1000000 || *x > 1000000)
      throw ConfigError("field '" + field + "': cannot read \"" + text + "\" as integer coordinates");
    out.push_back(static_cast<int>(*x));
  }
  if (out.empty()) throw ConfigError("field '" + field + "': empty coordinates");
  return out;
}

std::vector<int> parse_coord(const Json& v, const std::string& field) {
  if (v.is_string()) return parse_coord_text(v.get<std::string>(), field);
  if (is_int(v)) return {static_cast<int>(v.get<long long>())};
  if (v.is_array() && !v.empty()) {
    std::vector<int> out;
    for (const auto& x : v) {
      if (!is_int(x)) throw ConfigError("field '" + field + "': expected integer coordinates");
      out.push_back(static_cast<int>(x.get<long long>()));
    }
    return out;
  }
  throw ConfigError("field '" + field + "': expected coordinates like \"1,2\" or [1,2], got " + show(v));
}

Json flag_value(FieldType type, const std::string& text) {
  switch (type) {
    case FieldType::integer:
      if (const auto v = to_int(text)) return *v;
      return text;
    case FieldType::number:
      if (const auto v = to_double(text)) return *v;
      return text;
    case FieldType::boolean:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      return text;
    case FieldType::grid:
      if (const auto v = to_double(text)) return *v;
      return text;
    case FieldType::int_list:
      if (const auto v = to_int(text)) return *v;
      return text;
    default:
      return text;
  }
}

std::vector<double> p_values(const Json& config) {
  if (config.contains("p_grid")) return parse_grid(config["p_grid"], "p_grid");
  if (config.contains("p") && config["p"].is_number()) return {config["p"].get<double>()};
  return {};
}

bool strict_for(const Json& config) {
  if (config.contains("strict") && config["strict"].is_boolean()) return config["strict"].get<bool>();
  const auto* cmd = config.contains("command") && config["command"].is_string()
                        ? find_command(config["command"].get<std::string>())
                        : nullptr;
  return cmd && cmd->default_strict;
}

std::vector<std::string> schema_errors(const Json& config) {
  Errors err;
  if (!config.is_object()) {
    err.list.push_back("config must be a JSON object");
    return err.list;
  }
  if (!config.contains("command")) {
    err.list.push_back("missing field 'command'");
    return err.list;
  }
  if (!config["command"].is_string()) {
    err.add("command", "expected a string");
    return err.list;
  }
  const auto name = config["command"].get<std::string>();
  const auto* cmd = find_command(name);
  if (!cmd) {
    std::string known;
    for (const auto& c : commands()) known += (known.empty() ? "" : ", ") + c.name;
    err.add("command", "unknown command \"" + name + "\" (expected one of " + known + ")");
    return err.list;
  }

  auto allowed = concat(concat(kCommonFields, cmd->required), cmd->optional);
  if (cmd->needs_p) allowed = concat(allowed, {"p", "p_grid"});

  for (const auto& [key, value] : config.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      err.list.push_back("unknown field '" + key + "' for command '" + name + "'");
      continue;
    }
    check_type(err, *find_field(key), value);
  }
  for (const auto& r : cmd->required)
    if (!config.contains(r)) err.list.push_back("missing field '" + r + "' required by command '" + name + "'");
  if (cmd->needs_p) {
    const bool has_p = config.contains("p"), has_grid = config.contains("p_grid");
    if (has_p && has_grid) err.list.push_back("fields 'p' and 'p_grid' are mutually exclusive");
    if (!has_p && !has_grid) err.list.push_back("missing field 'p' or 'p_grid' required by command '" + name + "'");
  }

  // Ranges.
  if (config.contains("d")) check_int_range(err, "d", config["d"], 1, 8);
  if (config.contains("q") && config["q"].is_number()) {
    const double q = config["q"].get<double>();
    if (!(q >= 1.0) || !std::isfinite(q))
      err.add("q", "value " + show(config["q"]) + " violates q >= 1 (the random-cluster measure needs q >= 1)");
    else if (name == "simon" && q != 2.0)
      err.add("q", "the Simon-type inequality is only stated for q = 2");
  }
  // Open-interval commands differentiate or condition on edge states.
  const bool open_lo = name == "derivcheck" || name == "diffineq" || name == "pivchain";
  const bool open_hi = open_lo || name == "tanh";
  auto check_p = [&](const std::string& field, double p) {
    const bool ok = (open_lo ? p > 0.0 : p >= 0.0) && (open_hi ? p < 1.0 : p <= 1.0);
    if (!ok) {
      std::ostringstream m;
      m << "value " << p << " out of range " << (open_lo ? "(" : "[") << "0, 1" << (open_hi ? ")" : "]");
      err.add(field, m.str());
    }
  };
  if (config.contains("p") && config["p"].is_number()) check_p("p", config["p"].get<double>());
  if (config.contains("p_grid")) {
    try {
      for (double p : parse_grid(config["p_grid"], "p_grid")) check_p("p_grid", p);
    } catch (const ConfigError&) {
    }
  }
  if (config.contains("boundary_p")) {
    try {
      for (double p : parse_grid(config["boundary_p"], "boundary_p"))
        if (!(p >= 0.0 && p <= 1.0)) err.add("boundary_p", "probabilities must lie in [0, 1]");
    } catch (const ConfigError&) {
    }
  }
  if (config.contains("n")) {
    try {
      const auto ns = parse_int_list(config["n"], "n");
      for (int n : ns)
        if (n < 0 || n > 1000) err.add("n", "value " + std::to_string(n) + " out of range [0, 1000]");
      if (name != "theta" && ns.size() != 1) err.add("n", "command '" + name + "' takes a single n");
      if (name == "theta")
        for (int n : ns)
          if (n < 1) err.add("n", "theta needs n >= 1");
    } catch (const ConfigError&) {
    }
  }
  if (config.contains("tol") && config["tol"].is_number()) {
    const double t = config["tol"].get<double>();
    if (!(t > 0.0 && t < 1.0)) err.add("tol", "value " + show(config["tol"]) + " out of range (0, 1)");
  }
  if (config.contains("upper")) check_range(err, "upper", config["upper"], 0.0, 1.0);
  if (config.contains("lower")) check_range(err, "lower", config["lower"], 0.0, 1.0);
  if (config.contains("threads")) check_int_range(err, "threads", config["threads"], 0, 1024);
  if (config.contains("max_edges")) check_int_range(err, "max_edges", config["max_edges"], 0, 62);
  if (config.contains("edge")) check_int_range(err, "edge", config["edge"], 0, 1000000);
  if (config.contains("seed")) check_int_range(err, "seed", config["seed"], 0, std::numeric_limits<long long>::max());
  if (config.contains("n_sweeps")) check_int_range(err, "n_sweeps", config["n_sweeps"], 1, 1000000000000LL);
  if (config.contains("burn_in")) check_int_range(err, "burn_in", config["burn_in"], 0, 1000000000000LL);
  if (config.contains("chains")) check_int_range(err, "chains", config["chains"], 1, 1024);
  if (config.contains("box_radius")) check_int_range(err, "box_radius", config["box_radius"], 1, 10000);
  if (config.contains("distances")) {
    try {
      const auto ds = parse_int_list(config["distances"], "distances");
      const int m = config.contains("box_radius") && is_int(config["box_radius"]) ? config["box_radius"].get<int>()
                                                                                    : 1000000;
      for (int k : ds)
        if (k < 1 || k > m) err.add("distances", "value " + std::to_string(k) + " must lie in [1, box_radius]");
    } catch (const ConfigError&) {
    }
  }
  if (config.contains("sampler") && config["sampler"] == "swendsen_wang" && config.contains("q") &&
      config["q"].is_number()) {
    const double q = config["q"].get<double>();
    if (q != std::floor(q)) err.add("sampler", "swendsen_wang needs an integer q");
  }
  if (config.contains("quantity") && config["quantity"] == "derivative") {
    try {
      for (double p : p_values(config))
        if (!(p > 0.0 && p < 1.0)) err.add("quantity", "the derivative needs p in (0, 1)");
    } catch (const ConfigError&) {
    }
  }
  if (config.contains("quantity") && config["quantity"] == "pivotal_probability" && !config.contains("edge"))
    err.add("edge", "pivotal_probability needs an edge index");
  return err.list;
}

}  // namespace rclab_cli

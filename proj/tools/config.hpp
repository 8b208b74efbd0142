#pragma once

// Run configuration: a flat JSON object with a "command" field plus the
// per-command fields listed in the schema table. Flags and config files are
// both turned into this form before validation.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace rclab_cli {

using Json = nlohmann::ordered_json;

enum class FieldType {
  integer,
  number,
  string,
  boolean,
  grid,        // number, array of numbers or "start:stop:step"
  int_list,    // integer, array of integers or "a..b"
  coord,       // "x1,x2,..." or array of integers
  region,      // region descriptor
  event,       // event descriptor
  family,      // "boxes:a..b", "candidates:R" or array of region descriptors
  sampler,     // auto | heat_bath | swendsen_wang
  quantity,    // exact quantities
};

struct FieldSpec {
  std::string name;
  FieldType type;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<std::string> required;
  std::vector<std::string> optional;
  bool needs_p = false;  // exactly one of p / p_grid
  bool default_strict = false;
};

const std::vector<FieldSpec>& fields();
const FieldSpec* find_field(const std::string& name);
const std::vector<CommandSpec>& commands();
const CommandSpec* find_command(const std::string& name);

// Field presence, types and ranges only; see validate() in run.hpp for the
// full check.
std::vector<std::string> schema_errors(const Json& config);

// Converts a flag value to the JSON type its field expects; values that do
// not convert are kept as strings so validation reports them.
Json flag_value(FieldType type, const std::string& text);

// Parsing helpers shared with run(). They throw ConfigError.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_grid(const Json& v, const std::string& field);
std::vector<int> parse_int_list(const Json& v, const std::string& field);
std::vector<int> parse_coord(const Json& v, const std::string& field);
std::vector<int> parse_coord_text(const std::string& text, const std::string& field);

std::vector<double> p_values(const Json& config);
bool strict_for(const Json& config);

}  // namespace rclab_cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace rclab_cli {

enum ExitStatus : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitInvalid = 2,
  kExitResource = 3,
  kExitInternal = 4,
};

// Parses config text; empty text is an empty object.
Json parse_config_text(const std::string& text);

// Full error list, empty iff run() accepts the config. Builds regions and
// events but never enumerates or samples.
std::vector<std::string> validate(const Json& config);
std::vector<std::string> validate_text(const std::string& text);

// Executes the command. Output goes to config["out"] (written atomically) or
// to `out` when absent; summaries and errors go to `log`.
int run(const Json& config, std::ostream& out, std::ostream& log);

}  // namespace rclab_cli

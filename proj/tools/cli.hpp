#pragma once

#include <iosfwd>

namespace rclab_cli {

// Command-line entry point; returns the process exit status.
int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace rclab_cli

#pragma once

// RAII over the C API handles and status codes.

#include <memory>
#include <stdexcept>
#include <string>

#include "rclab/rclab.h"

namespace rclab_cli {

struct ApiError : std::runtime_error {
  ApiError(rclab_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
  rclab_status status;
};

inline void check(rclab_status s) {
  if (s != RCLAB_OK) throw ApiError(s, rclab_last_error());
}

struct RegionFree {
  void operator()(rclab_region* r) const { rclab_region_free(r); }
};
struct EventFree {
  void operator()(rclab_event* e) const { rclab_event_free(e); }
};

using RegionPtr = std::unique_ptr<rclab_region, RegionFree>;
using EventPtr = std::unique_ptr<rclab_event, EventFree>;

// Takes ownership of a library string.
inline std::string take(char* s) {
  std::string out = s ? s : "";
  rclab_string_free(s);
  return out;
}

}  // namespace rclab_cli

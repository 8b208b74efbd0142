#include <algorithm>
#include <string>

#include "rclab/exact.hpp"

namespace rclab {

Event always_event() {
  return {"always", [](const ConfigView&) { return true; }, true};
}

Event edge_open_event(std::size_t e) {
  return {"open(" + std::to_string(e) + ")", [e](const ConfigView& v) { return v.edge_open(e); }, true};
}

Event connection_event(std::size_t x, std::size_t y) {
  return {"connect(" + std::to_string(x) + "," + std::to_string(y) + ")",
          [x, y](const ConfigView& v) { return v.connected(x, y); }, true};
}

Event connection_to_set_event(std::size_t x, std::vector<std::size_t> targets) {
  std::string name = "connect(" + std::to_string(x) + ",{";
  for (std::size_t i = 0; i < targets.size(); ++i) name += (i ? "," : "") + std::to_string(targets[i]);
  name += "})";
  return {std::move(name),
          [x, targets = std::move(targets)](const ConfigView& v) {
            return std::any_of(targets.begin(), targets.end(), [&](std::size_t t) { return v.connected(x, t); });
          },
          true};
}

Event intersection_event(Event a, Event b) {
  const bool inc = a.increasing && b.increasing;
  std::string name = a.name + "&" + b.name;
  return {std::move(name),
          [a = std::move(a.test), b = std::move(b.test)](const ConfigView& v) { return a(v) && b(v); }, inc};
}

}  // namespace rclab

#pragma once

// JSON forms of the result types. Key order is fixed (ordered_json) and
// doubles use shortest round-trip formatting, so dumps are byte-stable.

#include <string>
#include <vector>

#include <json.hpp>

#include "rclab/exact.hpp"
#include "rclab/ineq.hpp"
#include "rclab/lattice.hpp"
#include "rclab/mc.hpp"
#include "rclab/sharpness.hpp"

namespace rclab {

using Json = nlohmann::ordered_json;

Json to_json(const Region& region);
Region region_from_json(const Json& j);
std::string region_to_string(const Region& region);
Region region_from_string(const std::string& text);

// FNV-1a 64 of the canonical region JSON, as 16 hex digits.
std::string region_hash(const Region& region);

Json to_json(const EdgeBoundary& boundary);
Json to_json(const PhiResult& phi);
Json to_json(const CriticalEstimate& estimate);
Json to_json(const DecayBound& bound);
Json to_json(const CheckReport& report);
Json to_json(const McEstimate& estimate);
Json to_json(const DecayFit& fit);
Json to_json(const std::vector<GammaRecord>& gamma, const Region& box);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace rclab

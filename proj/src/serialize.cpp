#include "rclab/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "rclab/errors.hpp"

namespace rclab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Json to_json(const Region& region) {
  Json j;
  j["d"] = region.dimension();
  j["vertices"] = Json::array();
  for (const auto& v : region.vertices()) j["vertices"].push_back(v);
  j["edges"] = Json::array();
  for (const auto& e : region.edges()) j["edges"].push_back({e.a, e.b});
  if (region.couplings())
    j["couplings"] = *region.couplings();
  else
    j["couplings"] = nullptr;
  return j;
}

Region region_from_json(const Json& j) {
  try {
    const int d = j.at("d").get<int>();
    std::vector<Point> vertices = j.at("vertices").get<std::vector<Point>>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw InvalidArgument("edge must be a pair of indices");
      const auto a = e[0].get<long long>(), b = e[1].get<long long>();
      if (a < 0 || b < 0) throw InvalidArgument("edge indices must be nonnegative");
      edges.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
    }
    std::optional<std::vector<double>> couplings;
    if (j.contains("couplings") && !j.at("couplings").is_null())
      couplings = j.at("couplings").get<std::vector<double>>();
    return Region(d, std::move(vertices), std::move(edges), std::move(couplings));
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed region JSON: ") + e.what());
  }
}

std::string region_to_string(const Region& region) { return to_json(region).dump(); }

Region region_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("region JSON does not parse: ") + e.what());
  }
  return region_from_json(j);
}

std::string region_hash(const Region& region) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : region_to_string(region)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const EdgeBoundary& boundary) {
  Json j;
  j["inner"] = to_json(boundary.inner);
  j["boundary_edges"] = Json::array();
  for (const auto& be : boundary.edges) j["boundary_edges"].push_back({be.inside, be.outside});
  return j;
}

Json to_json(const PhiResult& phi) {
  Json j;
  j["p"] = phi.p;
  j["q"] = phi.q;
  j["region_hash"] = region_hash(phi.set);
  j["n_boundary_edges"] = phi.terms.size();
  j["value"] = phi.value;
  j["terms"] = Json::array();
  for (const auto& t : phi.terms)
    j["terms"].push_back({{"x", t.inside}, {"y", t.outside}, {"connection", t.connection}, {"p_edge", t.edge_p}});
  return j;
}

Json to_json(const CriticalEstimate& est) {
  Json j;
  j["family"] = est.family;
  j["lower"] = est.lower;
  j["upper"] = est.upper;
  j["tol"] = est.tol;
  j["witness_radius"] = est.witness.radius();
  j["witness_vertices"] = est.witness.vertex_count();
  j["witness_phi"] = est.witness_phi;
  j["transcript"] = Json::array();
  for (const auto& s : est.transcript)
    j["transcript"].push_back({{"p", s.p}, {"min_phi", s.min_phi}, {"argmin", s.argmin}});
  return j;
}

Json to_json(const DecayBound& b) {
  return Json{{"phi", b.phi}, {"L", b.box_radius}, {"exponent", b.exponent}, {"bound", b.bound}};
}

Json to_json(const CheckReport& r) {
  Json j;
  j["name"] = r.name;
  j["instance"] = r.instance;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["slack"] = number(r.slack);
  j["holds"] = r.holds;
  j["degenerate"] = r.degenerate;
  Json details = Json::object();
  for (const auto& [k, v] : r.details) details[k] = number(v);
  j["details"] = std::move(details);
  return j;
}

Json to_json(const McEstimate& e) {
  return Json{{"mean", e.mean},     {"stderr", e.stderr}, {"n_sweeps", e.n_sweeps}, {"burn_in", e.burn_in},
              {"seed", e.seed},     {"chains", e.chains}, {"sampler", sampler_name(e.sampler)}};
}

Json to_json(const DecayFit& f) {
  Json j;
  j["p"] = f.p;
  j["q"] = f.q;
  j["box_radius"] = f.box_radius;
  j["fitted"] = f.fitted;
  j["rate"] = number(f.rate);
  j["rate_stderr"] = number(f.rate_stderr);
  j["intercept"] = number(f.intercept);
  j["r_squared"] = number(f.r_squared);
  j["status"] = f.status;
  j["points"] = Json::array();
  for (const auto& pt : f.points)
    j["points"].push_back(
        {{"distance", pt.distance}, {"estimate", pt.estimate}, {"stderr", pt.stderr}, {"censored", pt.censored}});
  return j;
}

Json to_json(const std::vector<GammaRecord>& gamma, const Region& box) {
  Json j = Json::array();
  for (const auto& g : gamma) {
    Json pts = Json::array();
    for (auto v : g.vertices) pts.push_back(box.vertex(v));
    j.push_back({{"vertices", std::move(pts)}, {"probability", g.probability}});
  }
  return j;
}

}  // namespace rclab

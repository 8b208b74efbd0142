#include "rclab/ineq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rclab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string point_str(const Point& x) {
  std::string s = "(";
  for (std::size_t k = 0; k < x.size(); ++k) s += (k ? "," : "") + std::to_string(x[k]);
  return s + ")";
}

std::string describe(const Region& r) {
  return "d=" + std::to_string(r.dimension()) + " |V|=" + std::to_string(r.vertex_count()) +
         " |E|=" + std::to_string(r.edge_count());
}

std::string describe(const RCParams& params) {
  return "p=" + fmt(params.p) + (params.edge_p ? "(per-edge)" : "") + " q=" + fmt(params.q);
}

void finish_inequality(CheckReport& r) {
  r.slack = r.rhs - r.lhs;
  r.holds = r.slack >= -kSlackFloor;
}

void finish_reverse_inequality(CheckReport& r) {
  r.slack = r.lhs - r.rhs;
  r.holds = r.slack >= -kSlackFloor;
}

void finish_equality(CheckReport& r, double tol) {
  r.slack = tol - std::abs(r.lhs - r.rhs);
  r.holds = r.slack >= -kSlackFloor;
}

// Parameters for a subregion whose edges are edges of ambient.
RCParams restrict_params(const Region& ambient, const Region& sub, const RCParams& params) {
  RCParams out{params.p, params.q, std::nullopt};
  if (!params.edge_p) return out;
  out.edge_p.emplace();
  for (const auto& e : sub.edges()) {
    const auto a = ambient.find(sub.vertex(e.a));
    const auto b = ambient.find(sub.vertex(e.b));
    const auto ae = (a && b) ? ambient.find_edge(*a, *b) : std::nullopt;
    if (!ae) throw InvalidArgument("subregion edge is not an edge of the ambient region");
    out.edge_p->push_back((*params.edge_p)[*ae]);
  }
  return out;
}

void require_increasing(const Region& region, const Event& event, const EnumerationOptions& opts) {
  if (!event.increasing) throw InvalidArgument("event '" + event.name + "' is not declared increasing");
  if (region.edge_count() <= kIncreasingCheckEdges && !verify_increasing(region, event, opts))
    throw InvalidArgument("event '" + event.name + "' is declared increasing but is not");
}

std::size_t require_point(const Region& r, const Point& x, const char* what) {
  auto i = r.find(x);
  if (!i) throw InvalidArgument(std::string(what) + " " + point_str(x) + " is not a vertex of the region");
  return *i;
}

EdgeStatistics checked_statistics(const Region& region, const RCParams& params, const Event& event,
                                  const EnumerationOptions& opts) {
  auto stats = edge_statistics(region, params, event, opts);
  for (double pi : stats.open_probability)
    if (!(pi > 0.0 && pi < 1.0)) throw DomainError("conditioning on an edge state of probability zero");
  return stats;
}

}  // namespace

CheckReport check_simon(const Region& ambient, const Region& S, const Point& origin, const Point& z,
                        const RCParams& params, const EnumerationOptions& opts) {
  if (params.q != 2.0) throw InvalidArgument("the modified Simon inequality is checked for q = 2 only");
  params.validate(ambient.edge_count());
  const std::size_t o_s = require_point(S, origin, "origin");
  const std::size_t z_a = require_point(ambient, z, "z");
  require_point(ambient, origin, "origin");
  if (S.contains(z)) throw InvalidArgument("z must lie outside S");
  const EdgeBoundary boundary = edge_boundary(S, ambient);
  const RCParams s_params = restrict_params(ambient, S, params);

  const auto to_z = connection_probabilities_from(ambient, params, z_a, opts);
  const auto in_s = connection_probabilities_from(S, s_params, o_s, opts);

  CheckReport r;
  r.name = "simon";
  r.instance = "ambient[" + describe(ambient) + "] S[" + describe(S) + "] origin=" + point_str(origin) +
               " z=" + point_str(z) + " " + describe(params);
  r.lhs = to_z[*ambient.find(origin)];
  for (const auto& be : boundary.edges) {
    const double pe = params.edge_probability(*be.ambient_edge);
    r.rhs += pe * in_s[*S.find(be.inside)] * to_z[*ambient.find(be.outside)];
  }
  r.details.emplace_back("boundary_edges", static_cast<double>(boundary.edges.size()));
  finish_inequality(r);
  return r;
}

CheckReport check_tanh_bound(double p) {
  if (!(p >= 0.0)) throw InvalidArgument("p must be >= 0");
  if (!(p < 1.0)) throw DomainError("tanh bound is undefined at p = 1");
  CheckReport r;
  r.name = "tanh";
  r.instance = "p=" + fmt(p);
  r.lhs = std::tanh(-0.5 * std::log1p(-p));
  r.rhs = p;
  r.details.emplace_back("closed_form", p / (2.0 - p));
  finish_inequality(r);
  return r;
}

CheckReport check_derivative_identity(const Region& region, const RCParams& params, const Event& event,
                                      const EnumerationOptions& opts) {
  require_increasing(region, event, opts);
  const double exact = derivative_event_probability(region, params, event, opts);
  const auto stats = checked_statistics(region, params, event, opts);

  const double p = params.p;
  const double h = std::min({1e-4, p / 2.0, (1.0 - p) / 2.0});
  const double fd = (event_probability(region, RCParams{p + h, params.q, std::nullopt}, event, opts) -
                     event_probability(region, RCParams{p - h, params.q, std::nullopt}, event, opts)) /
                    (2.0 * h);

  CheckReport r;
  r.name = "derivative_identity";
  r.instance = "region[" + describe(region) + "] " + describe(params) + " event=" + event.name;
  r.lhs = exact;
  for (std::size_t e = 0; e < region.edge_count(); ++e) r.rhs += stats.given_open[e] - stats.given_closed[e];
  r.details.emplace_back("finite_difference", fd);
  for (std::size_t e = 0; e < region.edge_count(); ++e) {
    const double pi = stats.open_probability[e];
    r.details.emplace_back("ratio[" + std::to_string(e) + "]", pi * (1.0 - pi) / (p * (1.0 - p)));
  }
  finish_equality(r, kDerivativeIdentityTol);
  return r;
}

CheckReport check_pivotal_lower_chain(const Region& region, const RCParams& params, const Event& event,
                                      const EnumerationOptions& opts) {
  require_increasing(region, event, opts);
  const auto stats = checked_statistics(region, params, event, opts);

  CheckReport r;
  r.name = "pivotal_chain";
  r.instance = "region[" + describe(region) + "] " + describe(params) + " event=" + event.name;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < region.edge_count(); ++e) {
    const double conditional = stats.given_open[e] - stats.given_closed[e];
    const double flip = stats.raised[e] - stats.lowered[e];
    r.lhs += conditional;
    r.rhs += flip;
    const double chain = conditional - flip;
    const double identity = kEqualityTol - std::abs(flip - stats.pivotal[e]);
    worst = std::min({worst, chain, identity});
    r.details.emplace_back("chain_slack[" + std::to_string(e) + "]", chain);
    r.details.emplace_back("pivotal[" + std::to_string(e) + "]", stats.pivotal[e]);
  }
  r.slack = region.edge_count() == 0 ? 0.0 : worst;
  r.holds = r.slack >= -kSlackFloor;
  return r;
}

std::vector<CheckReport> check_differential_inequality(int n, int d, double q, std::span<const double> p_grid,
                                                       std::optional<double> bracket_lower,
                                                       const EnumerationOptions& opts) {
  const Region box = make_box(d, n);
  check_enumeration_cap(box, opts);
  const std::size_t origin = box.require_origin();
  const Event a = connection_to_set_event(origin, box.inner_boundary());

  std::vector<CheckReport> out;
  for (double p : p_grid) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("differential inequality grid must lie inside (0,1)");
    const RCParams params{p, q, std::nullopt};
    const double theta = event_probability(box, params, a, opts);
    CheckReport r;
    r.name = "differential_inequality";
    r.instance = "box d=" + std::to_string(d) + " n=" + std::to_string(n) + " " + describe(params);
    r.lhs = derivative_event_probability(box, params, a, opts);
    r.rhs = (1.0 - theta) / p;
    r.details.emplace_back("theta", theta);
    r.details.emplace_back("regime_above_bracket", bracket_lower ? (p > *bracket_lower ? 1.0 : 0.0) : -1.0);
    finish_reverse_inequality(r);
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

struct MarkovAcc {
  std::uint64_t s_mask = 0;          // vertices of S
  std::uint64_t s_edge_bits = 0;     // edges of S, as ambient edge bits
  const std::vector<char>* is_boundary = nullptr;
  const Region* box = nullptr;
  std::size_t origin = 0, x = 0;
  double total = 0.0, gamma = 0.0, joint = 0.0;
  std::vector<char> touched;

  void add(const ConfigView& v, double w) {
    total += w;
    const auto labels = v.labels();
    touched.assign(labels.size(), 0);
    for (std::size_t u = 0; u < labels.size(); ++u)
      if ((*is_boundary)[u]) touched[labels[u]] = 1;
    std::uint64_t g = 0;
    for (std::size_t u = 0; u < labels.size(); ++u)
      if (!touched[labels[u]]) g |= std::uint64_t{1} << u;
    if (g != s_mask) return;
    gamma += w;
    UnionFind uf(labels.size());
    for (std::uint64_t rest = v.bits() & s_edge_bits; rest != 0; rest &= rest - 1) {
      const auto& e = box->edge(static_cast<std::size_t>(std::countr_zero(rest)));
      uf.unite(static_cast<std::uint32_t>(e.a), static_cast<std::uint32_t>(e.b));
    }
    if (uf.same(static_cast<std::uint32_t>(origin), static_cast<std::uint32_t>(x))) joint += w;
  }
  void merge(const MarkovAcc& o) {
    total += o.total;
    gamma += o.gamma;
    joint += o.joint;
  }
};

}  // namespace

CheckReport check_markov_factorization(int n, int d, const RCParams& params, const Region& S, const Point& x,
                                       const Point& y, const EnumerationOptions& opts) {
  const Region box = make_box(d, n);
  if (box.vertex_count() > 64) throw ResourceError("Markov check supports at most 64 vertices");
  params.validate(box.edge_count());
  check_enumeration_cap(box, opts);
  const std::size_t o_s = S.require_origin();
  const std::size_t x_s = require_point(S, x, "x");
  if (S.contains(y)) throw InvalidArgument("y must lie outside S");
  const std::size_t x_b = require_point(box, x, "x");
  const std::size_t y_b = require_point(box, y, "y");
  if (!box.find_edge(x_b, y_b)) throw InvalidArgument("{x,y} is not an edge of the box");

  MarkovAcc acc;
  for (const auto& v : S.vertices()) acc.s_mask |= std::uint64_t{1} << require_point(box, v, "S vertex");
  for (const auto& e : S.edges()) {
    auto be = box.find_edge(*box.find(S.vertex(e.a)), *box.find(S.vertex(e.b)));
    if (!be) throw InvalidArgument("edge of S is not an edge of the box");
    acc.s_edge_bits |= std::uint64_t{1} << *be;
  }
  std::vector<char> is_boundary(box.vertex_count(), 0);
  for (auto v : box.inner_boundary()) is_boundary[v] = 1;
  acc.is_boundary = &is_boundary;
  acc.box = &box;
  acc.origin = box.require_origin();
  acc.x = x_b;

  const auto res = enumerate(box, params, acc, opts);
  const double p_gamma = res.acc.gamma / res.acc.total;
  const double lhs = res.acc.joint / res.acc.total;
  const double in_s = connection_probability(S, restrict_params(box, S, params), o_s, x_s, opts);

  CheckReport r;
  r.name = "markov_factorization";
  r.instance = "box d=" + std::to_string(d) + " n=" + std::to_string(n) + " S[" + describe(S) + "] x=" +
               point_str(x) + " y=" + point_str(y) + " " + describe(params);
  r.lhs = lhs;
  r.rhs = in_s * p_gamma;
  r.details.emplace_back("gamma_probability", p_gamma);
  r.details.emplace_back("connection_in_S", in_s);
  if (p_gamma == 0.0) {
    r.degenerate = true;
    r.slack = kEqualityTol;
    r.holds = true;
    return r;
  }
  finish_equality(r, kEqualityTol);
  return r;
}

CheckReport check_fkg(const Region& region, const RCParams& params, const Event& a, const Event& b,
                      const EnumerationOptions& opts) {
  require_increasing(region, a, opts);
  require_increasing(region, b, opts);
  const std::vector<Event> events{a, b, intersection_event(a, b)};
  const auto probs = event_probabilities(region, params, events, opts);
  CheckReport r;
  r.name = "fkg";
  r.instance = "region[" + describe(region) + "] " + describe(params) + " A=" + a.name + " B=" + b.name;
  r.lhs = probs[2];
  r.rhs = probs[0] * probs[1];
  r.details.emplace_back("mu_A", probs[0]);
  r.details.emplace_back("mu_B", probs[1]);
  finish_reverse_inequality(r);
  return r;
}

}  // namespace rclab

#include "rclab/sharpness.hpp"

#include <cmath>
#include <limits>

namespace rclab {

PhiResult phi(const Region& S, const RCParams& params, std::span<const double> boundary_p,
              const EnumerationOptions& opts) {
  const std::size_t origin = S.require_origin();
  params.validate(S.edge_count());
  const EdgeBoundary boundary = edge_boundary(S);
  if (!boundary_p.empty() && boundary_p.size() != boundary.edges.size())
    throw InvalidArgument("boundary probability list must have one entry per boundary edge");
  for (double pe : boundary_p)
    if (!(pe >= 0.0 && pe <= 1.0)) throw InvalidArgument("boundary probabilities must lie in [0,1]");

  PhiResult out{params.p, params.q, S, {}, 0.0};
  const auto conn = connection_probabilities_from(S, params, origin, opts);
  for (std::size_t i = 0; i < boundary.edges.size(); ++i) {
    const auto& be = boundary.edges[i];
    const double pe = boundary_p.empty() ? params.p : boundary_p[i];
    const double c = conn[*S.find(be.inside)];
    out.terms.push_back({be.inside, be.outside, c, pe});
    out.value += pe * c;
  }
  return out;
}

CriticalEstimate bracket_ptilde(int d, double q, std::span<const Region> family, double tol,
                                std::optional<double> upper, std::string family_name,
                                const EnumerationOptions& opts) {
  if (family.empty()) throw InvalidArgument("candidate family is empty");
  if (!(tol > 0.0)) throw InvalidArgument("bisection tolerance must be > 0");
  if (!(q >= 1.0)) throw InvalidArgument("q must satisfy q >= 1");
  for (const auto& S : family) {
    if (S.dimension() != d) throw InvalidArgument("family member has the wrong dimension");
    S.require_origin();
  }

  CriticalEstimate est{0.0, upper.value_or(1.0), family.front(), 0.0, std::move(family_name), tol, {}};
  auto evaluate = [&](double p) {
    BisectionStep step{p, std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < family.size(); ++i) {
      const double v = phi(family[i], RCParams{p, q, std::nullopt}, {}, opts).value;
      if (v < step.min_phi) {
        step.min_phi = v;
        step.argmin = i;
      }
    }
    est.transcript.push_back(step);
    return step;
  };

  BisectionStep lo = evaluate(0.0);
  const BisectionStep top = evaluate(1.0);
  if (top.min_phi < 1.0) {
    lo = top;
  } else {
    double hi = 1.0;
    while (hi - lo.p > tol) {
      const BisectionStep mid = evaluate(0.5 * (lo.p + hi));
      if (mid.min_phi < 1.0) {
        lo = mid;
      } else {
        hi = mid.p;
      }
    }
  }
  est.lower = lo.p;
  est.witness = family[lo.argmin];
  est.witness_phi = lo.min_phi;
  return est;
}

DecayBound decay_upper_bound(double phi_value, int box_radius, const Point& z) {
  if (!(phi_value < 1.0)) throw DomainError("phi_p(S) >= 1: the decay bound is vacuous");
  if (!(phi_value >= 0.0)) throw InvalidArgument("phi must be nonnegative");
  DecayBound b;
  b.phi = phi_value;
  b.box_radius = std::max(box_radius, 1);
  b.exponent = sup_norm(z) / b.box_radius;
  b.bound = b.exponent == 0 ? 1.0 : std::pow(phi_value, static_cast<double>(b.exponent));
  return b;
}

DecayBound decay_upper_bound(const Region& S, const RCParams& params, const Point& z,
                             const EnumerationOptions& opts) {
  if (z.size() != static_cast<std::size_t>(S.dimension())) throw InvalidArgument("z has the wrong dimension");
  return decay_upper_bound(phi(S, params, {}, opts).value, S.radius() + 1, z);
}

double theta_lower_bound(double p, double lower) {
  if (!(p > lower)) throw DomainError("theta lower bound needs p above the bracket");
  if (!(p <= 1.0)) throw InvalidArgument("p must lie in [0,1]");
  return (p - lower) / p;
}

double theta_lower_bound(double p, const CriticalEstimate& estimate) { return theta_lower_bound(p, estimate.lower); }

}  // namespace rclab

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rclab/exact.hpp"
#include "rclab/lattice.hpp"

namespace rclab {

struct PhiTerm {
  Point inside;
  Point outside;
  double connection = 0.0;  // mu_S(0 <-> inside)
  double edge_p = 0.0;      // open probability used as the prefactor
};

struct PhiResult {
  double p = 0.0;
  double q = 0.0;
  Region set;
  std::vector<PhiTerm> terms;
  double value = 0.0;
};

// phi_p(S) = sum over boundary edges {x,y} of p_{xy} mu_S(0 <-> x), with the
// boundary taken against Z^d. boundary_p, when nonempty, supplies one open
// probability per boundary edge (in edge_boundary order); otherwise the
// uniform p is used.
PhiResult phi(const Region& S, const RCParams& params, std::span<const double> boundary_p = {},
              const EnumerationOptions& opts = {});

struct BisectionStep {
  double p = 0.0;
  double min_phi = 0.0;
  std::size_t argmin = 0;
};

struct CriticalEstimate {
  double lower = 0.0;
  double upper = 1.0;
  Region witness;
  double witness_phi = 0.0;
  std::string family;
  double tol = 0.0;
  std::vector<BisectionStep> transcript;
};

inline constexpr double kDefaultBracketTol = 1e-4;

// Largest p (to within tol) at which some member of the family has phi < 1.
// Bisection relies on phi being nondecreasing in p.
CriticalEstimate bracket_ptilde(int d, double q, std::span<const Region> family, double tol = kDefaultBracketTol,
                                std::optional<double> upper = std::nullopt, std::string family_name = {},
                                const EnumerationOptions& opts = {});

struct DecayBound {
  double phi = 0.0;
  int box_radius = 0;   // L
  long exponent = 0;    // floor(|z| / L)
  double bound = 1.0;   // phi^exponent
};

// phi_p(S)^floor(|z|/L). The region overload takes L = radius(S) + 1, the
// smallest box holding S together with the outer ends of its boundary edges;
// one step of the iteration moves the starting point at most that far. The
// second overload uses the given L (at least 1). Throws DomainError when
// phi >= 1.
DecayBound decay_upper_bound(const Region& S, const RCParams& params, const Point& z,
                             const EnumerationOptions& opts = {});
DecayBound decay_upper_bound(double phi_value, int box_radius, const Point& z);

// (p - lower) / p, the percolation lower bound with the certified lower
// bracket standing in for the critical point.
double theta_lower_bound(double p, const CriticalEstimate& estimate);
double theta_lower_bound(double p, double lower);

struct DecayPoint {
  int distance = 0;
  double estimate = 0.0;
  double stderr = 0.0;
  bool censored = false;
};

struct DecayFit {
  double p = 0.0;
  double q = 0.0;
  int box_radius = 0;
  std::vector<DecayPoint> points;
  bool fitted = false;
  double rate = 0.0;         // c(p) in mu(0 <-> x) ~ A exp(-c |x|)
  double rate_stderr = 0.0;  // jackknife over batches
  double intercept = 0.0;
  double r_squared = 0.0;
  std::string status;
};

}  // namespace rclab

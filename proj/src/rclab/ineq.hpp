#pragma once

// Checkers for the inequalities and identities of the sharpness argument.
// Each returns a CheckReport instead of asserting; callers decide which
// checkers are strict.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rclab/exact.hpp"
#include "rclab/lattice.hpp"

namespace rclab {

// Floor below which a negative slack counts as a violation.
inline constexpr double kSlackFloor = 1e-10;
inline constexpr double kEqualityTol = 1e-10;
inline constexpr double kDerivativeIdentityTol = 1e-9;

// lhs and rhs are the two sides of the checked relation as it is usually
// written. For "lhs <= rhs" checkers (simon, tanh) slack = rhs - lhs; for
// "lhs >= rhs" checkers (fkg, pivotal_chain, differential_inequality)
// slack = lhs - rhs; for equality checkers slack = tol - |lhs - rhs|.
// In every case holds <=> slack >= -1e-10.
struct CheckReport {
  std::string name;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = true;
  bool degenerate = false;
  std::vector<std::pair<std::string, double>> details;
};

// mu(o <-> z) <= sum_{{x,y} in dS} p_{xy} mu_S(o <-> x) mu(y <-> z), all
// measures on the finite ambient region, dS taken inside the ambient.
CheckReport check_simon(const Region& ambient, const Region& S, const Point& origin, const Point& z,
                        const RCParams& params, const EnumerationOptions& opts = {});

CheckReport check_tanh_bound(double p);

// Exact derivative (covariance form, cross-checked by central differences)
// against the sum over edges of mu(A | w_e = 1) - mu(A | w_e = 0).
CheckReport check_derivative_identity(const Region& region, const RCParams& params, const Event& event,
                                      const EnumerationOptions& opts = {});

// Edge by edge: mu(A | w_e=1) - mu(A | w_e=0) >= mu(w^(e) in A) - mu(w_(e) in A),
// and the right side equals mu(e pivotal for A). lhs/rhs are the sums over
// edges; slack is the worst per-edge slack of either relation.
CheckReport check_pivotal_lower_chain(const Region& region, const RCParams& params, const Event& event,
                                      const EnumerationOptions& opts = {});

// d/dp theta_n >= (1 - theta_n) / p with theta_n = mu_{Lambda_n}(0 <-> dLambda_n),
// one report per grid point. Points at or below bracket_lower are tagged as
// outside the claimed regime.
std::vector<CheckReport> check_differential_inequality(int n, int d, double q, std::span<const double> p_grid,
                                                       std::optional<double> bracket_lower = std::nullopt,
                                                       const EnumerationOptions& opts = {});

// mu_{Lambda_n}(0 <->_S x, gamma = S) = mu_S(0 <-> x) mu_{Lambda_n}(gamma = S).
CheckReport check_markov_factorization(int n, int d, const RCParams& params, const Region& S, const Point& x,
                                       const Point& y, const EnumerationOptions& opts = {});

// mu(A and B) >= mu(A) mu(B); lhs = mu(A and B).
CheckReport check_fkg(const Region& region, const RCParams& params, const Event& a, const Event& b,
                      const EnumerationOptions& opts = {});

// Regions with at most this many edges get their declared-increasing events
// verified exhaustively.
inline constexpr std::size_t kIncreasingCheckEdges = 12;

}  // namespace rclab

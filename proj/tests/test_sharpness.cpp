#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "rclab/errors.hpp"
#include "rclab/exact.hpp"
#include "rclab/sharpness.hpp"

using namespace rclab;

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

RCParams at(double p, double q = 2.0) { return RCParams{p, q, std::nullopt}; }

// 2p (p / (p + q(1-p)))^k for Lambda_k in d = 1.
double phi_line(double p, double q, int k) { return 2 * p * std::pow(oracle::tree_edge(p, q), k); }

}  // namespace

TEST_CASE("phi of the single point is 2dp") {
  for (int d = 1; d <= 3; ++d)
    for (double q : {1.0, 2.0, 5.0}) {
      const auto r = phi(make_box(d, 0), at(0.3, q));
      CHECK(close(r.value, 2 * d * 0.3, 1e-15));
      CHECK(r.terms.size() == static_cast<std::size_t>(2 * d));
    }
  CHECK(phi(make_box(2, 1), at(0.0)).value == 0.0);
}

TEST_CASE("phi of boxes in d = 1 follows the tree factorization") {
  for (double q : {1.0, 2.0, 3.0})
    for (double p : {0.1, 0.5, 0.9})
      for (int k = 0; k <= 6; ++k) {
        const double v = phi(make_box(1, k), at(p, q)).value;
        CHECK(close(v, phi_line(p, q, k), 1e-13));
        const double next = phi(make_box(1, k + 1), at(p, q)).value;
        CHECK(close(next, v * oracle::tree_edge(p, q), 1e-10));
      }
}

TEST_CASE("phi of Lambda_1 in d = 2 against the oracle") {
  const auto s = make_box(2, 1);
  const auto o = *s.origin();
  for (double p : {0.2, 0.45, 0.8}) {
    const oracle::Measure m(oracle::graph_of(s), p, 2.0);
    const auto res = phi(s, at(p));
    double want = 0.0;
    for (const auto& t : res.terms) want += p * m.connect(o, *s.find(t.inside));
    CHECK(close(res.value, want, 1e-12));
    CHECK(res.terms.size() == 12);
  }
}

TEST_CASE("per-edge boundary probabilities") {
  const auto s = make_box(2, 1);
  const auto uniform = phi(s, at(0.4));
  std::vector<double> bp(uniform.terms.size(), 0.4);
  CHECK(close(phi(s, at(0.4), bp).value, uniform.value, 1e-15));
  double want = 0.0;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    bp[i] = 0.05 * static_cast<double>(i + 1);
    want += bp[i] * uniform.terms[i].connection;
  }
  CHECK(close(phi(s, at(0.4), bp).value, want, 1e-14));
  CHECK_THROWS_AS(phi(s, at(0.4), std::vector<double>{0.5}), InvalidArgument);
  CHECK_THROWS_AS(phi(translate(s, {3, 0}), at(0.4)), InvalidArgument);
}

TEST_CASE("phi is nondecreasing in p") {
  for (const auto& s : {make_box(2, 0), make_box(2, 1), make_box(1, 3), make_rectangle({-1, 0}, {1, 1})})
    for (double q : {1.0, 2.0, 4.0}) {
      double prev = -1.0;
      for (int i = 0; i <= 16; ++i) {
        const double v = phi(s, at(i / 16.0, q)).value;
        CHECK(v >= prev - 1e-15);
        prev = v;
      }
    }
}

TEST_CASE("bracket from the single point is 1/(2d)") {
  const std::vector<Region> fam = {make_box(2, 0)};
  for (double q : {1.0, 2.0, 3.0}) {
    const auto est = bracket_ptilde(2, q, fam);
    CHECK(close(est.lower, 0.25, 1e-4));
    CHECK(est.lower <= 0.25);
    CHECK(est.upper == 1.0);
    CHECK(est.witness_phi < 1.0);
  }
}

TEST_CASE("bracket certifies phi < 1 at lower and phi >= 1 one step above") {
  const std::vector<Region> fam = {make_box(2, 0), make_box(2, 1)};
  const auto est = bracket_ptilde(2, 2.0, fam, 1e-4);
  CHECK(est.lower > 0.25);
  CHECK(est.lower <= 0.586 + 0.01);
  CHECK(phi(est.witness, at(est.lower)).value < 1.0);
  for (const auto& s : fam) CHECK(phi(s, at(std::min(1.0, est.lower + est.tol))).value >= 1.0);
  CHECK(est.lower <= est.upper);
  CHECK(!est.transcript.empty());
  const auto narrow = bracket_ptilde(2, 2.0, std::vector<Region>{make_box(2, 0)});
  CHECK(est.lower >= narrow.lower);
  CHECK(bracket_ptilde(2, 2.0, fam, 1e-4, 0.7).upper == 0.7);
}

TEST_CASE("bracket in d = 1 from boxes up to radius 20") {
  std::vector<Region> fam;
  for (int k = 0; k <= 20; ++k) fam.push_back(make_box(1, k));
  const auto est = bracket_ptilde(1, 2.0, fam, 1e-3);
  CHECK(est.lower >= 0.9);
  // closed form: the best member at lower has phi < 1
  double best = 1e300;
  for (int k = 0; k <= 20; ++k) best = std::min(best, phi_line(est.lower, 2.0, k));
  CHECK(best < 1.0);
}

TEST_CASE("bracket argument errors") {
  CHECK_THROWS_AS(bracket_ptilde(2, 2.0, std::vector<Region>{}), InvalidArgument);
  CHECK_THROWS_AS(bracket_ptilde(2, 2.0, std::vector<Region>{make_box(2, 0)}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(bracket_ptilde(2, 2.0, std::vector<Region>{make_box(1, 0)}), InvalidArgument);
}

TEST_CASE("decay bound arithmetic") {
  const auto b = decay_upper_bound(0.5, 1, Point{10, 0});
  CHECK(b.exponent == 10);
  CHECK(b.bound == std::ldexp(1.0, -10));
  CHECK(decay_upper_bound(0.5, 4, Point{3, 0}).bound == 1.0);
  CHECK_THROWS_AS(decay_upper_bound(1.0, 1, Point{1}), DomainError);

  // Lambda_2 in d = 1 at p = 1/2: phi = 1/9, L = 3
  const auto r = decay_upper_bound(make_box(1, 2), at(0.5), Point{6});
  CHECK(close(r.phi, 1.0 / 9.0, 1e-15));
  CHECK(r.box_radius == 3);
  CHECK(r.exponent == 2);
  CHECK(close(r.bound, 1.0 / 81.0, 1e-15));
  CHECK_THROWS_AS(decay_upper_bound(make_box(2, 1), at(0.9), Point{5, 0}), DomainError);
}

TEST_CASE("decay bound dominates exact d = 1 connection probabilities") {
  for (double q : {1.0, 2.0, 3.0})
    for (double p : {0.1, 0.3, 0.5, 0.7})
      for (int k = 0; k <= 3; ++k) {
        const auto s = make_box(1, k);
        if (phi(s, at(p, q)).value >= 1.0) continue;
        for (int m = 1; m <= 12; ++m) {
          const auto box = make_box(1, m);
          const auto o = *box.origin();
          for (int z = k + 1; z <= m; ++z) {
            const double exact = connection_probability(box, at(p, q), o, *box.find(Point{z}));
            CHECK(exact <= decay_upper_bound(s, at(p, q), Point{z}).bound * (1 + 1e-12));
          }
        }
      }
}

TEST_CASE("theta lower bound") {
  CHECK(close(theta_lower_bound(0.5, 0.25), 0.5, 1e-15));
  CHECK(close(theta_lower_bound(1.0, 0.3), 0.7, 1e-15));
  CHECK(theta_lower_bound(0.25 + 1e-12, 0.25) < 1e-10);
  CHECK_THROWS_AS(theta_lower_bound(0.2, 0.25), DomainError);
  CriticalEstimate est{0.25, 1.0, make_box(2, 0), 0.99, "point", 1e-4, {}};
  CHECK(close(theta_lower_bound(0.8, est), 0.6875, 1e-15));
}

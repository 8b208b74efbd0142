#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "rclab/errors.hpp"
#include "rclab/exact.hpp"
#include "rclab/lattice.hpp"

using namespace rclab;

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Region path(int k) { return make_rectangle({0}, {k}); }

// Connection event the library cannot shortcut (it is evaluated per
// configuration).
Event connect_pair(std::size_t x, std::size_t y) { return connection_event(x, y); }

}  // namespace

TEST_CASE("single edge and two-edge path closed forms") {
  const RCParams pr{0.5, 2.0, std::nullopt};
  CHECK(close(event_probability(path(1), pr, edge_open_event(0)), 1.0 / 3.0, 1e-12));
  CHECK(close(event_probability(path(2), pr, connect_pair(0, 2)), 1.0 / 9.0, 1e-12));
  CHECK(close(connection_probability(path(2), pr, 0, 2), 1.0 / 9.0, 1e-12));
  CHECK(close(partition_function(path(1), pr), 0.5 * 2 + 0.5 * 4, 1e-12));
}

TEST_CASE("partition function and weights against the oracle") {
  const auto r = make_rectangle({0, 0}, {1, 2});
  for (double q : {1.0, 2.0, 3.5})
    for (double p : {0.0, 0.2, 0.7, 1.0}) {
      const RCParams pr{p, q, std::nullopt};
      const oracle::Measure m(oracle::graph_of(r), p, q);
      CHECK(close(partition_function(r, pr), m.partition(), 1e-9 * m.partition()));
      CHECK(close(log_partition_function(r, pr), std::log(m.partition()), 1e-12));
      for (std::uint64_t b : {0ull, 5ull, 127ull})
        CHECK(close(weight(r, Config(r.edge_count(), b), pr), m.weight(b), 1e-12));
    }
}

TEST_CASE("per-edge probabilities") {
  const auto r = make_box(2, 1);
  std::vector<double> pe(r.edge_count());
  for (std::size_t e = 0; e < pe.size(); ++e) pe[e] = 0.1 + 0.07 * static_cast<double>(e);
  const RCParams pr{0.5, 2.0, pe};
  const oracle::Measure m(oracle::graph_of(r), pe, 2.0);
  const auto o = *r.origin();
  for (std::size_t v = 0; v < r.vertex_count(); ++v)
    CHECK(close(connection_probability(r, pr, o, v), m.connect(o, v), 1e-12));
  CHECK_THROWS_AS(event_probability(r, RCParams{0.5, 2.0, std::vector<double>{0.5}}, always_event()),
                  InvalidArgument);

  const Region coupled(1, {{0}, {1}, {2}}, {{0, 1}, {1, 2}}, std::vector<double>{1.0, 2.0});
  const auto ep = edge_probabilities_from_couplings(coupled, 0.5);
  CHECK(close(ep[0], 1.0 - std::exp(-0.5), 1e-15));
  CHECK(close(ep[1], 1.0 - std::exp(-1.0), 1e-15));
}

TEST_CASE("random connectivity events on the 3x3 box") {
  const auto r = make_rectangle({0, 0}, {2, 2});
  std::mt19937 gen(7);
  std::uniform_int_distribution<std::size_t> pick(0, r.vertex_count() - 1);
  for (double q : {1.0, 2.0, 4.0}) {
    const double p = 0.45;
    const oracle::Measure m(oracle::graph_of(r), p, q);
    for (int t = 0; t < 6; ++t) {
      const auto x = pick(gen), y = pick(gen), z = pick(gen);
      const auto ev = intersection_event(connection_event(x, y), edge_open_event(t));
      const double want = m.expect([&](std::uint64_t b, const std::vector<int>& l) {
        return (l[x] == l[y] && ((b >> t) & 1u)) ? 1.0 : 0.0;
      });
      CHECK(close(event_probability(r, RCParams{p, q, std::nullopt}, ev), want, 1e-12));
      const std::vector<std::size_t> set = {y, z};
      const double want_set = m.expect(
          [&](std::uint64_t, const std::vector<int>& l) { return (l[x] == l[y] || l[x] == l[z]) ? 1.0 : 0.0; });
      CHECK(close(connection_probability_to_set(r, RCParams{p, q, std::nullopt}, x, set), want_set, 1e-12));
    }
  }
}

TEST_CASE("q = 1 is independent percolation") {
  const auto r = make_rectangle({0, 0}, {1, 2});
  const double p = 0.3;
  CHECK(close(event_probability(r, RCParams{p, 1.0, std::nullopt},
                                intersection_event(edge_open_event(0), edge_open_event(3))),
              p * p, 1e-14));
  CHECK(close(partition_function(r, RCParams{p, 1.0, std::nullopt}), 1.0, 1e-14));
}

TEST_CASE("forest shortcut agrees with enumeration") {
  const double p = 0.6, q = 2.5;
  const auto r = make_rectangle({0, 0}, {3, 0});
  const auto probs = connection_probabilities_from(r, RCParams{p, q, std::nullopt}, 1);
  for (std::size_t v = 0; v < r.vertex_count(); ++v)
    CHECK(close(probs[v], event_probability(r, RCParams{p, q, std::nullopt}, connect_pair(1, v)), 1e-13));
  const double pp = oracle::tree_edge(p, q);
  CHECK(close(connection_probability(path(20), RCParams{p, q, std::nullopt}, 0, 20), std::pow(pp, 20), 1e-15));
}

TEST_CASE("log-space weights past 20 edges") {
  const double p = 0.4, q = 3.0;
  const auto r = path(22);
  const RCParams pr{p, q, std::nullopt};
  const double logz = 23 * std::log(q) + 22 * std::log(p / q + 1 - p);
  CHECK(close(log_partition_function(r, pr), logz, 1e-10));
  CHECK(close(event_probability(r, pr, connect_pair(0, 22)), std::pow(oracle::tree_edge(p, q), 22), 1e-15));
  CHECK(close(event_probability(r, pr, connect_pair(3, 9)), std::pow(oracle::tree_edge(p, q), 6), 1e-13));
}

TEST_CASE("results do not depend on the worker count") {
  const auto r = make_rectangle({0, 0}, {2, 3});
  REQUIRE(r.edge_count() >= 16);
  const RCParams pr{0.55, 2.0, std::nullopt};
  EnumerationOptions one, three;
  one.threads = 1;
  three.threads = 3;
  const auto ev = connect_pair(0, r.vertex_count() - 1);
  CHECK(event_probability(r, pr, ev, one) == event_probability(r, pr, ev, three));
  CHECK(partition_function(r, pr, one) == partition_function(r, pr, three));
}

TEST_CASE("derivative against central differences of the oracle") {
  const auto r = make_rectangle({0, 0}, {1, 1});
  const auto g = oracle::graph_of(r);
  for (double q : {1.0, 2.0, 3.0})
    for (double p : {0.2, 0.5, 0.8}) {
      const auto f = [](std::uint64_t, const std::vector<int>& l) { return l[0] == l[3] ? 1.0 : 0.0; };
      CHECK(close(derivative_event_probability(r, RCParams{p, q, std::nullopt}, connect_pair(0, 3)),
                  oracle::finite_difference(g, p, q, f), 1e-7));
    }
  // single edge, q = 2: d/dp p/(2-p) = 2/(2-p)^2
  CHECK(close(derivative_event_probability(path(1), RCParams{0.5, 2.0, std::nullopt}, edge_open_event(0)),
              8.0 / 9.0, 1e-12));
  CHECK(derivative_event_probability(path(2), RCParams{0.3, 2.0, std::nullopt}, always_event()) == 0.0);
  CHECK_THROWS_AS(derivative_event_probability(path(1), RCParams{0.0, 2.0, std::nullopt}, always_event()),
                  DomainError);
  CHECK_THROWS_AS(
      derivative_event_probability(path(1), RCParams{0.5, 2.0, std::vector<double>{0.5}}, always_event()),
      DomainError);
}

TEST_CASE("edge statistics and pivotality against the oracle") {
  const auto r = make_rectangle({0, 0}, {1, 1});
  const oracle::Measure m(oracle::graph_of(r), 0.4, 2.0);
  const auto ev = connect_pair(0, 3);
  const auto st = edge_statistics(r, RCParams{0.4, 2.0, std::nullopt}, ev);
  const auto g = oracle::graph_of(r);
  auto in_a = [&](std::uint64_t b) {
    std::vector<int> l;
    oracle::label(g, b, l);
    return l[0] == l[3];
  };
  for (std::size_t e = 0; e < r.edge_count(); ++e) {
    const std::uint64_t bit = std::uint64_t{1} << e;
    const double open = m.expect([&](std::uint64_t b, const std::vector<int>&) { return (b & bit) ? 1.0 : 0.0; });
    const double a_open =
        m.expect([&](std::uint64_t b, const std::vector<int>& l) { return ((b & bit) && l[0] == l[3]) ? 1.0 : 0.0; });
    const double a = m.connect(0, 3);
    const double piv = m.expect([&](std::uint64_t b, const std::vector<int>&) {
      return (in_a(b | bit) && !in_a(b & ~bit)) ? 1.0 : 0.0;
    });
    CHECK(close(st.open_probability[e], open, 1e-12));
    CHECK(close(st.given_open[e], a_open / open, 1e-12));
    CHECK(close(st.given_closed[e], (a - a_open) / (1 - open), 1e-12));
    CHECK(close(st.pivotal[e], piv, 1e-12));
    CHECK(close(pivotal_probability(r, RCParams{0.4, 2.0, std::nullopt}, e, ev), piv, 1e-12));
    CHECK(close(st.raised[e] - st.lowered[e], piv, 1e-12));
  }
}

TEST_CASE("increasing events") {
  const auto r = make_rectangle({0, 0}, {1, 2});
  CHECK(verify_increasing(r, connect_pair(0, 5)));
  CHECK(verify_increasing(r, intersection_event(edge_open_event(1), connect_pair(2, 3))));
  const Event closed{"closed(0)", [](const ConfigView& v) { return !v.edge_open(0); }, true};
  CHECK(!verify_increasing(r, closed));
}

TEST_CASE("gamma distribution") {
  const double p = 0.3, q = 2.0;
  const auto g1 = gamma_distribution(1, 1, RCParams{p, q, std::nullopt});
  // gamma = {0} iff both edges of Lambda_1 are closed
  const double w0 = q * q * q * (1 - p) * (1 - p), w1 = 2 * q * q * p * (1 - p), w2 = q * p * p;
  double total = 0.0, at_origin = 0.0;
  for (const auto& rec : g1) {
    total += rec.probability;
    if (rec.vertices == std::vector<std::size_t>{1}) at_origin = rec.probability;
  }
  CHECK(close(total, 1.0, 1e-14));
  CHECK(close(at_origin, w0 / (w0 + w1 + w2), 1e-14));

  const auto g2 = gamma_distribution(1, 2, RCParams{0.5, 2.0, std::nullopt});
  total = 0.0;
  for (const auto& rec : g2) {
    total += rec.probability;
    for (auto v : rec.vertices) CHECK(v == 4);  // only the centre is interior
  }
  CHECK(close(total, 1.0, 1e-13));
  for (std::size_t i = 1; i < g2.size(); ++i) CHECK(g2[i - 1].vertices < g2[i].vertices);
}

TEST_CASE("susceptibility is the sum of connection probabilities") {
  const auto r = make_box(2, 1);
  const oracle::Measure m(oracle::graph_of(r), 0.35, 2.0);
  const auto o = *r.origin();
  double chi = 0.0;
  for (std::size_t v = 0; v < r.vertex_count(); ++v) chi += m.connect(o, v);
  CHECK(close(susceptibility(r, RCParams{0.35, 2.0, std::nullopt}, o), chi, 1e-12));
}

TEST_CASE("argument and resource errors") {
  CHECK_THROWS_AS(RCParams({1.5, 2.0, std::nullopt}).validate(1), InvalidArgument);
  CHECK_THROWS_AS(RCParams({0.5, 0.5, std::nullopt}).validate(1), InvalidArgument);
  CHECK_THROWS_AS(Config(2, 4), InvalidArgument);
  CHECK_THROWS_AS(connection_probability(path(2), RCParams{}, 0, 9), InvalidArgument);
  CHECK_THROWS_AS(event_probability(make_rectangle({0, 0}, {3, 4}), RCParams{}, always_event()), ResourceError);
  EnumerationOptions small;
  small.max_edges = 3;
  CHECK_THROWS_AS(partition_function(make_box(2, 1), RCParams{}, small), ResourceError);
}

#include <algorithm>
#include <set>

#include "doctest.h"
#include "oracle.hpp"
#include "rclab/errors.hpp"
#include "rclab/lattice.hpp"

using namespace rclab;

namespace {

int l1(const Point& a, const Point& b) {
  int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

// Brute-force edge count of the graph induced on a point set.
std::size_t induced_edges(const std::vector<Point>& pts) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) c += l1(pts[i], pts[j]) == 1;
  return c;
}

}  // namespace

TEST_CASE("box sizes match a point-by-point construction") {
  for (int d = 1; d <= 3; ++d)
    for (int n = 0; n <= 3; ++n) {
      const auto box = make_box(d, n);
      const auto pts = oracle::box_points(d, n);
      CHECK(box.vertex_count() == pts.size());
      CHECK(box.edge_count() == induced_edges(pts));
      for (const auto& x : pts) CHECK(box.contains(x));
      CHECK(box.radius() == n);
    }
  CHECK(make_box(2, 1).edge_count() == 12);
}

TEST_CASE("edges are unit steps stored with a < b and sorted") {
  const auto r = make_rectangle({0, 0}, {3, 3});
  CHECK(r.edge_count() == 24);
  std::vector<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : r.edges()) {
    CHECK(e.a < e.b);
    CHECK(l1(r.vertex(e.a), r.vertex(e.b)) == 1);
    seen.emplace_back(e.a, e.b);
  }
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  CHECK(std::set(seen.begin(), seen.end()).size() == seen.size());
}

TEST_CASE("edge boundary against Z^d and inside an ambient region") {
  const auto s = make_box(2, 1);
  const auto zd = edge_boundary(s);
  CHECK(zd.edges.size() == 12);
  std::size_t expected = 0;
  for (const auto& x : s.vertices())
    for (std::size_t k = 0; k < 2; ++k)
      for (int sgn : {-1, 1}) {
        auto y = x;
        y[k] += sgn;
        expected += !s.contains(y);
      }
  CHECK(zd.edges.size() == expected);
  for (const auto& be : zd.edges) {
    CHECK(s.contains(be.inside));
    CHECK(!s.contains(be.outside));
    CHECK(l1(be.inside, be.outside) == 1);
  }

  const auto amb = make_rectangle({-1, -1}, {2, 2});
  const auto inner = edge_boundary(s, amb);
  // S touches the ambient only across x = 2 and y = 2
  CHECK(inner.edges.size() == 6);
  for (const auto& be : inner.edges) {
    CHECK(amb.contains(be.outside));
    CHECK(be.ambient_edge.has_value());
  }
}

TEST_CASE("inner boundary, origin and radius") {
  const auto b = make_box(2, 1);
  CHECK(b.inner_boundary().size() == 8);
  REQUIRE(b.origin());
  CHECK(b.vertex(*b.origin()) == Point{0, 0});
  CHECK(make_box(2, 0).inner_boundary().size() == 1);
  const auto t = translate(b, {2, 0});
  CHECK(!t.origin());
  CHECK_THROWS_AS(t.require_origin(), InvalidArgument);
  CHECK(t.radius() == 3);
}

TEST_CASE("induced subregions keep exactly the internal edges") {
  const auto amb = make_box(2, 2);
  const std::vector<Point> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {-2, -2}};
  const auto s = induced_subregion(amb, pts);
  CHECK(s.vertex_count() == 5);
  CHECK(s.edge_count() == induced_edges(pts));
  CHECK_THROWS_AS(induced_subregion(amb, std::vector<Point>{{5, 5}}), InvalidArgument);
}

TEST_CASE("forest detection") {
  CHECK(make_rectangle({0}, {20}).is_forest());
  CHECK(make_box(1, 20).is_forest());
  CHECK(!make_box(2, 1).is_forest());
  CHECK(make_rectangle({0, 0}, {3, 0}).is_forest());
}

TEST_CASE("candidate sets are nested boxes") {
  const auto fam = candidate_sets(2, 2);
  REQUIRE(fam.size() == 3);
  for (std::size_t k = 0; k < fam.size(); ++k) CHECK(fam[k] == make_box(2, static_cast<int>(k)));
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(Region(0, {}, {}), InvalidArgument);
  CHECK_THROWS_AS(Region(1, {{0}, {0}}, {}), InvalidArgument);
  CHECK_THROWS_AS(Region(1, {{0}, {1}}, {{0, 0}}), InvalidArgument);
  CHECK_THROWS_AS(Region(1, {{0}, {1}}, {{0, 1}, {0, 1}}), InvalidArgument);
  CHECK_THROWS_AS(Region(1, {{0}, {1}}, {{0, 1}}, std::vector<double>{-1.0}), InvalidArgument);
  CHECK_THROWS_AS(make_box(2, -1), InvalidArgument);
  CHECK_THROWS_AS(make_box(3, 100, 1000), ResourceError);
  CHECK_THROWS_AS(translate(make_box(2, 1), {1}), InvalidArgument);
  CHECK(sup_norm({3, -5, 1}) == 5);
}

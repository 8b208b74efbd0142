#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rclab/rclab.h"

using nlohmann::json;

namespace {

struct Region {
  rclab_region* h = nullptr;
  ~Region() { rclab_region_free(h); }
};

struct Event {
  rclab_event* h = nullptr;
  ~Event() { rclab_event_free(h); }
};

json take(char* s) {
  REQUIRE(s != nullptr);
  auto j = json::parse(s);
  rclab_string_free(s);
  return j;
}

rclab_params params(double p, double q) { return rclab_params{p, q, nullptr, 0}; }

}  // namespace

TEST_CASE("version and last error") {
  CHECK(std::strlen(rclab_version()) > 0);
  Region r;
  CHECK(rclab_region_box(0, 1, &r.h) == RCLAB_ERR_INVALID_ARGUMENT);
  CHECK(r.h == nullptr);
  CHECK(std::strlen(rclab_last_error()) > 0);
  CHECK(rclab_region_box(2, 1, &r.h) == RCLAB_OK);
  CHECK(std::string(rclab_last_error()).empty());
  CHECK(rclab_region_box(2, 1, nullptr) == RCLAB_ERR_INVALID_ARGUMENT);
  rclab_string_free(nullptr);
  rclab_region_free(nullptr);
  rclab_event_free(nullptr);
}

TEST_CASE("region handles") {
  Region box;
  REQUIRE(rclab_region_box(2, 1, &box.h) == RCLAB_OK);
  CHECK(rclab_region_dimension(box.h) == 2);
  CHECK(rclab_region_vertex_count(box.h) == 9);
  CHECK(rclab_region_edge_count(box.h) == 12);

  const int origin[2] = {0, 0};
  size_t idx = 99;
  REQUIRE(rclab_region_find(box.h, origin, &idx) == RCLAB_OK);
  int coords[2] = {7, 7};
  REQUIRE(rclab_region_vertex(box.h, idx, coords) == RCLAB_OK);
  CHECK(coords[0] == 0);
  CHECK(coords[1] == 0);
  CHECK(rclab_region_vertex(box.h, 9, coords) == RCLAB_ERR_INVALID_ARGUMENT);
  const int outside[2] = {5, 5};
  CHECK(rclab_region_find(box.h, outside, &idx) != RCLAB_OK);

  size_t count = 0;
  std::vector<size_t> inner(16);
  REQUIRE(rclab_region_inner_boundary(box.h, inner.data(), inner.size(), &count) == RCLAB_OK);
  CHECK(count == 8);

  char* text = nullptr;
  REQUIRE(rclab_region_to_json(box.h, &text) == RCLAB_OK);
  Region back;
  REQUIRE(rclab_region_from_json(text, &back.h) == RCLAB_OK);
  rclab_string_free(text);
  char* h1 = nullptr;
  char* h2 = nullptr;
  REQUIRE(rclab_region_hash(box.h, &h1) == RCLAB_OK);
  REQUIRE(rclab_region_hash(back.h, &h2) == RCLAB_OK);
  CHECK(std::string(h1) == std::string(h2));
  rclab_string_free(h1);
  rclab_string_free(h2);
  Region bad;
  CHECK(rclab_region_from_json("{not json", &bad.h) == RCLAB_ERR_INVALID_ARGUMENT);

  const int shift[2] = {3, -1};
  Region moved;
  REQUIRE(rclab_region_translate(box.h, shift, &moved.h) == RCLAB_OK);
  const int corner[2] = {4, 0};
  CHECK(rclab_region_find(moved.h, corner, &idx) == RCLAB_OK);

  char* boundary = nullptr;
  REQUIRE(rclab_edge_boundary(box.h, nullptr, &boundary) == RCLAB_OK);
  const auto b = take(boundary);
  CHECK(b.dump().size() > 2);
}

TEST_CASE("exact quantities") {
  const int lo[1] = {0};
  const int hi[1] = {1};
  Region edge;
  REQUIRE(rclab_region_rect(1, lo, hi, &edge.h) == RCLAB_OK);
  const auto pr = params(0.3, 2.0);
  double z = 0.0;
  REQUIRE(rclab_partition_function(edge.h, &pr, &z) == RCLAB_OK);
  CHECK(std::abs(z - (0.7 * 4.0 + 0.3 * 2.0)) < 1e-14);
  double logz = 0.0;
  REQUIRE(rclab_log_partition_function(edge.h, &pr, &logz) == RCLAB_OK);
  CHECK(std::abs(logz - std::log(z)) < 1e-13);
  double w = 0.0;
  REQUIRE(rclab_weight(edge.h, &pr, 1, &w) == RCLAB_OK);
  CHECK(std::abs(w - 0.6) < 1e-15);
  double c = 0.0;
  REQUIRE(rclab_connection_probability(edge.h, &pr, 0, 1, &c) == RCLAB_OK);
  CHECK(std::abs(c - 0.3 / (0.3 + 2.0 * 0.7)) < 1e-14);

  const auto bad_q = params(0.3, 0.5);
  CHECK(rclab_partition_function(edge.h, &bad_q, &z) == RCLAB_ERR_INVALID_ARGUMENT);
  const auto bad_p = params(1.5, 2.0);
  CHECK(rclab_partition_function(edge.h, &bad_p, &z) == RCLAB_ERR_INVALID_ARGUMENT);
  CHECK(rclab_partition_function(edge.h, nullptr, &z) == RCLAB_ERR_INVALID_ARGUMENT);

  const double per_edge[1] = {0.9};
  rclab_params pe{0.3, 2.0, per_edge, 1};
  REQUIRE(rclab_connection_probability(edge.h, &pe, 0, 1, &c) == RCLAB_OK);
  CHECK(std::abs(c - 0.9 / (0.9 + 2.0 * 0.1)) < 1e-14);
  rclab_params wrong_len{0.3, 2.0, per_edge, 3};
  CHECK(rclab_connection_probability(edge.h, &wrong_len, 0, 1, &c) == RCLAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("events must fit the region") {
  Region box;
  REQUIRE(rclab_region_box(2, 1, &box.h) == RCLAB_OK);
  const auto pr = params(0.5, 2.0);
  Event far;
  REQUIRE(rclab_event_connect(0, 100, &far.h) == RCLAB_OK);
  double v = 0.0;
  CHECK(rclab_event_probability(box.h, &pr, far.h, &v) == RCLAB_ERR_INVALID_ARGUMENT);
  Event open;
  REQUIRE(rclab_event_edge_open(40, &open.h) == RCLAB_OK);
  CHECK(rclab_event_probability(box.h, &pr, open.h, &v) == RCLAB_ERR_INVALID_ARGUMENT);

  Event always, conn, both;
  REQUIRE(rclab_event_always(&always.h) == RCLAB_OK);
  REQUIRE(rclab_event_connect(0, 8, &conn.h) == RCLAB_OK);
  REQUIRE(rclab_event_and(always.h, conn.h, &both.h) == RCLAB_OK);
  double a = 0.0, b = 0.0;
  REQUIRE(rclab_event_probability(box.h, &pr, always.h, &a) == RCLAB_OK);
  CHECK(std::abs(a - 1.0) < 1e-14);
  REQUIRE(rclab_event_probability(box.h, &pr, conn.h, &a) == RCLAB_OK);
  REQUIRE(rclab_event_probability(box.h, &pr, both.h, &b) == RCLAB_OK);
  CHECK(a == b);
  REQUIRE(rclab_connection_probability(box.h, &pr, 0, 8, &b) == RCLAB_OK);
  CHECK(std::abs(a - b) < 1e-14);
}

TEST_CASE("enumeration cap") {
  const size_t saved = rclab_enumeration_cap();
  CHECK(saved == 26);
  CHECK(rclab_set_enumeration_cap(63) == RCLAB_ERR_INVALID_ARGUMENT);
  CHECK(rclab_enumeration_cap() == saved);
  REQUIRE(rclab_set_enumeration_cap(10) == RCLAB_OK);
  Region box;
  REQUIRE(rclab_region_box(2, 1, &box.h) == RCLAB_OK);
  const auto pr = params(0.5, 2.0);
  double z = 0.0;
  CHECK(rclab_partition_function(box.h, &pr, &z) == RCLAB_ERR_RESOURCE);
  CHECK(std::strlen(rclab_last_error()) > 0);
  REQUIRE(rclab_set_enumeration_cap(saved) == RCLAB_OK);
  CHECK(rclab_partition_function(box.h, &pr, &z) == RCLAB_OK);

  rclab_set_threads(2);
  CHECK(rclab_threads() == 2);
  rclab_set_threads(0);
  CHECK(rclab_threads() >= 1);
}

TEST_CASE("sharpness entry points") {
  Region s;
  REQUIRE(rclab_region_box(1, 0, &s.h) == RCLAB_OK);
  const auto pr = params(0.5, 2.0);
  double phi = 0.0;
  char* js = nullptr;
  REQUIRE(rclab_phi(s.h, &pr, nullptr, 0, &phi, &js) == RCLAB_OK);
  const auto j = take(js);
  // a single vertex: the two boundary edges are the whole sum
  CHECK(std::abs(phi - 1.0) < 1e-14);
  CHECK(j.is_object());
  REQUIRE(rclab_phi(s.h, &pr, nullptr, 0, &phi, nullptr) == RCLAB_OK);

  double bound = 0.0;
  const int z[1] = {4};
  const auto low = params(0.2, 2.0);
  REQUIRE(rclab_phi(s.h, &low, nullptr, 0, &phi, nullptr) == RCLAB_OK);
  REQUIRE(rclab_decay_upper_bound(s.h, &low, z, &bound, nullptr) == RCLAB_OK);
  CHECK(std::abs(bound - std::pow(phi, 4)) < 1e-15);
  CHECK(rclab_decay_upper_bound(s.h, &pr, z, &bound, nullptr) == RCLAB_ERR_DOMAIN);

  double t = 0.0;
  REQUIRE(rclab_theta_lower_bound(0.5, 0.25, &t) == RCLAB_OK);
  CHECK(std::abs(t - 0.5) < 1e-15);
  CHECK(rclab_theta_lower_bound(0.2, 0.25, &t) == RCLAB_ERR_DOMAIN);

  const rclab_region* family[1] = {s.h};
  double lower = 0.0;
  char* bj = nullptr;
  REQUIRE(rclab_bracket_ptilde(1, 2.0, family, 1, 1e-6, -1.0, "single", &lower, &bj) == RCLAB_OK);
  const auto bracket = take(bj);
  // phi of a single vertex in d = 1 is 2p
  CHECK(std::abs(lower - 0.5) < 1e-5);
  CHECK(bracket.is_object());
}

TEST_CASE("checkers report JSON") {
  int holds = -1;
  char* js = nullptr;
  REQUIRE(rclab_check_tanh_bound(0.4, &holds, &js) == RCLAB_OK);
  CHECK(holds == 1);
  const auto j = take(js);
  CHECK(j.contains("slack"));

  Region box;
  REQUIRE(rclab_region_box(2, 1, &box.h) == RCLAB_OK);
  Event a, b;
  REQUIRE(rclab_event_connect(0, 8, &a.h) == RCLAB_OK);
  REQUIRE(rclab_event_edge_open(0, &b.h) == RCLAB_OK);
  const auto pr = params(0.5, 2.0);
  REQUIRE(rclab_check_fkg(box.h, &pr, a.h, b.h, &holds, &js) == RCLAB_OK);
  CHECK(holds == 1);
  rclab_string_free(js);

  const double grid[3] = {0.5, 0.7, 0.9};
  int all = -1;
  REQUIRE(rclab_check_differential_inequality(2, 1, 2.0, grid, 3, -1.0, &all, &js) == RCLAB_OK);
  const auto reports = take(js);
  CHECK(reports.is_array());
  CHECK(reports.size() == 3);
  CHECK(all == 1);
  // below the bracket the inequality is not claimed; the point is still reported
  const double low[1] = {0.2};
  REQUIRE(rclab_check_differential_inequality(2, 1, 2.0, low, 1, -1.0, &all, &js) == RCLAB_OK);
  CHECK(take(js).size() == 1);
}

TEST_CASE("Monte Carlo through the C API") {
  Region box;
  REQUIRE(rclab_region_box(2, 1, &box.h) == RCLAB_OK);
  Event conn;
  REQUIRE(rclab_event_connect(0, 8, &conn.h) == RCLAB_OK);
  const auto pr = params(0.5, 2.0);
  rclab_mc_options opts{20000, 3, RCLAB_SAMPLER_AUTO, 0, 0};
  double m1 = 0, s1 = 0, m2 = 0, s2 = 0;
  char* js = nullptr;
  REQUIRE(rclab_mc_estimate_event(box.h, &pr, conn.h, &opts, &m1, &s1, &js) == RCLAB_OK);
  const auto j = take(js);
  CHECK(j["sampler"] == "swendsen_wang");
  CHECK(j["burn_in"] == 2000);
  REQUIRE(rclab_mc_estimate_event(box.h, &pr, conn.h, &opts, &m2, &s2, nullptr) == RCLAB_OK);
  CHECK(m1 == m2);
  CHECK(s1 == s2);
  double exact = 0.0;
  REQUIRE(rclab_event_probability(box.h, &pr, conn.h, &exact) == RCLAB_OK);
  CHECK(std::abs(m1 - exact) < 4.5 * s1);

  const auto frac = params(0.5, 2.5);
  rclab_mc_options sw{2000, 3, RCLAB_SAMPLER_SWENDSEN_WANG, 0, 0};
  CHECK(rclab_mc_estimate_event(box.h, &frac, conn.h, &sw, &m1, &s1, nullptr) == RCLAB_ERR_INVALID_ARGUMENT);

  const int ks[2] = {1, 2};
  rclab_mc_options fo{5000, 1, RCLAB_SAMPLER_AUTO, 0, 0};
  REQUIRE(rclab_mc_fit_decay(1, 2.0, 0.5, 4, ks, 2, &fo, &js) == RCLAB_OK);
  const auto fit = take(js);
  CHECK(fit["points"].size() == 2);
}

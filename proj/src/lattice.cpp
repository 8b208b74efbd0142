#include "rclab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdlib>
#include <limits>
#include <set>
#include <string>

#include "rclab/errors.hpp"
#include "rclab/union_find.hpp"

namespace rclab {

int sup_norm(const Point& x) {
  int r = 0;
  for (int c : x) r = std::max(r, std::abs(c));
  return r;
}

Region::Region(int dimension, std::vector<Point> vertices, std::vector<Edge> edges,
               std::optional<std::vector<double>> couplings)
    : dimension_(dimension),
      vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      couplings_(std::move(couplings)) {
  if (dimension_ < 1) throw InvalidArgument("region dimension must be >= 1");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].size() != static_cast<std::size_t>(dimension_))
      throw InvalidArgument("vertex " + std::to_string(i) + " has wrong dimension");
    if (!index_.emplace(vertices_[i], i).second)
      throw InvalidArgument("duplicate vertex " + std::to_string(i));
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto& e : edges_) {
    if (e.a >= vertices_.size() || e.b >= vertices_.size())
      throw InvalidArgument("edge endpoint out of range");
    if (e.a == e.b) throw InvalidArgument("self-loop edge");
    if (e.a > e.b) std::swap(e.a, e.b);
    if (!seen.emplace(e.a, e.b).second) throw InvalidArgument("duplicate edge");
  }
  if (couplings_) {
    if (couplings_->size() != edges_.size())
      throw InvalidArgument("couplings length must equal edge count");
    for (double j : *couplings_)
      if (!(j > 0.0) || !std::isfinite(j)) throw InvalidArgument("couplings must be positive");
  }
}

std::optional<std::size_t> Region::find(const Point& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Region::find_edge(std::size_t x, std::size_t y) const {
  if (x > y) std::swap(x, y);
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].a == x && edges_[e].b == y) return e;
  return std::nullopt;
}

std::optional<std::size_t> Region::origin() const {
  return find(Point(static_cast<std::size_t>(dimension_), 0));
}

std::size_t Region::require_origin() const {
  auto o = origin();
  if (!o) throw InvalidArgument("region does not contain the origin");
  return *o;
}

int Region::radius() const {
  int r = 0;
  for (const auto& v : vertices_) r = std::max(r, sup_norm(v));
  return r;
}

std::vector<std::size_t> Region::inner_boundary() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    Point y = vertices_[i];
    bool on_boundary = false;
    for (int k = 0; k < dimension_ && !on_boundary; ++k) {
      for (int s : {-1, 1}) {
        y[k] += s;
        if (!contains(y)) on_boundary = true;
        y[k] -= s;
      }
    }
    if (on_boundary) out.push_back(i);
  }
  return out;
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> Region::adjacency() const {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(vertices_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    adj[edges_[e].a].emplace_back(edges_[e].b, e);
    adj[edges_[e].b].emplace_back(edges_[e].a, e);
  }
  return adj;
}

bool Region::is_forest() const {
  UnionFind uf(vertices_.size());
  for (const auto& e : edges_)
    if (!uf.unite(static_cast<std::uint32_t>(e.a), static_cast<std::uint32_t>(e.b))) return false;
  return true;
}

Region make_rectangle(const Point& lo, const Point& hi, std::size_t vertex_cap) {
  if (lo.empty() || lo.size() != hi.size())
    throw InvalidArgument("rectangle corners must have equal, positive dimension");
  const int d = static_cast<int>(lo.size());
  std::vector<std::size_t> extent(d);
  std::size_t count = 1;
  for (int k = 0; k < d; ++k) {
    if (hi[k] < lo[k]) throw InvalidArgument("rectangle has an empty side");
    extent[k] = static_cast<std::size_t>(hi[k] - lo[k]) + 1;
    if (count > vertex_cap / extent[k])
      throw ResourceError("vertex count exceeds cap of " + std::to_string(vertex_cap));
    count *= extent[k];
  }
  if (count > vertex_cap)
    throw ResourceError("vertex count exceeds cap of " + std::to_string(vertex_cap));

  // Row-major: last coordinate varies fastest, which gives lexicographic order.
  std::vector<std::size_t> stride(d, 1);
  for (int k = d - 2; k >= 0; --k) stride[k] = stride[k + 1] * extent[k + 1];

  std::vector<Point> vertices;
  vertices.reserve(count);
  Point x = lo;
  for (std::size_t i = 0; i < count; ++i) {
    vertices.push_back(x);
    for (int k = d - 1; k >= 0; --k) {
      if (++x[k] <= hi[k]) break;
      x[k] = lo[k];
    }
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < count; ++i) {
    for (int k = d - 1; k >= 0; --k) {
      if (vertices[i][k] < hi[k]) edges.push_back({i, i + stride[k]});
    }
  }
  return Region(d, std::move(vertices), std::move(edges));
}

Region make_box(int d, int n, std::size_t vertex_cap) {
  if (d < 1) throw InvalidArgument("box dimension must be >= 1");
  if (n < 0) throw InvalidArgument("box radius must be >= 0");
  return make_rectangle(Point(d, -n), Point(d, n), vertex_cap);
}

Region induced_subregion(const Region& ambient, std::span<const Point> points) {
  std::vector<char> keep(ambient.vertex_count(), 0);
  for (const auto& x : points) {
    auto i = ambient.find(x);
    if (!i) throw InvalidArgument("point not in ambient region");
    keep[*i] = 1;
  }
  std::vector<std::size_t> remap(ambient.vertex_count(), std::numeric_limits<std::size_t>::max());
  std::vector<Point> vertices;
  for (std::size_t i = 0; i < ambient.vertex_count(); ++i) {
    if (!keep[i]) continue;
    remap[i] = vertices.size();
    vertices.push_back(ambient.vertex(i));
  }
  std::vector<Edge> edges;
  std::optional<std::vector<double>> couplings;
  if (ambient.couplings()) couplings.emplace();
  for (std::size_t e = 0; e < ambient.edge_count(); ++e) {
    const auto& ed = ambient.edge(e);
    if (keep[ed.a] && keep[ed.b]) {
      edges.push_back({remap[ed.a], remap[ed.b]});
      if (couplings) couplings->push_back((*ambient.couplings())[e]);
    }
  }
  return Region(ambient.dimension(), std::move(vertices), std::move(edges), std::move(couplings));
}

Region translate(const Region& region, const Point& offset) {
  if (offset.size() != static_cast<std::size_t>(region.dimension()))
    throw InvalidArgument("translation offset has wrong dimension");
  std::vector<Point> vertices(region.vertices().begin(), region.vertices().end());
  for (auto& v : vertices)
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += offset[k];
  return Region(region.dimension(), std::move(vertices),
                std::vector<Edge>(region.edges().begin(), region.edges().end()), region.couplings());
}

namespace {

std::vector<std::size_t> lexicographic_order(const Region& S) {
  std::vector<std::size_t> order(S.vertex_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return S.vertex(i) < S.vertex(j); });
  return order;
}

}  // namespace

EdgeBoundary edge_boundary(const Region& S) {
  EdgeBoundary out{S, {}};
  const int d = S.dimension();
  for (std::size_t i : lexicographic_order(S)) {
    std::vector<Point> outside;
    Point y = S.vertex(i);
    for (int k = 0; k < d; ++k) {
      for (int s : {-1, 1}) {
        y[k] += s;
        if (!S.contains(y)) outside.push_back(y);
        y[k] -= s;
      }
    }
    std::sort(outside.begin(), outside.end());
    for (auto& y_out : outside) out.edges.push_back({S.vertex(i), std::move(y_out), std::nullopt});
  }
  return out;
}

EdgeBoundary edge_boundary(const Region& S, const Region& ambient) {
  if (S.dimension() != ambient.dimension())
    throw InvalidArgument("S and ambient have different dimensions");
  for (const auto& x : S.vertices())
    if (!ambient.contains(x)) throw InvalidArgument("S is not contained in the ambient region");
  EdgeBoundary out{S, {}};
  const auto adj = ambient.adjacency();
  for (std::size_t i : lexicographic_order(S)) {
    const std::size_t ai = *ambient.find(S.vertex(i));
    std::vector<std::pair<Point, std::size_t>> outside;
    for (auto [nb, e] : adj[ai]) {
      if (!S.contains(ambient.vertex(nb))) outside.emplace_back(ambient.vertex(nb), e);
    }
    std::sort(outside.begin(), outside.end());
    for (auto& [y, e] : outside) out.edges.push_back({S.vertex(i), y, e});
  }
  return out;
}

std::vector<Region> candidate_sets(int d, int max_radius, std::size_t vertex_cap) {
  if (max_radius < 0) throw InvalidArgument("max_radius must be >= 0");
  std::vector<Region> family;
  for (int k = 0; k <= max_radius; ++k) family.push_back(make_box(d, k, vertex_cap));
  return family;
}

}  // namespace rclab

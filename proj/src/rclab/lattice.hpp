#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rclab {

using Point = std::vector<int>;

inline constexpr std::size_t kDefaultVertexCap = 1'000'000;

int sup_norm(const Point& x);

struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// A finite subgraph of Z^d. Vertices are integer points; edges are unordered
// index pairs stored with a < b. Couplings, when present, are one positive
// weight per edge.
class Region {
 public:
  Region(int dimension, std::vector<Point> vertices, std::vector<Edge> edges,
         std::optional<std::vector<double>> couplings = std::nullopt);

  int dimension() const noexcept { return dimension_; }
  std::span<const Point> vertices() const noexcept { return vertices_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Point& vertex(std::size_t i) const { return vertices_.at(i); }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  const std::optional<std::vector<double>>& couplings() const noexcept { return couplings_; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::optional<std::size_t> find(const Point& x) const;
  bool contains(const Point& x) const { return find(x).has_value(); }
  std::optional<std::size_t> find_edge(std::size_t x, std::size_t y) const;

  // Index of the point (0,...,0), if present.
  std::optional<std::size_t> origin() const;
  // Index of the point (0,...,0); throws InvalidArgument when absent.
  std::size_t require_origin() const;

  // Smallest L with the region contained in the sup-norm box of radius L.
  int radius() const;

  // Vertices with at least one Z^d nearest neighbour outside the region.
  std::vector<std::size_t> inner_boundary() const;

  // Neighbour lists: (neighbour vertex, edge index).
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency() const;

  bool is_forest() const;

  friend bool operator==(const Region& l, const Region& r) {
    return l.dimension_ == r.dimension_ && l.vertices_ == r.vertices_ &&
           l.edges_ == r.edges_ && l.couplings_ == r.couplings_;
  }

 private:
  int dimension_;
  std::vector<Point> vertices_;
  std::vector<Edge> edges_;
  std::optional<std::vector<double>> couplings_;
  std::map<Point, std::size_t> index_;
};

// Box {lo_0..hi_0} x ... x {lo_{d-1}..hi_{d-1}} with all nearest-neighbour
// edges. Vertices are in lexicographic order; edges sorted by (a, b).
Region make_rectangle(const Point& lo, const Point& hi, std::size_t vertex_cap = kDefaultVertexCap);

// Lambda_n = {-n..n}^d.
Region make_box(int d, int n, std::size_t vertex_cap = kDefaultVertexCap);

// Subgraph of ambient induced by the given points (kept in ambient order).
Region induced_subregion(const Region& ambient, std::span<const Point> points);

Region translate(const Region& region, const Point& offset);

struct BoundaryEdge {
  Point inside;
  Point outside;
  // Index of the edge in the ambient region; empty when the ambient is Z^d.
  std::optional<std::size_t> ambient_edge;
};

struct EdgeBoundary {
  Region inner;
  std::vector<BoundaryEdge> edges;
};

// Edges with exactly one endpoint in S, taken from Z^d adjacency.
EdgeBoundary edge_boundary(const Region& S);
// Edges of ambient with exactly one endpoint in S. S must lie inside ambient.
EdgeBoundary edge_boundary(const Region& S, const Region& ambient);

// {Lambda_0, ..., Lambda_k}.
std::vector<Region> candidate_sets(int d, int max_radius, std::size_t vertex_cap = kDefaultVertexCap);

}  // namespace rclab

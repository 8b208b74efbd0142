#pragma once

// Reference implementations for tests. Deliberately naive and independent of
// the library's enumeration engine: plain bit loops, DFS labelling, direct
// weights with no scaling.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rclab/lattice.hpp"

namespace oracle {

struct Graph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline Graph graph_of(const rclab::Region& r) {
  Graph g;
  g.n = r.vertex_count();
  for (const auto& e : r.edges()) g.edges.emplace_back(e.a, e.b);
  return g;
}

// Component label per vertex for the open edges in `bits`; returns the count.
inline std::size_t label(const Graph& g, std::uint64_t bits, std::vector<int>& lab) {
  std::vector<std::vector<std::size_t>> adj(g.n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!((bits >> e) & 1u)) continue;
    adj[g.edges[e].first].push_back(g.edges[e].second);
    adj[g.edges[e].second].push_back(g.edges[e].first);
  }
  lab.assign(g.n, -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < g.n; ++s) {
    if (lab[s] >= 0) continue;
    lab[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto w : adj[v])
        if (lab[w] < 0) {
          lab[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return static_cast<std::size_t>(next);
}

using Fn = std::function<double(std::uint64_t bits, const std::vector<int>& labels)>;

// Random-cluster expectation of f by summing every configuration.
class Measure {
 public:
  Measure(Graph g, std::vector<double> p, double q) : g_(std::move(g)), p_(std::move(p)), q_(q) {}
  Measure(Graph g, double p, double q) : g_(std::move(g)), p_(g_.edges.size(), p), q_(q) {}

  double weight(std::uint64_t bits) const {
    std::vector<int> lab;
    const auto k = label(g_, bits, lab);
    double w = std::pow(q_, static_cast<double>(k));
    for (std::size_t e = 0; e < g_.edges.size(); ++e) w *= ((bits >> e) & 1u) ? p_[e] : 1.0 - p_[e];
    return w;
  }

  double partition() const {
    double z = 0.0;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << g_.edges.size()); ++b) z += weight(b);
    return z;
  }

  double expect(const Fn& f) const {
    double z = 0.0, s = 0.0;
    std::vector<int> lab;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << g_.edges.size()); ++b) {
      const auto k = label(g_, b, lab);
      double w = std::pow(q_, static_cast<double>(k));
      for (std::size_t e = 0; e < g_.edges.size(); ++e) w *= ((b >> e) & 1u) ? p_[e] : 1.0 - p_[e];
      z += w;
      s += w * f(b, lab);
    }
    return s / z;
  }

  double connect(std::size_t x, std::size_t y) const {
    return expect([&](std::uint64_t, const std::vector<int>& l) { return l[x] == l[y] ? 1.0 : 0.0; });
  }

  const Graph& graph() const { return g_; }

 private:
  Graph g_;
  std::vector<double> p_;
  double q_;
};

// Open probability of a single edge, and of every edge of a tree.
inline double tree_edge(double p, double q) { return p / (p + q * (1.0 - p)); }

// Derivative of mu(A) in a uniform p by central differences of the oracle.
inline double finite_difference(const Graph& g, double p, double q, const Fn& f, double h = 1e-5) {
  return (Measure(g, p + h, q).expect(f) - Measure(g, p - h, q).expect(f)) / (2.0 * h);
}

// Z^d box built point by point, for checking the lattice constructors.
inline std::vector<rclab::Point> box_points(int d, int n) {
  std::vector<rclab::Point> out;
  rclab::Point x(static_cast<std::size_t>(d), -n);
  while (true) {
    out.push_back(x);
    int k = d - 1;
    while (k >= 0 && x[static_cast<std::size_t>(k)] == n) x[static_cast<std::size_t>(k--)] = -n;
    if (k < 0) break;
    ++x[static_cast<std::size_t>(k)];
  }
  return out;
}

}  // namespace oracle

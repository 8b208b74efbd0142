#pragma once

// Exact quantities under the free-boundary random-cluster measure
//
//   mu(omega) = q^{k(omega)} prod_e p_e^{omega_e} (1 - p_e)^{1 - omega_e} / Z
//
// computed by visiting all 2^|E| configurations. Every operation is a thin
// accumulator over enumerate(); accumulators see one ConfigView per
// configuration (bits, open count, cluster count and per-vertex roots).

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rclab/errors.hpp"
#include "rclab/lattice.hpp"
#include "rclab/parallel.hpp"
#include "rclab/union_find.hpp"

namespace rclab {

inline constexpr std::size_t kDefaultEnumerationCap = 26;
// Above this many edges weights are formed in log space relative to an upper
// bound on the largest weight.
inline constexpr std::size_t kLogSpaceThreshold = 20;

struct RCParams {
  double p = 0.5;
  double q = 2.0;
  // Per-edge open probabilities (finite-range couplings); overrides p.
  std::optional<std::vector<double>> edge_p;

  // Throws InvalidArgument on p outside [0,1], q < 1 or a bad override list.
  void validate(std::size_t edge_count) const;
  double edge_probability(std::size_t e) const { return edge_p ? (*edge_p)[e] : p; }
  bool uniform() const { return !edge_p.has_value(); }
};

// Open probabilities p_e = 1 - exp(-beta * J_e) from the region's couplings.
std::vector<double> edge_probabilities_from_couplings(const Region& region, double beta);

// One percolation configuration on at most 64 edges.
class Config {
 public:
  explicit Config(std::size_t edge_count, std::uint64_t bits = 0);

  std::size_t size() const noexcept { return size_; }
  std::uint64_t bits() const noexcept { return bits_; }
  bool open(std::size_t e) const noexcept { return (bits_ >> e) & 1u; }
  std::size_t open_count() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
  std::size_t closed_count() const noexcept { return size_ - open_count(); }

  Config with_open(std::size_t e) const { return Config(size_, bits_ | (std::uint64_t{1} << e)); }
  Config with_closed(std::size_t e) const { return Config(size_, bits_ & ~(std::uint64_t{1} << e)); }

  static Config all_open(std::size_t edge_count);

 private:
  std::size_t size_;
  std::uint64_t bits_;
};

struct ClusterStats {
  std::size_t k = 0;
  std::vector<std::uint32_t> labels;
};

ClusterStats cluster_stats(const Region& region, const Config& config);

// Read-only view of a configuration handed to events and accumulators. Bond
// states come either from a bit mask (exact engine) or a byte array (Monte
// Carlo); labels[v] identifies the cluster of v.
class ConfigView {
 public:
  ConfigView(std::uint64_t bits, std::size_t open, std::size_t clusters, std::span<const std::uint32_t> labels)
      : bits_(bits), bonds_(nullptr), open_(open), clusters_(clusters), labels_(labels) {}
  ConfigView(std::span<const std::uint8_t> bonds, std::size_t open, std::size_t clusters,
             std::span<const std::uint32_t> labels)
      : bits_(0), bonds_(bonds.data()), open_(open), clusters_(clusters), labels_(labels) {}

  bool edge_open(std::size_t e) const noexcept { return bonds_ ? bonds_[e] != 0 : ((bits_ >> e) & 1u) != 0; }
  bool connected(std::size_t x, std::size_t y) const noexcept { return labels_[x] == labels_[y]; }
  std::uint64_t bits() const noexcept { return bits_; }
  std::size_t open_count() const noexcept { return open_; }
  std::size_t clusters() const noexcept { return clusters_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }

 private:
  std::uint64_t bits_;
  const std::uint8_t* bonds_;
  std::size_t open_;
  std::size_t clusters_;
  std::span<const std::uint32_t> labels_;
};

// An event is a predicate on configurations. `increasing` is a declaration;
// checkers that rely on it verify it exhaustively on small regions.
struct Event {
  std::string name;
  std::function<bool(const ConfigView&)> test;
  bool increasing = false;

  bool operator()(const ConfigView& view) const { return test(view); }
};

Event always_event();
Event edge_open_event(std::size_t e);
Event connection_event(std::size_t x, std::size_t y);
Event connection_to_set_event(std::size_t x, std::vector<std::size_t> targets);
Event intersection_event(Event a, Event b);

struct EnumerationOptions {
  std::size_t max_edges = kDefaultEnumerationCap;
  unsigned threads = 0;  // 0: default_threads()
};

void check_enumeration_cap(const Region& region, const EnumerationOptions& opts);

namespace detail {

// Unnormalised weights, possibly scaled by exp(-log_scale).
class WeightTable {
 public:
  WeightTable(const Region& region, const RCParams& params);

  double operator()(std::uint64_t bits, std::size_t open, std::size_t clusters) const;
  double log_scale() const noexcept { return log_scale_; }

 private:
  double log_term(double count, double log_value) const {
    return count == 0.0 ? 0.0 : count * log_value;
  }

  std::size_t edges_;
  bool uniform_;
  bool log_space_;
  double log_scale_ = 0.0;
  double log_q_;
  double log_p_, log_1mp_;
  std::vector<double> q_pow_, p_pow_, closed_pow_;
  std::vector<double> edge_p_, log_edge_p_, log_edge_1mp_;
};

}  // namespace detail

template <class Acc>
struct Enumerated {
  Acc acc;
  // Accumulated weights carry a factor exp(-log_scale).
  double log_scale = 0.0;
};

// Visits every configuration of region once (Gray-code order inside fixed
// chunks) and folds acc.add(view, weight). Chunks are merged by a fixed
// pairwise reduction, so results do not depend on the worker count.
template <class Acc>
Enumerated<Acc> enumerate(const Region& region, const RCParams& params, const Acc& proto,
                          const EnumerationOptions& opts = {}) {
  params.validate(region.edge_count());
  check_enumeration_cap(region, opts);
  const detail::WeightTable weight(region, params);

  const std::size_t n_edges = region.edge_count();
  const std::size_t n_vertices = region.vertex_count();
  const std::uint64_t total = std::uint64_t{1} << n_edges;
  const unsigned chunk_bits = n_edges >= 16 ? 8u : 0u;
  const std::size_t n_chunks = std::size_t{1} << chunk_bits;
  const std::uint64_t chunk_size = total >> chunk_bits;

  std::vector<std::uint32_t> ends_a(n_edges), ends_b(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) {
    ends_a[e] = static_cast<std::uint32_t>(region.edge(e).a);
    ends_b[e] = static_cast<std::uint32_t>(region.edge(e).b);
  }

  std::vector<Acc> partial(n_chunks, proto);
  parallel_for(n_chunks, opts.threads, [&](std::size_t c) {
    Acc& acc = partial[c];
    UnionFind uf(n_vertices);
    std::vector<std::uint32_t> labels(n_vertices);
    const std::uint64_t begin = chunk_size * c;
    const std::uint64_t end = begin + chunk_size;
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::uint64_t bits = i ^ (i >> 1);
      uf.reset();
      for (std::uint64_t rest = bits; rest != 0; rest &= rest - 1) {
        const int e = std::countr_zero(rest);
        uf.unite(ends_a[e], ends_b[e]);
      }
      uf.labels(labels);
      const std::size_t open = static_cast<std::size_t>(std::popcount(bits));
      const std::size_t k = uf.components();
      acc.add(ConfigView(bits, open, k, labels), weight(bits, open, k));
    }
  });

  for (std::size_t stride = 1; stride < n_chunks; stride *= 2)
    for (std::size_t c = 0; c + stride < n_chunks; c += 2 * stride) partial[c].merge(partial[c + stride]);
  return {std::move(partial.front()), weight.log_scale()};
}

// Unnormalised weight q^k prod p_e^{w_e} (1-p_e)^{1-w_e}.
double weight(const Region& region, const Config& config, const RCParams& params);

double partition_function(const Region& region, const RCParams& params, const EnumerationOptions& opts = {});
double log_partition_function(const Region& region, const RCParams& params, const EnumerationOptions& opts = {});

double event_probability(const Region& region, const RCParams& params, const Event& event,
                         const EnumerationOptions& opts = {});
std::vector<double> event_probabilities(const Region& region, const RCParams& params,
                                        std::span<const Event> events, const EnumerationOptions& opts = {});

double connection_probability(const Region& region, const RCParams& params, std::size_t x, std::size_t y,
                              const EnumerationOptions& opts = {});
double connection_probability_to_set(const Region& region, const RCParams& params, std::size_t x,
                                     std::span<const std::size_t> targets, const EnumerationOptions& opts = {});

// mu(source <-> v) for every vertex v. Forests are handled without
// enumeration: on a forest the measure is a product measure with edge
// probability p_e / (p_e + q (1 - p_e)).
std::vector<double> connection_probabilities_from(const Region& region, const RCParams& params,
                                                  std::size_t source, const EnumerationOptions& opts = {});

// d/dp mu(A) = Cov(1_A, o(omega)) / (p (1 - p)) for uniform p in (0,1).
double derivative_event_probability(const Region& region, const RCParams& params, const Event& event,
                                    const EnumerationOptions& opts = {});

// A evaluated on every configuration, indexed by the configuration bits.
class EventTable {
 public:
  EventTable(const Region& region, const Event& event, const EnumerationOptions& opts = {});
  bool operator[](std::uint64_t bits) const { return values_[bits] != 0; }
  std::size_t edge_count() const noexcept { return edges_; }

 private:
  std::size_t edges_;
  std::vector<std::uint8_t> values_;
};

double pivotal_probability(const Region& region, const RCParams& params, std::size_t edge, const Event& event,
                           const EnumerationOptions& opts = {});

// Per-edge statistics needed by the derivative and pivotality checks.
struct EdgeStatistics {
  double probability = 0.0;               // mu(A)
  std::vector<double> open_probability;   // mu(omega_e = 1)
  std::vector<double> given_open;         // mu(A | omega_e = 1)
  std::vector<double> given_closed;       // mu(A | omega_e = 0)
  std::vector<double> raised;             // mu(omega^(e) in A)
  std::vector<double> lowered;            // mu(omega_(e) in A)
  std::vector<double> pivotal;            // mu(e pivotal for A)
};

EdgeStatistics edge_statistics(const Region& region, const RCParams& params, const Event& event,
                               const EnumerationOptions& opts = {});

// Exhaustive check that A(omega) implies A(omega with one more open edge).
bool verify_increasing(const Region& region, const Event& event, const EnumerationOptions& opts = {});

struct GammaRecord {
  std::vector<std::size_t> vertices;  // indices into make_box(d, n)
  double probability = 0.0;
};

// Law of the set of vertices of Lambda_n not connected to the inner boundary
// of Lambda_n. Records are sorted by vertex set.
std::vector<GammaRecord> gamma_distribution(int n, int d, const RCParams& params, const EnumerationOptions& opts = {});

double susceptibility(const Region& region, const RCParams& params, std::size_t origin,
                      const EnumerationOptions& opts = {});

}  // namespace rclab

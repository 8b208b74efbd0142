#include "rclab/exact.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

namespace rclab {

void RCParams::validate(std::size_t edge_count) const {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0,1]");
  if (!(q >= 1.0) || !std::isfinite(q)) throw InvalidArgument("q must satisfy q >= 1");
  if (edge_p) {
    if (edge_p->size() != edge_count)
      throw InvalidArgument("per-edge probability list length must equal the edge count");
    for (double pe : *edge_p)
      if (!(pe >= 0.0 && pe <= 1.0)) throw InvalidArgument("per-edge probabilities must lie in [0,1]");
  }
}

std::vector<double> edge_probabilities_from_couplings(const Region& region, double beta) {
  if (!region.couplings()) throw InvalidArgument("region has no couplings");
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  std::vector<double> out;
  out.reserve(region.edge_count());
  for (double j : *region.couplings()) out.push_back(-std::expm1(-beta * j));
  return out;
}

Config::Config(std::size_t edge_count, std::uint64_t bits) : size_(edge_count), bits_(bits) {
  if (edge_count > 64) throw ResourceError("Config holds at most 64 edges");
  if (edge_count < 64 && (bits >> edge_count) != 0) throw InvalidArgument("config bits exceed edge count");
}

Config Config::all_open(std::size_t edge_count) {
  return Config(edge_count, edge_count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << edge_count) - 1);
}

ClusterStats cluster_stats(const Region& region, const Config& config) {
  if (config.size() != region.edge_count()) throw InvalidArgument("config size does not match region");
  UnionFind uf(region.vertex_count());
  for (std::size_t e = 0; e < region.edge_count(); ++e)
    if (config.open(e))
      uf.unite(static_cast<std::uint32_t>(region.edge(e).a), static_cast<std::uint32_t>(region.edge(e).b));
  ClusterStats stats;
  stats.k = uf.components();
  uf.labels(stats.labels);
  return stats;
}

void check_enumeration_cap(const Region& region, const EnumerationOptions& opts) {
  const std::size_t cap = std::min<std::size_t>(opts.max_edges, 62);
  if (region.edge_count() > cap)
    throw ResourceError("region has " + std::to_string(region.edge_count()) +
                        " edges; exact enumeration cap is " + std::to_string(cap));
}

namespace detail {

WeightTable::WeightTable(const Region& region, const RCParams& params)
    : edges_(region.edge_count()),
      uniform_(params.uniform()),
      log_space_(region.edge_count() > kLogSpaceThreshold),
      log_q_(std::log(params.q)),
      log_p_(std::log(params.p)),
      log_1mp_(std::log1p(-params.p)) {
  const std::size_t n_vertices = region.vertex_count();
  if (!uniform_) {
    edge_p_ = *params.edge_p;
    for (double pe : edge_p_) {
      log_edge_p_.push_back(std::log(pe));
      log_edge_1mp_.push_back(std::log1p(-pe));
    }
  }
  if (log_space_) {
    log_scale_ = static_cast<double>(n_vertices) * log_q_;
    if (uniform_) {
      log_scale_ += static_cast<double>(edges_) * std::max(log_p_, log_1mp_);
    } else {
      for (std::size_t e = 0; e < edges_; ++e) log_scale_ += std::max(log_edge_p_[e], log_edge_1mp_[e]);
    }
    return;
  }
  q_pow_.resize(n_vertices + 1);
  for (std::size_t k = 0; k <= n_vertices; ++k) q_pow_[k] = std::pow(params.q, static_cast<double>(k));
  if (uniform_) {
    p_pow_.resize(edges_ + 1);
    closed_pow_.resize(edges_ + 1);
    for (std::size_t o = 0; o <= edges_; ++o) {
      p_pow_[o] = std::pow(params.p, static_cast<double>(o));
      closed_pow_[o] = std::pow(1.0 - params.p, static_cast<double>(o));
    }
  }
}

double WeightTable::operator()(std::uint64_t bits, std::size_t open, std::size_t clusters) const {
  const std::size_t closed = edges_ - open;
  if (!log_space_) {
    if (uniform_) return q_pow_[clusters] * p_pow_[open] * closed_pow_[closed];
    double w = q_pow_[clusters];
    for (std::size_t e = 0; e < edges_; ++e) w *= ((bits >> e) & 1u) ? edge_p_[e] : 1.0 - edge_p_[e];
    return w;
  }
  double lw = log_term(static_cast<double>(clusters), log_q_) - log_scale_;
  if (uniform_) {
    lw += log_term(static_cast<double>(open), log_p_) + log_term(static_cast<double>(closed), log_1mp_);
  } else {
    for (std::size_t e = 0; e < edges_; ++e) lw += ((bits >> e) & 1u) ? log_edge_p_[e] : log_edge_1mp_[e];
  }
  return std::exp(lw);
}

}  // namespace detail

double weight(const Region& region, const Config& config, const RCParams& params) {
  params.validate(region.edge_count());
  const auto stats = cluster_stats(region, config);
  double w = std::pow(params.q, static_cast<double>(stats.k));
  for (std::size_t e = 0; e < region.edge_count(); ++e) {
    const double pe = params.edge_probability(e);
    w *= config.open(e) ? pe : 1.0 - pe;
  }
  return w;
}

namespace {

struct SumAcc {
  double total = 0.0;
  void add(const ConfigView&, double w) { total += w; }
  void merge(const SumAcc& o) { total += o.total; }
};

struct EventsAcc {
  std::span<const Event> events;
  double total = 0.0;
  std::vector<double> hits;
  void add(const ConfigView& v, double w) {
    total += w;
    for (std::size_t i = 0; i < events.size(); ++i)
      if (events[i](v)) hits[i] += w;
  }
  void merge(const EventsAcc& o) {
    total += o.total;
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += o.hits[i];
  }
};

struct ConnectionAcc {
  std::size_t source = 0;
  double total = 0.0;
  std::vector<double> hits;
  void add(const ConfigView& v, double w) {
    total += w;
    const auto labels = v.labels();
    const auto root = labels[source];
    for (std::size_t x = 0; x < labels.size(); ++x)
      if (labels[x] == root) hits[x] += w;
  }
  void merge(const ConnectionAcc& o) {
    total += o.total;
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += o.hits[i];
  }
};

void require_vertex(const Region& region, std::size_t x) {
  if (x >= region.vertex_count()) throw InvalidArgument("vertex index out of range");
}

}  // namespace

double partition_function(const Region& region, const RCParams& params, const EnumerationOptions& opts) {
  const auto r = enumerate(region, params, SumAcc{}, opts);
  return r.acc.total * std::exp(r.log_scale);
}

double log_partition_function(const Region& region, const RCParams& params, const EnumerationOptions& opts) {
  const auto r = enumerate(region, params, SumAcc{}, opts);
  return std::log(r.acc.total) + r.log_scale;
}

std::vector<double> event_probabilities(const Region& region, const RCParams& params,
                                        std::span<const Event> events, const EnumerationOptions& opts) {
  EventsAcc proto{events, 0.0, std::vector<double>(events.size(), 0.0)};
  const auto r = enumerate(region, params, proto, opts);
  std::vector<double> out(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) out[i] = r.acc.hits[i] / r.acc.total;
  return out;
}

double event_probability(const Region& region, const RCParams& params, const Event& event,
                         const EnumerationOptions& opts) {
  return event_probabilities(region, params, std::span<const Event>(&event, 1), opts).front();
}

std::vector<double> connection_probabilities_from(const Region& region, const RCParams& params,
                                                  std::size_t source, const EnumerationOptions& opts) {
  require_vertex(region, source);
  params.validate(region.edge_count());
  if (region.is_forest()) {
    std::vector<double> out(region.vertex_count(), 0.0);
    const auto adj = region.adjacency();
    out[source] = 1.0;
    std::deque<std::size_t> queue{source};
    std::vector<char> seen(region.vertex_count(), 0);
    seen[source] = 1;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (auto [nb, e] : adj[v]) {
        if (seen[nb]) continue;
        seen[nb] = 1;
        const double pe = params.edge_probability(e);
        const double effective = pe / (pe + params.q * (1.0 - pe));
        out[nb] = out[v] * effective;
        queue.push_back(nb);
      }
    }
    return out;
  }
  ConnectionAcc proto{source, 0.0, std::vector<double>(region.vertex_count(), 0.0)};
  const auto r = enumerate(region, params, proto, opts);
  std::vector<double> out(region.vertex_count());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = r.acc.hits[x] / r.acc.total;
  out[source] = 1.0;
  return out;
}

double connection_probability(const Region& region, const RCParams& params, std::size_t x, std::size_t y,
                              const EnumerationOptions& opts) {
  require_vertex(region, x);
  require_vertex(region, y);
  if (x == y) {
    params.validate(region.edge_count());
    return 1.0;
  }
  return connection_probabilities_from(region, params, x, opts)[y];
}

double connection_probability_to_set(const Region& region, const RCParams& params, std::size_t x,
                                     std::span<const std::size_t> targets, const EnumerationOptions& opts) {
  require_vertex(region, x);
  if (targets.empty()) throw InvalidArgument("target set must be nonempty");
  for (auto t : targets) require_vertex(region, t);
  if (std::find(targets.begin(), targets.end(), x) != targets.end()) {
    params.validate(region.edge_count());
    return 1.0;
  }
  const Event e = connection_to_set_event(x, std::vector<std::size_t>(targets.begin(), targets.end()));
  return event_probability(region, params, e, opts);
}

namespace {

struct DerivativeAcc {
  const Event* event = nullptr;
  double total = 0.0, hit = 0.0, open = 0.0, hit_open = 0.0;
  void add(const ConfigView& v, double w) {
    const double o = static_cast<double>(v.open_count());
    total += w;
    open += w * o;
    if ((*event)(v)) {
      hit += w;
      hit_open += w * o;
    }
  }
  void merge(const DerivativeAcc& x) {
    total += x.total;
    hit += x.hit;
    open += x.open;
    hit_open += x.hit_open;
  }
};

}  // namespace

double derivative_event_probability(const Region& region, const RCParams& params, const Event& event,
                                    const EnumerationOptions& opts) {
  if (!params.uniform()) throw DomainError("derivative in p requires a uniform edge probability");
  if (!(params.p > 0.0 && params.p < 1.0)) throw DomainError("derivative in p requires 0 < p < 1");
  DerivativeAcc proto;
  proto.event = &event;
  const auto r = enumerate(region, params, proto, opts);
  const auto& a = r.acc;
  const double pa = a.hit / a.total;
  const double cov = a.hit_open / a.total - pa * (a.open / a.total);
  return cov / (params.p * (1.0 - params.p));
}

namespace {

struct TabulateAcc {
  const Event* event = nullptr;
  std::uint8_t* out = nullptr;
  void add(const ConfigView& v, double) { out[v.bits()] = (*event)(v) ? 1 : 0; }
  void merge(const TabulateAcc&) {}
};

}  // namespace

EventTable::EventTable(const Region& region, const Event& event, const EnumerationOptions& opts)
    : edges_(region.edge_count()) {
  check_enumeration_cap(region, opts);
  values_.assign(std::size_t{1} << edges_, 0);
  const RCParams neutral{0.5, 1.0, std::nullopt};
  enumerate(region, neutral, TabulateAcc{&event, values_.data()}, opts);
}

namespace {

struct PivotalAcc {
  const EventTable* table = nullptr;
  std::uint64_t mask = 0;
  double total = 0.0, pivotal = 0.0;
  void add(const ConfigView& v, double w) {
    total += w;
    const auto& t = *table;
    if (t[v.bits() | mask] && !t[v.bits() & ~mask]) pivotal += w;
  }
  void merge(const PivotalAcc& o) {
    total += o.total;
    pivotal += o.pivotal;
  }
};

struct EdgeStatsAcc {
  const EventTable* table = nullptr;
  std::size_t edges = 0;
  double total = 0.0, hit = 0.0;
  std::vector<double> open_w, open_hit, closed_hit, raised, lowered, pivotal;

  explicit EdgeStatsAcc(const EventTable* t, std::size_t e)
      : table(t), edges(e), open_w(e), open_hit(e), closed_hit(e), raised(e), lowered(e), pivotal(e) {}

  void add(const ConfigView& v, double w) {
    const auto& t = *table;
    const std::uint64_t bits = v.bits();
    const bool a = t[bits];
    total += w;
    if (a) hit += w;
    for (std::size_t e = 0; e < edges; ++e) {
      const std::uint64_t m = std::uint64_t{1} << e;
      const bool up = t[bits | m];
      const bool down = t[bits & ~m];
      if (bits & m) {
        open_w[e] += w;
        if (a) open_hit[e] += w;
      } else if (a) {
        closed_hit[e] += w;
      }
      if (up) raised[e] += w;
      if (down) lowered[e] += w;
      if (up && !down) pivotal[e] += w;
    }
  }

  void merge(const EdgeStatsAcc& o) {
    total += o.total;
    hit += o.hit;
    for (std::size_t e = 0; e < edges; ++e) {
      open_w[e] += o.open_w[e];
      open_hit[e] += o.open_hit[e];
      closed_hit[e] += o.closed_hit[e];
      raised[e] += o.raised[e];
      lowered[e] += o.lowered[e];
      pivotal[e] += o.pivotal[e];
    }
  }
};

}  // namespace

double pivotal_probability(const Region& region, const RCParams& params, std::size_t edge, const Event& event,
                           const EnumerationOptions& opts) {
  if (edge >= region.edge_count()) throw InvalidArgument("edge index out of range");
  params.validate(region.edge_count());
  const EventTable table(region, event, opts);
  const auto r = enumerate(region, params, PivotalAcc{&table, std::uint64_t{1} << edge}, opts);
  return r.acc.pivotal / r.acc.total;
}

EdgeStatistics edge_statistics(const Region& region, const RCParams& params, const Event& event,
                               const EnumerationOptions& opts) {
  params.validate(region.edge_count());
  const EventTable table(region, event, opts);
  const std::size_t m = region.edge_count();
  const auto r = enumerate(region, params, EdgeStatsAcc(&table, m), opts);
  const auto& a = r.acc;
  EdgeStatistics s;
  s.probability = a.hit / a.total;
  for (std::size_t e = 0; e < m; ++e) {
    const double closed_w = a.total - a.open_w[e];
    s.open_probability.push_back(a.open_w[e] / a.total);
    s.given_open.push_back(a.open_w[e] > 0.0 ? a.open_hit[e] / a.open_w[e]
                                             : std::numeric_limits<double>::quiet_NaN());
    s.given_closed.push_back(closed_w > 0.0 ? a.closed_hit[e] / closed_w
                                            : std::numeric_limits<double>::quiet_NaN());
    s.raised.push_back(a.raised[e] / a.total);
    s.lowered.push_back(a.lowered[e] / a.total);
    s.pivotal.push_back(a.pivotal[e] / a.total);
  }
  return s;
}

bool verify_increasing(const Region& region, const Event& event, const EnumerationOptions& opts) {
  const EventTable table(region, event, opts);
  const std::uint64_t total = std::uint64_t{1} << region.edge_count();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    if (!table[bits]) continue;
    for (std::size_t e = 0; e < region.edge_count(); ++e)
      if (!table[bits | (std::uint64_t{1} << e)]) return false;
  }
  return true;
}

namespace {

struct GammaAcc {
  const std::vector<char>* is_boundary = nullptr;
  std::map<std::uint64_t, double> mass;
  double total = 0.0;
  std::vector<char> touched;

  void add(const ConfigView& v, double w) {
    const auto labels = v.labels();
    touched.assign(labels.size(), 0);
    for (std::size_t x = 0; x < labels.size(); ++x)
      if ((*is_boundary)[x]) touched[labels[x]] = 1;
    std::uint64_t gamma = 0;
    for (std::size_t x = 0; x < labels.size(); ++x)
      if (!touched[labels[x]]) gamma |= std::uint64_t{1} << x;
    mass[gamma] += w;
    total += w;
  }
  void merge(const GammaAcc& o) {
    for (const auto& [k, m] : o.mass) mass[k] += m;
    total += o.total;
  }
};

}  // namespace

std::vector<GammaRecord> gamma_distribution(int n, int d, const RCParams& params, const EnumerationOptions& opts) {
  const Region box = make_box(d, n);
  if (box.vertex_count() > 64) throw ResourceError("gamma distribution supports at most 64 vertices");
  std::vector<char> is_boundary(box.vertex_count(), 0);
  for (auto v : box.inner_boundary()) is_boundary[v] = 1;
  GammaAcc proto;
  proto.is_boundary = &is_boundary;
  const auto r = enumerate(box, params, proto, opts);
  std::vector<GammaRecord> out;
  for (const auto& [mask, m] : r.acc.mass) {
    if (m == 0.0) continue;
    GammaRecord rec;
    for (std::size_t x = 0; x < box.vertex_count(); ++x)
      if ((mask >> x) & 1u) rec.vertices.push_back(x);
    rec.probability = m / r.acc.total;
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(),
            [](const GammaRecord& a, const GammaRecord& b) { return a.vertices < b.vertices; });
  return out;
}

double susceptibility(const Region& region, const RCParams& params, std::size_t origin,
                      const EnumerationOptions& opts) {
  const auto probs = connection_probabilities_from(region, params, origin, opts);
  double chi = 0.0;
  for (double v : probs) chi += v;
  return chi;
}

}  // namespace rclab

#include "rclab/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rclab/parallel.hpp"
#include "rclab/union_find.hpp"

namespace rclab {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

const char* sampler_name(Sampler s) {
  switch (s) {
    case Sampler::heat_bath:
      return "heat_bath";
    case Sampler::swendsen_wang:
      return "swendsen_wang";
    default:
      return "automatic";
  }
}

namespace {

bool integer_q(double q) { return q >= 1.0 && q <= 1e6 && q == std::floor(q); }

std::vector<double> edge_probabilities(const Region& region, const RCParams& params) {
  std::vector<double> pe(region.edge_count());
  for (std::size_t e = 0; e < pe.size(); ++e) pe[e] = params.edge_probability(e);
  return pe;
}

class HeatBath {
 public:
  HeatBath(const Region& region, const RCParams& params)
      : region_(region),
        q_(params.q),
        pe_(edge_probabilities(region, params)),
        adj_(region.adjacency()),
        stamp_(region.vertex_count(), 0) {}

  void sweep(BondConfig& bonds, Rng& rng) {
    for (std::size_t e = 0; e < pe_.size(); ++e) {
      const double pe = pe_[e];
      const double open = connected_off(bonds, e) ? pe : pe / (pe + q_ * (1.0 - pe));
      bonds[e] = rng.uniform() < open ? 1 : 0;
    }
  }

 private:
  // Depth-first search from one endpoint over open edges other than e.
  bool connected_off(const BondConfig& bonds, std::size_t e) {
    const std::size_t from = region_.edge(e).a;
    const std::size_t to = region_.edge(e).b;
    ++current_;
    stack_.clear();
    stack_.push_back(from);
    stamp_[from] = current_;
    while (!stack_.empty()) {
      const std::size_t v = stack_.back();
      stack_.pop_back();
      for (auto [nb, f] : adj_[v]) {
        if (f == e || !bonds[f] || stamp_[nb] == current_) continue;
        if (nb == to) return true;
        stamp_[nb] = current_;
        stack_.push_back(nb);
      }
    }
    return false;
  }

  const Region& region_;
  double q_;
  std::vector<double> pe_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t current_ = 0;
  std::vector<std::size_t> stack_;
};

class SwendsenWang {
 public:
  SwendsenWang(const Region& region, const RCParams& params)
      : region_(region),
        q_(static_cast<int>(params.q)),
        pe_(edge_probabilities(region, params)),
        uf_(region.vertex_count()),
        colour_(region.vertex_count()) {}

  // Leaves the cluster structure of the drawn bonds in uf().
  void sweep(SpinConfig& spins, BondConfig& bonds, Rng& rng) {
    uf_.reset();
    for (std::size_t e = 0; e < pe_.size(); ++e) {
      const auto& ed = region_.edge(e);
      bonds[e] = 0;
      if (spins.labels[ed.a] != spins.labels[ed.b]) continue;
      if (rng.uniform() < pe_[e]) {
        bonds[e] = 1;
        uf_.unite(static_cast<std::uint32_t>(ed.a), static_cast<std::uint32_t>(ed.b));
      }
    }
    std::fill(colour_.begin(), colour_.end(), -1);
    for (std::uint32_t v = 0; v < colour_.size(); ++v) {
      const std::uint32_t r = uf_.find(v);
      if (colour_[r] < 0) colour_[r] = static_cast<int>(rng.below(static_cast<std::uint64_t>(q_)));
      spins.labels[v] = colour_[r];
    }
  }

  UnionFind& uf() { return uf_; }

 private:
  const Region& region_;
  int q_;
  std::vector<double> pe_;
  UnionFind uf_;
  std::vector<int> colour_;
};

void check_sampler_params(const Region& region, const RCParams& params) {
  params.validate(region.edge_count());
}

}  // namespace

void heat_bath_sweep(const Region& region, const RCParams& params, BondConfig& config, Rng& rng) {
  check_sampler_params(region, params);
  if (config.size() != region.edge_count()) throw InvalidArgument("bond configuration size mismatch");
  HeatBath(region, params).sweep(config, rng);
}

BondConfig swendsen_wang_sweep(const Region& region, const RCParams& params, SpinConfig& spins, Rng& rng) {
  check_sampler_params(region, params);
  if (!integer_q(params.q)) throw InvalidArgument("Swendsen-Wang needs an integer q");
  if (spins.q != static_cast<int>(params.q) || spins.labels.size() != region.vertex_count())
    throw InvalidArgument("spin configuration does not match region and q");
  for (int s : spins.labels)
    if (s < 0 || s >= spins.q) throw InvalidArgument("spin label out of range");
  BondConfig bonds(region.edge_count(), 0);
  SwendsenWang(region, params).sweep(spins, bonds, rng);
  return bonds;
}

std::uint64_t effective_burn_in(const McOptions& opts) {
  return opts.burn_in > 0 ? opts.burn_in : std::max<std::uint64_t>(1000, opts.n_sweeps / 10);
}

Sampler resolve_sampler(Sampler requested, double q) {
  if (requested == Sampler::swendsen_wang && !integer_q(q))
    throw InvalidArgument("Swendsen-Wang needs an integer q");
  if (requested != Sampler::automatic) return requested;
  return integer_q(q) ? Sampler::swendsen_wang : Sampler::heat_bath;
}

namespace {

struct ChainSeries {
  std::vector<std::vector<double>> batch_means;  // [event][batch]
};

ChainSeries run_chain(const Region& region, const RCParams& params, std::span<const Event> events,
                      const McOptions& opts, std::uint64_t stream) {
  check_sampler_params(region, params);
  const Sampler sampler = resolve_sampler(opts.sampler, params.q);
  const std::uint64_t burn = effective_burn_in(opts);
  if (opts.n_sweeps <= burn) throw InvalidArgument("n_sweeps must exceed the burn-in");
  const std::uint64_t measured = opts.n_sweeps - burn;
  if (measured < kBatchCount) throw InvalidArgument("too few measurement sweeps for batch means");
  const std::uint64_t batch = measured / kBatchCount;
  const std::uint64_t skip = burn + (measured - batch * kBatchCount);

  Rng rng(opts.seed, stream);
  BondConfig bonds(region.edge_count(), 0);
  std::vector<std::uint32_t> labels(region.vertex_count());
  ChainSeries out{std::vector<std::vector<double>>(events.size(), std::vector<double>(kBatchCount, 0.0))};
  std::vector<std::uint64_t> hits(events.size(), 0);

  auto measure = [&](UnionFind& uf, std::uint64_t t) {
    uf.labels(labels);
    const std::size_t open = static_cast<std::size_t>(std::count(bonds.begin(), bonds.end(), 1));
    const ConfigView view(bonds, open, uf.components(), labels);
    for (std::size_t i = 0; i < events.size(); ++i)
      if (events[i](view)) ++hits[i];
    const std::uint64_t index = t - skip;
    if ((index + 1) % batch == 0) {
      const std::size_t b = static_cast<std::size_t>(index / batch);
      for (std::size_t i = 0; i < events.size(); ++i) {
        out.batch_means[i][b] = static_cast<double>(hits[i]) / static_cast<double>(batch);
        hits[i] = 0;
      }
    }
  };

  if (sampler == Sampler::swendsen_wang) {
    SwendsenWang sw(region, params);
    SpinConfig spins{static_cast<int>(params.q), std::vector<int>(region.vertex_count(), 0)};
    for (std::uint64_t t = 0; t < opts.n_sweeps; ++t) {
      sw.sweep(spins, bonds, rng);
      if (t >= skip) measure(sw.uf(), t);
    }
  } else {
    HeatBath hb(region, params);
    UnionFind uf(region.vertex_count());
    for (std::uint64_t t = 0; t < opts.n_sweeps; ++t) {
      hb.sweep(bonds, rng);
      if (t < skip) continue;
      uf.reset();
      for (std::size_t e = 0; e < bonds.size(); ++e)
        if (bonds[e])
          uf.unite(static_cast<std::uint32_t>(region.edge(e).a), static_cast<std::uint32_t>(region.edge(e).b));
      measure(uf, t);
    }
  }
  return out;
}

McEstimate summarize(std::span<const double> batches, const McOptions& opts, Sampler sampler) {
  const double n = static_cast<double>(batches.size());
  const double mean = std::accumulate(batches.begin(), batches.end(), 0.0) / n;
  double ss = 0.0;
  for (double b : batches) ss += (b - mean) * (b - mean);
  McEstimate est;
  est.mean = mean;
  est.stderr = std::sqrt(ss / ((n - 1.0) * n));
  est.n_sweeps = opts.n_sweeps;
  est.burn_in = effective_burn_in(opts);
  est.seed = opts.seed;
  est.sampler = sampler;
  return est;
}

std::vector<ChainSeries> run_chains(const Region& region, const RCParams& params, std::span<const Event> events,
                                    const McOptions& opts) {
  const unsigned chains = std::max(1u, opts.chains);
  std::vector<ChainSeries> series(chains);
  parallel_for(chains, opts.threads,
               [&](std::size_t c) { series[c] = run_chain(region, params, events, opts, c); });
  return series;
}

}  // namespace

McEstimate combine_estimates(std::span<const McEstimate> chains) {
  if (chains.empty()) throw InvalidArgument("no estimates to combine");
  if (chains.size() == 1) return chains.front();
  McEstimate out = chains.front();
  out.chains = static_cast<unsigned>(chains.size());
  const bool exact = std::any_of(chains.begin(), chains.end(), [](const McEstimate& e) { return e.stderr == 0.0; });
  double sw = 0.0, swm = 0.0;
  for (const auto& e : chains) {
    if (exact && e.stderr != 0.0) continue;
    const double w = exact ? 1.0 : 1.0 / (e.stderr * e.stderr);
    sw += w;
    swm += w * e.mean;
  }
  out.mean = swm / sw;
  out.stderr = exact ? 0.0 : 1.0 / std::sqrt(sw);
  return out;
}

std::vector<McEstimate> estimate_events(const Region& region, const RCParams& params, std::span<const Event> events,
                                        const McOptions& opts) {
  const Sampler sampler = resolve_sampler(opts.sampler, params.q);
  const auto series = run_chains(region, params, events, opts);
  std::vector<McEstimate> out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    std::vector<McEstimate> per_chain;
    for (const auto& s : series) per_chain.push_back(summarize(s.batch_means[i], opts, sampler));
    out.push_back(combine_estimates(per_chain));
  }
  return out;
}

McEstimate estimate_connection(const Region& region, const RCParams& params, std::size_t x, std::size_t y,
                               const McOptions& opts) {
  if (x >= region.vertex_count() || y >= region.vertex_count())
    throw InvalidArgument("vertex index out of range");
  const Event e = connection_event(x, y);
  return estimate_events(region, params, std::span<const Event>(&e, 1), opts).front();
}

McEstimate estimate_theta(int d, double q, double p, int n, const McOptions& opts) {
  const Region box = make_box(d, n);
  const Event e = connection_to_set_event(box.require_origin(), box.inner_boundary());
  return estimate_events(box, RCParams{p, q, std::nullopt}, std::span<const Event>(&e, 1), opts).front();
}

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0, slope_stderr = 0.0;
};

LineFit weighted_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += w[i] * r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  f.slope_stderr = 1.0 / std::sqrt(sxx);
  return f;
}

}  // namespace

DecayFit fit_decay(int d, double q, double p, int box_radius, std::span<const int> distances,
                   const McOptions& opts) {
  if (distances.empty()) throw InvalidArgument("no distances given");
  for (int k : distances)
    if (k < 1 || k > box_radius) throw InvalidArgument("distances must lie in [1, box radius]");
  const Region box = make_box(d, box_radius);
  const std::size_t origin = box.require_origin();
  const RCParams params{p, q, std::nullopt};
  const Sampler sampler = resolve_sampler(opts.sampler, q);

  std::vector<Event> events;
  for (int k : distances) {
    Point x(static_cast<std::size_t>(d), 0);
    x[0] = k;
    events.push_back(connection_event(origin, *box.find(x)));
  }
  // Batches of all chains are pooled so the jackknife sees every batch.
  const auto series = run_chains(box, params, events, opts);
  std::vector<std::vector<double>> pooled(events.size());
  for (const auto& s : series)
    for (std::size_t i = 0; i < events.size(); ++i)
      pooled[i].insert(pooled[i].end(), s.batch_means[i].begin(), s.batch_means[i].end());

  DecayFit fit;
  fit.p = p;
  fit.q = q;
  fit.box_radius = box_radius;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const McEstimate est = summarize(pooled[i], opts, sampler);
    DecayPoint pt{distances[i], est.mean, est.stderr, est.mean == 0.0};
    if (!pt.censored) used.push_back(i);
    fit.points.push_back(pt);
  }
  if (used.empty()) {
    fit.status = "all estimates zero; no fit";
    return fit;
  }
  std::vector<double> xs, ys, ws;
  bool zero_error = false;
  for (auto i : used) {
    const auto& pt = fit.points[i];
    xs.push_back(pt.distance);
    ys.push_back(std::log(pt.estimate));
    const double sigma = pt.stderr / pt.estimate;
    zero_error = zero_error || sigma == 0.0;
    ws.push_back(sigma > 0.0 ? 1.0 / (sigma * sigma) : 0.0);
  }
  if (zero_error) std::fill(ws.begin(), ws.end(), 1.0);
  const bool distinct = std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) != xs.end();
  if (used.size() < 2 || !distinct) {
    fit.status = "fewer than two uncensored distances; no fit";
    return fit;
  }
  const LineFit line = weighted_line(xs, ys, ws);
  fit.fitted = true;
  fit.rate = -line.slope;
  fit.intercept = line.intercept;
  fit.r_squared = line.r_squared;

  // Leave-one-batch-out jackknife of the rate with the weights held fixed.
  const std::size_t n_batches = pooled.front().size();
  std::vector<double> rates;
  for (std::size_t b = 0; b < n_batches; ++b) {
    std::vector<double> yj;
    for (auto i : used) {
      const double total = std::accumulate(pooled[i].begin(), pooled[i].end(), 0.0);
      const double loo = (total - pooled[i][b]) / static_cast<double>(n_batches - 1);
      if (!(loo > 0.0)) break;
      yj.push_back(std::log(loo));
    }
    if (yj.size() != used.size()) {
      rates.clear();
      break;
    }
    rates.push_back(-weighted_line(xs, yj, ws).slope);
  }
  if (!rates.empty()) {
    const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
    double ss = 0.0;
    for (double r : rates) ss += (r - mean) * (r - mean);
    fit.rate_stderr = std::sqrt(ss * static_cast<double>(rates.size() - 1) / static_cast<double>(rates.size()));
    fit.status = "ok (jackknife stderr)";
  } else {
    fit.rate_stderr = line.slope_stderr;
    fit.status = "ok (weighted least-squares stderr)";
  }
  return fit;
}

}  // namespace rclab

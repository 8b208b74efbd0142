#pragma once

// Markov chain samplers for the random-cluster measure on regions beyond the
// enumeration cap.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rclab/exact.hpp"
#include "rclab/lattice.hpp"
#include "rclab/sharpness.hpp"

namespace rclab {

// 64-bit Mersenne twister seeded through seed_seq{seed, stream}; uniform()
// maps the top 53 bits to [0,1) so streams are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::mt19937_64 engine_;
};

using BondConfig = std::vector<std::uint8_t>;

struct SpinConfig {
  int q = 2;
  std::vector<int> labels;  // values in [0, q)
};

enum class Sampler { automatic, heat_bath, swendsen_wang };

const char* sampler_name(Sampler s);

// Single-edge heat bath in edge order: w_e = 1 with probability p_e when the
// endpoints are connected off e, otherwise p_e / (p_e + q (1 - p_e)).
void heat_bath_sweep(const Region& region, const RCParams& params, BondConfig& config, Rng& rng);

// Edwards-Sokal update for integer q >= 1: bonds between equal spins open
// with probability p_e, then every cluster gets a uniform new colour. Returns
// the bond configuration drawn in this sweep.
BondConfig swendsen_wang_sweep(const Region& region, const RCParams& params, SpinConfig& spins, Rng& rng);

struct McOptions {
  std::uint64_t n_sweeps = 100'000;  // including burn-in
  std::uint64_t seed = 1;
  Sampler sampler = Sampler::automatic;
  std::uint64_t burn_in = 0;  // 0: max(1000, n_sweeps / 10)
  unsigned chains = 1;
  unsigned threads = 0;
};

inline constexpr std::size_t kBatchCount = 32;

struct McEstimate {
  double mean = 0.0;
  double stderr = 0.0;  // batch means
  std::uint64_t n_sweeps = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;
  unsigned chains = 1;
  Sampler sampler = Sampler::automatic;
};

std::uint64_t effective_burn_in(const McOptions& opts);
Sampler resolve_sampler(Sampler requested, double q);

// One chain (or opts.chains independent chains combined by inverse-variance
// weighting) measuring every event after each post-burn-in sweep.
std::vector<McEstimate> estimate_events(const Region& region, const RCParams& params, std::span<const Event> events,
                                        const McOptions& opts);

McEstimate estimate_connection(const Region& region, const RCParams& params, std::size_t x, std::size_t y,
                               const McOptions& opts);

// mu_{Lambda_n}(0 <-> dLambda_n).
McEstimate estimate_theta(int d, double q, double p, int n, const McOptions& opts);

// Weighted least-squares fit of log mu(0 <-> k e_1) against k on Lambda_m.
// Points with zero hits are censored and left out of the fit.
DecayFit fit_decay(int d, double q, double p, int box_radius, std::span<const int> distances,
                   const McOptions& opts);

McEstimate combine_estimates(std::span<const McEstimate> chains);

}  // namespace rclab

#include "rclab/rclab.h"

#include <algorithm>
#include <atomic>
#include <optional>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "rclab/errors.hpp"
#include "rclab/exact.hpp"
#include "rclab/ineq.hpp"
#include "rclab/lattice.hpp"
#include "rclab/mc.hpp"
#include "rclab/parallel.hpp"
#include "rclab/serialize.hpp"
#include "rclab/sharpness.hpp"

struct rclab_region {
  rclab::Region region;
};

struct rclab_event {
  rclab::Event event;
  // Largest vertex / edge index the event reads, if any.
  std::optional<std::size_t> max_vertex;
  std::optional<std::size_t> max_edge;
};

namespace {

thread_local std::string last_error;
std::atomic<std::size_t> enumeration_cap{rclab::kDefaultEnumerationCap};

rclab::EnumerationOptions enum_opts() {
  rclab::EnumerationOptions o;
  o.max_edges = enumeration_cap.load();
  return o;
}

template <class F>
rclab_status guard(F&& f) noexcept {
  try {
    last_error.clear();
    f();
    return RCLAB_OK;
  } catch (const rclab::InvalidArgument& e) {
    last_error = e.what();
    return RCLAB_ERR_INVALID_ARGUMENT;
  } catch (const rclab::DomainError& e) {
    last_error = e.what();
    return RCLAB_ERR_DOMAIN;
  } catch (const rclab::ResourceError& e) {
    last_error = e.what();
    return RCLAB_ERR_RESOURCE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RCLAB_ERR_RESOURCE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RCLAB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return RCLAB_ERR_INTERNAL;
  }
}

template <class T>
const T& deref(const T* p, const char* what) {
  if (!p) throw rclab::InvalidArgument(std::string(what) + " is NULL");
  return *p;
}

template <class T>
void require_out(T* p) {
  if (!p) throw rclab::InvalidArgument("output pointer is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const rclab::Json& j) {
  if (out) *out = dup_string(j.dump());
}

rclab::RCParams to_params(const rclab_params* p) {
  const auto& in = deref(p, "params");
  rclab::RCParams out{in.p, in.q, std::nullopt};
  if (in.edge_p) out.edge_p.emplace(in.edge_p, in.edge_p + in.edge_p_len);
  return out;
}

rclab::Point to_point(const int* coords, int d) {
  if (!coords) throw rclab::InvalidArgument("coordinates are NULL");
  return rclab::Point(coords, coords + d);
}

rclab_region* wrap(rclab::Region r) { return new rclab_region{std::move(r)}; }
rclab_event* wrap(rclab::Event e, std::optional<std::size_t> v = std::nullopt,
                  std::optional<std::size_t> ed = std::nullopt) {
  return new rclab_event{std::move(e), v, ed};
}

std::optional<std::size_t> max_of(std::optional<std::size_t> a, std::optional<std::size_t> b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}

const rclab::Region& R(const rclab_region* r) { return deref(r, "region").region; }

const rclab::Event& E(const rclab_event* e, const rclab::Region& region) {
  const auto& ev = deref(e, "event");
  if (ev.max_vertex && *ev.max_vertex >= region.vertex_count())
    throw rclab::InvalidArgument("event refers to a vertex outside the region");
  if (ev.max_edge && *ev.max_edge >= region.edge_count())
    throw rclab::InvalidArgument("event refers to an edge outside the region");
  return ev.event;
}

rclab::McOptions to_mc(const rclab_mc_options* o) {
  const auto& in = deref(o, "options");
  rclab::McOptions out;
  if (in.n_sweeps) out.n_sweeps = in.n_sweeps;
  out.seed = in.seed;
  switch (in.sampler) {
    case RCLAB_SAMPLER_AUTO:
      out.sampler = rclab::Sampler::automatic;
      break;
    case RCLAB_SAMPLER_HEAT_BATH:
      out.sampler = rclab::Sampler::heat_bath;
      break;
    case RCLAB_SAMPLER_SWENDSEN_WANG:
      out.sampler = rclab::Sampler::swendsen_wang;
      break;
    default:
      throw rclab::InvalidArgument("unknown sampler");
  }
  out.burn_in = in.burn_in;
  out.chains = in.chains ? in.chains : 1;
  return out;
}

void report(const rclab::CheckReport& r, int* holds, char** json_out) {
  if (holds) *holds = r.holds ? 1 : 0;
  emit(json_out, rclab::to_json(r));
}

}  // namespace

extern "C" {

const char* rclab_version(void) { return "0.1.0"; }
const char* rclab_last_error(void) { return last_error.c_str(); }
void rclab_string_free(char* s) { std::free(s); }

void rclab_set_threads(unsigned n) { rclab::set_default_threads(n); }
unsigned rclab_threads(void) { return rclab::default_threads(); }

rclab_status rclab_set_enumeration_cap(size_t max_edges) {
  return guard([&] {
    if (max_edges > 62) throw rclab::InvalidArgument("enumeration cap must be <= 62");
    enumeration_cap.store(max_edges);
  });
}

size_t rclab_enumeration_cap(void) { return enumeration_cap.load(); }

rclab_status rclab_region_box(int d, int n, rclab_region** out) {
  return guard([&] {
    require_out(out);
    *out = wrap(rclab::make_box(d, n));
  });
}

rclab_status rclab_region_rect(int d, const int* lo, const int* hi, rclab_region** out) {
  return guard([&] {
    require_out(out);
    if (d < 1) throw rclab::InvalidArgument("dimension must be >= 1");
    *out = wrap(rclab::make_rectangle(to_point(lo, d), to_point(hi, d)));
  });
}

rclab_status rclab_region_induced(const rclab_region* ambient, const int* coords, size_t count, rclab_region** out) {
  return guard([&] {
    require_out(out);
    const auto& amb = R(ambient);
    if (count > 0 && !coords) throw rclab::InvalidArgument("coordinates are NULL");
    std::vector<rclab::Point> pts;
    for (size_t i = 0; i < count; ++i) pts.push_back(to_point(coords + i * amb.dimension(), amb.dimension()));
    *out = wrap(rclab::induced_subregion(amb, pts));
  });
}

rclab_status rclab_region_translate(const rclab_region* region, const int* offset, rclab_region** out) {
  return guard([&] {
    require_out(out);
    const auto& r = R(region);
    *out = wrap(rclab::translate(r, to_point(offset, r.dimension())));
  });
}

rclab_status rclab_region_from_json(const char* json, rclab_region** out) {
  return guard([&] {
    require_out(out);
    if (!json) throw rclab::InvalidArgument("json is NULL");
    *out = wrap(rclab::region_from_string(json));
  });
}

rclab_status rclab_region_to_json(const rclab_region* region, char** out) {
  return guard([&] {
    require_out(out);
    *out = dup_string(rclab::region_to_string(R(region)));
  });
}

rclab_status rclab_region_hash(const rclab_region* region, char** out) {
  return guard([&] {
    require_out(out);
    *out = dup_string(rclab::region_hash(R(region)));
  });
}

void rclab_region_free(rclab_region* region) { delete region; }

int rclab_region_dimension(const rclab_region* region) { return region ? region->region.dimension() : 0; }
size_t rclab_region_vertex_count(const rclab_region* region) { return region ? region->region.vertex_count() : 0; }
size_t rclab_region_edge_count(const rclab_region* region) { return region ? region->region.edge_count() : 0; }

rclab_status rclab_region_vertex(const rclab_region* region, size_t index, int* coords_out) {
  return guard([&] {
    require_out(coords_out);
    const auto& r = R(region);
    if (index >= r.vertex_count()) throw rclab::InvalidArgument("vertex index out of range");
    const auto& v = r.vertex(index);
    std::copy(v.begin(), v.end(), coords_out);
  });
}

rclab_status rclab_region_find(const rclab_region* region, const int* coords, size_t* index_out) {
  return guard([&] {
    require_out(index_out);
    const auto& r = R(region);
    const auto i = r.find(to_point(coords, r.dimension()));
    if (!i) throw rclab::InvalidArgument("point is not a vertex of the region");
    *index_out = *i;
  });
}

rclab_status rclab_region_inner_boundary(const rclab_region* region, size_t* out, size_t cap, size_t* count) {
  return guard([&] {
    require_out(count);
    const auto b = R(region).inner_boundary();
    *count = b.size();
    if (out)
      for (size_t i = 0; i < b.size() && i < cap; ++i) out[i] = b[i];
  });
}

rclab_status rclab_edge_boundary(const rclab_region* S, const rclab_region* ambient, char** json_out) {
  return guard([&] {
    require_out(json_out);
    const auto b = ambient ? rclab::edge_boundary(R(S), R(ambient)) : rclab::edge_boundary(R(S));
    emit(json_out, rclab::to_json(b));
  });
}

rclab_status rclab_candidate_sets(int d, int max_radius, char** json_out) {
  return guard([&] {
    require_out(json_out);
    rclab::Json j = rclab::Json::array();
    for (const auto& r : rclab::candidate_sets(d, max_radius)) j.push_back(rclab::to_json(r));
    emit(json_out, j);
  });
}

rclab_status rclab_event_always(rclab_event** out) {
  return guard([&] {
    require_out(out);
    *out = wrap(rclab::always_event());
  });
}

rclab_status rclab_event_edge_open(size_t edge, rclab_event** out) {
  return guard([&] {
    require_out(out);
    *out = wrap(rclab::edge_open_event(edge), std::nullopt, edge);
  });
}

rclab_status rclab_event_connect(size_t x, size_t y, rclab_event** out) {
  return guard([&] {
    require_out(out);
    *out = wrap(rclab::connection_event(x, y), std::max(x, y));
  });
}

rclab_status rclab_event_connect_set(size_t x, const size_t* targets, size_t count, rclab_event** out) {
  return guard([&] {
    require_out(out);
    if (count == 0 || !targets) throw rclab::InvalidArgument("target set must be nonempty");
    const std::vector<std::size_t> t(targets, targets + count);
    *out = wrap(rclab::connection_to_set_event(x, t), std::max(x, *std::max_element(t.begin(), t.end())));
  });
}

rclab_status rclab_event_and(const rclab_event* a, const rclab_event* b, rclab_event** out) {
  return guard([&] {
    require_out(out);
    const auto& ea = deref(a, "event");
    const auto& eb = deref(b, "event");
    *out = wrap(rclab::intersection_event(ea.event, eb.event), max_of(ea.max_vertex, eb.max_vertex),
                max_of(ea.max_edge, eb.max_edge));
  });
}

void rclab_event_free(rclab_event* event) { delete event; }

rclab_status rclab_weight(const rclab_region* region, const rclab_params* params, uint64_t config_bits, double* out) {
  return guard([&] {
    require_out(out);
    const auto& r = R(region);
    *out = rclab::weight(r, rclab::Config(r.edge_count(), config_bits), to_params(params));
  });
}

rclab_status rclab_partition_function(const rclab_region* region, const rclab_params* params, double* out) {
  return guard([&] {
    require_out(out);
    *out = rclab::partition_function(R(region), to_params(params), enum_opts());
  });
}

rclab_status rclab_log_partition_function(const rclab_region* region, const rclab_params* params, double* out) {
  return guard([&] {
    require_out(out);
    *out = rclab::log_partition_function(R(region), to_params(params), enum_opts());
  });
}

rclab_status rclab_event_probability(const rclab_region* region, const rclab_params* params,
                                     const rclab_event* event, double* out) {
  return guard([&] {
    require_out(out);
    *out = rclab::event_probability(R(region), to_params(params), E(event, R(region)), enum_opts());
  });
}

rclab_status rclab_connection_probability(const rclab_region* region, const rclab_params* params, size_t x, size_t y,
                                          double* out) {
  return guard([&] {
    require_out(out);
    *out = rclab::connection_probability(R(region), to_params(params), x, y, enum_opts());
  });
}

rclab_status rclab_connection_probability_to_set(const rclab_region* region, const rclab_params* params, size_t x,
                                                 const size_t* targets, size_t count, double* out) {
  return guard([&] {
    require_out(out);
    if (count > 0 && !targets) throw rclab::InvalidArgument("targets are NULL");
    const std::vector<std::size_t> t(targets, targets + count);
    *out = rclab::connection_probability_to_set(R(region), to_params(params), x, t, enum_opts());
  });
}

rclab_status rclab_derivative_event_probability(const rclab_region* region, const rclab_params* params,
                                                const rclab_event* event, double* out) {
  return guard([&] {
    require_out(out);
    *out = rclab::derivative_event_probability(R(region), to_params(params), E(event, R(region)), enum_opts());
  });
}

rclab_status rclab_pivotal_probability(const rclab_region* region, const rclab_params* params, size_t edge,
                                       const rclab_event* event, double* out) {
  return guard([&] {
    require_out(out);
    *out = rclab::pivotal_probability(R(region), to_params(params), edge, E(event, R(region)), enum_opts());
  });
}

rclab_status rclab_susceptibility(const rclab_region* region, const rclab_params* params, size_t origin,
                                  double* out) {
  return guard([&] {
    require_out(out);
    *out = rclab::susceptibility(R(region), to_params(params), origin, enum_opts());
  });
}

rclab_status rclab_gamma_distribution(int d, int n, const rclab_params* params, char** json_out) {
  return guard([&] {
    require_out(json_out);
    const auto g = rclab::gamma_distribution(n, d, to_params(params), enum_opts());
    emit(json_out, rclab::to_json(g, rclab::make_box(d, n)));
  });
}

rclab_status rclab_phi(const rclab_region* S, const rclab_params* params, const double* boundary_p,
                       size_t boundary_len, double* value, char** json_out) {
  return guard([&] {
    if (boundary_len > 0 && !boundary_p) throw rclab::InvalidArgument("boundary probabilities are NULL");
    const std::vector<double> bp(boundary_p, boundary_p + boundary_len);
    const auto res = rclab::phi(R(S), to_params(params), bp, enum_opts());
    if (value) *value = res.value;
    emit(json_out, rclab::to_json(res));
  });
}

rclab_status rclab_bracket_ptilde(int d, double q, const rclab_region* const* family, size_t count, double tol,
                                  double upper, const char* family_name, double* lower, char** json_out) {
  return guard([&] {
    if (count > 0 && !family) throw rclab::InvalidArgument("family is NULL");
    std::vector<rclab::Region> fam;
    for (size_t i = 0; i < count; ++i) fam.push_back(R(family[i]));
    const auto est = rclab::bracket_ptilde(d, q, fam, tol, upper >= 0.0 ? std::optional<double>(upper) : std::nullopt,
                                           family_name ? family_name : "", enum_opts());
    if (lower) *lower = est.lower;
    emit(json_out, rclab::to_json(est));
  });
}

rclab_status rclab_decay_upper_bound(const rclab_region* S, const rclab_params* params, const int* z, double* bound,
                                     char** json_out) {
  return guard([&] {
    const auto& s = R(S);
    const auto b = rclab::decay_upper_bound(s, to_params(params), to_point(z, s.dimension()), enum_opts());
    if (bound) *bound = b.bound;
    emit(json_out, rclab::to_json(b));
  });
}

rclab_status rclab_theta_lower_bound(double p, double lower, double* out) {
  return guard([&] {
    require_out(out);
    *out = rclab::theta_lower_bound(p, lower);
  });
}

rclab_status rclab_check_simon(const rclab_region* ambient, const rclab_region* S, const int* origin, const int* z,
                               const rclab_params* params, int* holds, char** json_out) {
  return guard([&] {
    const auto& amb = R(ambient);
    report(rclab::check_simon(amb, R(S), to_point(origin, amb.dimension()), to_point(z, amb.dimension()),
                              to_params(params), enum_opts()),
           holds, json_out);
  });
}

rclab_status rclab_check_tanh_bound(double p, int* holds, char** json_out) {
  return guard([&] { report(rclab::check_tanh_bound(p), holds, json_out); });
}

rclab_status rclab_check_derivative_identity(const rclab_region* region, const rclab_params* params,
                                             const rclab_event* event, int* holds, char** json_out) {
  return guard([&] {
    report(rclab::check_derivative_identity(R(region), to_params(params), E(event, R(region)), enum_opts()), holds, json_out);
  });
}

rclab_status rclab_check_pivotal_lower_chain(const rclab_region* region, const rclab_params* params,
                                             const rclab_event* event, int* holds, char** json_out) {
  return guard([&] {
    report(rclab::check_pivotal_lower_chain(R(region), to_params(params), E(event, R(region)), enum_opts()), holds, json_out);
  });
}

rclab_status rclab_check_differential_inequality(int d, int n, double q, const double* p_grid, size_t count,
                                                 double bracket_lower, int* all_hold, char** json_out) {
  return guard([&] {
    if (count > 0 && !p_grid) throw rclab::InvalidArgument("p grid is NULL");
    const std::vector<double> grid(p_grid, p_grid + count);
    const auto reports = rclab::check_differential_inequality(
        n, d, q, grid, bracket_lower >= 0.0 ? std::optional<double>(bracket_lower) : std::nullopt, enum_opts());
    rclab::Json j = rclab::Json::array();
    bool ok = true;
    for (const auto& r : reports) {
      ok = ok && r.holds;
      j.push_back(rclab::to_json(r));
    }
    if (all_hold) *all_hold = ok ? 1 : 0;
    emit(json_out, j);
  });
}

rclab_status rclab_check_markov_factorization(int d, int n, const rclab_params* params, const rclab_region* S,
                                              const int* x, const int* y, int* holds, char** json_out) {
  return guard([&] {
    report(rclab::check_markov_factorization(n, d, to_params(params), R(S), to_point(x, d), to_point(y, d),
                                             enum_opts()),
           holds, json_out);
  });
}

rclab_status rclab_check_fkg(const rclab_region* region, const rclab_params* params, const rclab_event* a,
                             const rclab_event* b, int* holds, char** json_out) {
  return guard([&] {
    report(rclab::check_fkg(R(region), to_params(params), E(a, R(region)), E(b, R(region)), enum_opts()), holds, json_out);
  });
}

rclab_status rclab_mc_estimate_event(const rclab_region* region, const rclab_params* params, const rclab_event* event,
                                     const rclab_mc_options* options, double* mean, double* stderr_out,
                                     char** json_out) {
  return guard([&] {
    const auto& ev = E(event, R(region));
    const auto est =
        rclab::estimate_events(R(region), to_params(params), std::span<const rclab::Event>(&ev, 1), to_mc(options))
            .front();
    if (mean) *mean = est.mean;
    if (stderr_out) *stderr_out = est.stderr;
    emit(json_out, rclab::to_json(est));
  });
}

rclab_status rclab_mc_estimate_connection(const rclab_region* region, const rclab_params* params, size_t x, size_t y,
                                          const rclab_mc_options* options, char** json_out) {
  return guard([&] {
    require_out(json_out);
    emit(json_out, rclab::to_json(rclab::estimate_connection(R(region), to_params(params), x, y, to_mc(options))));
  });
}

rclab_status rclab_mc_estimate_theta(int d, double q, double p, int n, const rclab_mc_options* options,
                                     char** json_out) {
  return guard([&] {
    require_out(json_out);
    emit(json_out, rclab::to_json(rclab::estimate_theta(d, q, p, n, to_mc(options))));
  });
}

rclab_status rclab_mc_fit_decay(int d, double q, double p, int box_radius, const int* distances, size_t count,
                                const rclab_mc_options* options, char** json_out) {
  return guard([&] {
    require_out(json_out);
    if (count > 0 && !distances) throw rclab::InvalidArgument("distances are NULL");
    const std::vector<int> dist(distances, distances + count);
    emit(json_out, rclab::to_json(rclab::fit_decay(d, q, p, box_radius, dist, to_mc(options))));
  });
}

}  // extern "C"

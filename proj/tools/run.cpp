#include "run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "handles.hpp"

namespace rclab_cli {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string coord_text(const std::vector<int>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file \"" + path + "\"");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Region handle plus where its descriptor placed it.
struct Resolved {
  RegionPtr region;
  std::string descriptor;
  std::vector<int> offset;
  int d = 0;
};

int region_dim(const rclab_region* r) { return rclab_region_dimension(r); }

std::vector<int> vertex_of(const rclab_region* r, std::size_t i) {
  std::vector<int> c(static_cast<std::size_t>(region_dim(r)));
  check(rclab_region_vertex(r, i, c.data()));
  return c;
}

std::optional<std::size_t> find_point(const rclab_region* r, const std::vector<int>& c) {
  if (static_cast<int>(c.size()) != region_dim(r)) return std::nullopt;
  std::size_t idx = 0;
  if (rclab_region_find(r, c.data(), &idx) != RCLAB_OK) return std::nullopt;
  return idx;
}

std::size_t require_point(const rclab_region* r, const std::vector<int>& c, const std::string& what) {
  if (static_cast<int>(c.size()) != region_dim(r))
    throw ConfigError(what + ": point (" + coord_text(c) + ") has dimension " + std::to_string(c.size()) +
                      ", expected " + std::to_string(region_dim(r)));
  const auto i = find_point(r, c);
  if (!i) throw ConfigError(what + ": point (" + coord_text(c) + ") is not in the region");
  return *i;
}

RegionPtr axis_segment(int d, int length) {
  std::vector<int> lo(static_cast<std::size_t>(d), 0), hi(static_cast<std::size_t>(d), 0);
  hi[0] = length;
  rclab_region* r = nullptr;
  check(rclab_region_rect(d, lo.data(), hi.data(), &r));
  return RegionPtr(r);
}

// edge | path:k | box:n | rect:AxB[xC...] | file:PATH, optionally followed by
// @c1,c2,... to translate.
Resolved resolve_region(const std::string& descriptor, std::optional<int> d, const std::string& field) {
  Resolved out;
  out.descriptor = descriptor;
  std::string body = descriptor;
  std::optional<std::vector<int>> shift;
  if (const auto at = descriptor.rfind('@'); at != std::string::npos && descriptor.rfind("file:", 0) != 0) {
    body = descriptor.substr(0, at);
    shift = parse_coord_text(descriptor.substr(at + 1), field);
  } else if (descriptor.rfind("file:", 0) == 0) {
    // Paths may contain '@'; only a trailing @coords suffix counts.
    const auto at2 = descriptor.rfind('@');
    if (at2 != std::string::npos) {
      try {
        shift = parse_coord_text(descriptor.substr(at2 + 1), field);
        body = descriptor.substr(0, at2);
      } catch (const ConfigError&) {
      }
    }
  }
  auto bad = [&](const std::string& m) {
    return ConfigError("field '" + field + "': " + m + " in region descriptor \"" + descriptor + "\"");
  };
  auto int_arg = [&](const std::string& s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw bad("cannot read \"" + s + "\" as an integer");
    return v;
  };
  const int dim = d.value_or(1);
  rclab_region* raw = nullptr;
  if (body == "edge") {
    out.region = axis_segment(dim, 1);
  } else if (body.rfind("path:", 0) == 0) {
    const int k = int_arg(body.substr(5));
    if (k < 0) throw bad("path length must be >= 0");
    out.region = axis_segment(dim, k);
  } else if (body.rfind("box:", 0) == 0) {
    if (!d) throw bad("box needs the dimension d");
    const int n = int_arg(body.substr(4));
    if (n < 0) throw bad("box radius must be >= 0");
    check(rclab_region_box(*d, n, &raw));
    out.region.reset(raw);
  } else if (body.rfind("rect:", 0) == 0) {
    std::vector<int> lo, hi;
    std::stringstream ss(body.substr(5));
    std::string part;
    while (std::getline(ss, part, 'x')) {
      const int k = int_arg(part);
      if (k < 1) throw bad("rect side must have at least one vertex");
      lo.push_back(0);
      hi.push_back(k - 1);
    }
    if (lo.empty()) throw bad("rect needs side lengths");
    check(rclab_region_rect(static_cast<int>(lo.size()), lo.data(), hi.data(), &raw));
    out.region.reset(raw);
  } else if (body.rfind("file:", 0) == 0) {
    const auto text = read_file(body.substr(5));
    check(rclab_region_from_json(text.c_str(), &raw));
    out.region.reset(raw);
  } else {
    throw bad("unknown kind (expected edge, path:k, box:n, rect:AxB or file:PATH)");
  }
  out.d = region_dim(out.region.get());
  if (d && *d != out.d)
    throw bad("dimension " + std::to_string(out.d) + " does not match d = " + std::to_string(*d));
  out.offset.assign(static_cast<std::size_t>(out.d), 0);
  if (shift) {
    if (static_cast<int>(shift->size()) != out.d) throw bad("translation has the wrong dimension");
    check(rclab_region_translate(out.region.get(), shift->data(), &raw));
    out.region.reset(raw);
    out.offset = *shift;
  }
  return out;
}

// always | open:k | connect:a;b | boundary, joined with '&'.
EventPtr resolve_event(const std::string& descriptor, const rclab_region* region, const std::vector<int>& origin,
                       const std::string& field) {
  auto bad = [&](const std::string& m) {
    return ConfigError("field '" + field + "': " + m + " in event \"" + descriptor + "\"");
  };
  EventPtr acc;
  std::stringstream ss(descriptor);
  std::string part;
  while (std::getline(ss, part, '&')) {
    rclab_event* raw = nullptr;
    if (part == "always") {
      check(rclab_event_always(&raw));
    } else if (part.rfind("open:", 0) == 0) {
      std::size_t k = 0;
      const auto s = part.substr(5);
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
      if (ec != std::errc() || ptr != s.data() + s.size()) throw bad("cannot read edge index");
      if (k >= rclab_region_edge_count(region)) throw bad("edge index out of range");
      check(rclab_event_edge_open(k, &raw));
    } else if (part.rfind("connect:", 0) == 0) {
      const auto s = part.substr(8);
      const auto semi = s.find(';');
      if (semi == std::string::npos) throw bad("connect needs two points a;b");
      const auto a = require_point(region, parse_coord_text(s.substr(0, semi), field), "field '" + field + "'");
      const auto b = require_point(region, parse_coord_text(s.substr(semi + 1), field), "field '" + field + "'");
      check(rclab_event_connect(a, b, &raw));
    } else if (part == "boundary") {
      const auto o = require_point(region, origin, "field 'origin'");
      std::size_t count = 0;
      check(rclab_region_inner_boundary(region, nullptr, 0, &count));
      std::vector<std::size_t> targets(count);
      check(rclab_region_inner_boundary(region, targets.data(), count, &count));
      if (targets.empty()) throw bad("region has no inner boundary");
      check(rclab_event_connect_set(o, targets.data(), targets.size(), &raw));
    } else {
      throw bad("unknown event \"" + part + "\"");
    }
    EventPtr cur(raw);
    if (acc) {
      rclab_event* both = nullptr;
      check(rclab_event_and(acc.get(), cur.get(), &both));
      acc.reset(both);
    } else {
      acc = std::move(cur);
    }
  }
  if (!acc) throw bad("empty event");
  return acc;
}

// First vertex connected to the last.
std::string default_event(const rclab_region* region) {
  const auto n = rclab_region_vertex_count(region);
  return "connect:" + coord_text(vertex_of(region, 0)) + ";" + coord_text(vertex_of(region, n - 1));
}

std::string region_hash(const rclab_region* r) {
  char* s = nullptr;
  check(rclab_region_hash(r, &s));
  return take(s);
}

rclab_params params_for(double p, double q) { return rclab_params{p, q, nullptr, 0}; }

struct CheckerTally {
  std::size_t instances = 0;
  std::size_t holds = 0;
  double min_slack = std::numeric_limits<double>::infinity();
};

class Runner {
 public:
  Runner(const Json& cfg, bool dry, std::ostream& log) : cfg_(cfg), dry_(dry), log_(log) {
    cmd_ = cfg.at("command").get<std::string>();
    if (cfg.contains("d")) d_ = cfg["d"].get<int>();
    if (cfg.contains("q")) q_ = cfg["q"].get<double>();
    ps_ = p_values(cfg);
    strict_ = strict_for(cfg);
  }

  void execute() {
    if (cmd_ == "exact") return exact();
    if (cmd_ == "susceptibility") return susceptibility();
    if (cmd_ == "phi") return phi();
    if (cmd_ == "ptilde") return ptilde();
    if (cmd_ == "simon") return simon();
    if (cmd_ == "diffineq") return diffineq();
    if (cmd_ == "derivcheck" || cmd_ == "pivchain") return event_check();
    if (cmd_ == "markov") return markov();
    if (cmd_ == "fkg") return fkg();
    if (cmd_ == "tanh") return tanh();
    if (cmd_ == "mc") return mc();
    if (cmd_ == "theta") return theta();
    if (cmd_ == "fit") return fit();
    throw ConfigError("unknown command " + cmd_);
  }

  const std::string& output() const { return out_; }
  bool violated() const { return violated_; }

  void print_tally() const {
    if (tally_.empty()) return;
    log_ << "checker                  instances  holds  min_slack\n";
    for (const auto& [name, t] : tally_) {
      char line[160];
      std::snprintf(line, sizeof line, "%-24s %9zu %6zu  %s\n", name.c_str(), t.instances, t.holds,
                    fmt(t.min_slack).c_str());
      log_ << line;
    }
  }

 private:
  std::optional<int> dim() const { return d_; }

  std::vector<int> origin_for(const Resolved& r) const {
    if (cfg_.contains("origin")) return parse_coord(cfg_["origin"], "origin");
    return r.offset;
  }

  EventPtr event_field(const char* field, const Resolved& r, const std::string& fallback) {
    const auto desc = cfg_.contains(field) ? cfg_[field].get<std::string>() : fallback;
    events_[field] = desc;
    return resolve_event(desc, r.region.get(), origin_for(r), field);
  }

  void line(const Json& j) { out_ += j.dump() + "\n"; }

  void report(const std::string& json_text) {
    auto j = Json::parse(json_text);
    const bool holds = j.at("holds").get<bool>();
    const bool degenerate = j.value("degenerate", false);
    auto& t = tally_[j.at("name").get<std::string>()];
    ++t.instances;
    if (holds) ++t.holds;
    if (j["slack"].is_number()) t.min_slack = std::min(t.min_slack, j["slack"].get<double>());
    if (!holds && !degenerate) violated_ = true;
    log_ << j["name"].get<std::string>() << " " << j["instance"].get<std::string>() << " lhs="
         << (j["lhs"].is_number() ? fmt(j["lhs"].get<double>()) : "null")
         << " rhs=" << (j["rhs"].is_number() ? fmt(j["rhs"].get<double>()) : "null")
         << " slack=" << (j["slack"].is_number() ? fmt(j["slack"].get<double>()) : "null") << " "
         << (degenerate ? "degenerate" : holds ? "holds" : "VIOLATED") << "\n";
    line(j);
  }

  void exact_record(const std::string& quantity, const std::string& hash, double p, double value) {
    Json j;
    j["quantity"] = quantity;
    j["region_hash"] = hash;
    j["p"] = p;
    j["q"] = q_;
    j["value"] = value;
    log_ << cmd_ << " " << quantity << " region=" << hash << " p=" << fmt(p) << " q=" << fmt(q_)
         << " value=" << fmt(value) << "\n";
    line(j);
  }

  void exact() {
    auto r = resolve_region(cfg_["region"].get<std::string>(), dim(), "region");
    const bool has_xy = cfg_.contains("x") || cfg_.contains("y");
    std::string quantity = cfg_.value("quantity", has_xy ? "connection_probability" : "event_probability");
    std::size_t x = 0, y = 0;
    EventPtr event;
    if (quantity == "connection_probability") {
      // first and last vertex unless given
      y = rclab_region_vertex_count(r.region.get()) - 1;
      if (cfg_.contains("x")) x = require_point(r.region.get(), parse_coord(cfg_["x"], "x"), "field 'x'");
      if (cfg_.contains("y")) y = require_point(r.region.get(), parse_coord(cfg_["y"], "y"), "field 'y'");
    } else if (quantity != "partition_function" && quantity != "log_partition_function") {
      event = event_field("event", r, default_event(r.region.get()));
    }
    std::size_t edge = 0;
    if (quantity == "pivotal_probability") {
      edge = cfg_["edge"].get<std::size_t>();
      if (edge >= rclab_region_edge_count(r.region.get())) throw ConfigError("field 'edge': index out of range");
    }
    if (dry_) return;
    const auto hash = region_hash(r.region.get());
    for (double p : ps_) {
      const auto params = params_for(p, q_);
      double v = 0.0;
      if (quantity == "partition_function") check(rclab_partition_function(r.region.get(), &params, &v));
      else if (quantity == "log_partition_function") check(rclab_log_partition_function(r.region.get(), &params, &v));
      else if (quantity == "connection_probability")
        check(rclab_connection_probability(r.region.get(), &params, x, y, &v));
      else if (quantity == "derivative")
        check(rclab_derivative_event_probability(r.region.get(), &params, event.get(), &v));
      else if (quantity == "pivotal_probability")
        check(rclab_pivotal_probability(r.region.get(), &params, edge, event.get(), &v));
      else
        check(rclab_event_probability(r.region.get(), &params, event.get(), &v));
      exact_record(quantity, hash, p, v);
    }
  }

  void susceptibility() {
    auto r = resolve_region(cfg_["region"].get<std::string>(), dim(), "region");
    const auto o = require_point(r.region.get(), origin_for(r), "field 'origin'");
    if (dry_) return;
    const auto hash = region_hash(r.region.get());
    for (double p : ps_) {
      const auto params = params_for(p, q_);
      double v = 0.0;
      check(rclab_susceptibility(r.region.get(), &params, o, &v));
      exact_record("susceptibility", hash, p, v);
    }
  }

  void phi() {
    auto s = resolve_region(cfg_["S"].get<std::string>(), dim(), "S");
    std::vector<int> zero(static_cast<std::size_t>(s.d), 0);
    require_point(s.region.get(), zero, "field 'S'");
    std::vector<double> bp;
    if (cfg_.contains("boundary_p")) {
      bp = parse_grid(cfg_["boundary_p"], "boundary_p");
      char* bj = nullptr;
      check(rclab_edge_boundary(s.region.get(), nullptr, &bj));
      const auto count = Json::parse(take(bj))["boundary_edges"].size();
      if (bp.size() != count)
        throw ConfigError("field 'boundary_p': expected " + std::to_string(count) + " values, one per boundary edge");
    }
    if (dry_) return;
    out_ += "S_descriptor,p,q,phi,n_boundary_edges\n";
    for (double p : ps_) {
      const auto params = params_for(p, q_);
      double v = 0.0;
      char* js = nullptr;
      check(rclab_phi(s.region.get(), &params, bp.empty() ? nullptr : bp.data(), bp.size(), &v, &js));
      const auto j = Json::parse(take(js));
      const auto nb = j["n_boundary_edges"].get<std::size_t>();
      out_ += csv_field(s.descriptor) + "," + fmt(p) + "," + fmt(q_) + "," + fmt(v) + "," + std::to_string(nb) + "\n";
      log_ << "phi S=" << s.descriptor << " p=" << fmt(p) << " q=" << fmt(q_) << " phi=" << fmt(v) << "\n";
    }
  }

  std::vector<RegionPtr> family() {
    std::vector<RegionPtr> fam;
    const auto& f = cfg_["family"];
    if (f.is_array()) {
      for (const auto& desc : f) fam.push_back(resolve_region(desc.get<std::string>(), dim(), "family").region);
      return fam;
    }
    const auto s = f.get<std::string>();
    if (s.rfind("boxes:", 0) == 0) {
      for (int n : parse_int_list(s.substr(6), "family")) {
        if (n < 0) throw ConfigError("field 'family': box radius must be >= 0");
        rclab_region* r = nullptr;
        check(rclab_region_box(*d_, n, &r));
        fam.emplace_back(r);
      }
    } else if (s.rfind("candidates:", 0) == 0) {
      const auto radii = parse_int_list(s.substr(11), "family");
      if (radii.size() != 1 || radii[0] < 0) throw ConfigError("field 'family': candidates needs one radius >= 0");
      char* js = nullptr;
      check(rclab_candidate_sets(*d_, radii[0], &js));
      for (const auto& reg : Json::parse(take(js))) {
        rclab_region* r = nullptr;
        check(rclab_region_from_json(reg.dump().c_str(), &r));
        fam.emplace_back(r);
      }
    } else {
      fam.push_back(resolve_region(s, dim(), "family").region);
    }
    return fam;
  }

  void ptilde() {
    const auto fam = family();
    std::vector<const rclab_region*> raw;
    for (const auto& r : fam) {
      std::vector<int> zero(static_cast<std::size_t>(*d_), 0);
      require_point(r.get(), zero, "field 'family'");
      raw.push_back(r.get());
    }
    if (dry_) return;
    const auto name = cfg_["family"].is_string() ? cfg_["family"].get<std::string>() : cfg_["family"].dump();
    double lower = 0.0;
    char* js = nullptr;
    check(rclab_bracket_ptilde(*d_, q_, raw.data(), raw.size(), cfg_.value("tol", 1e-4), cfg_.value("upper", -1.0),
                               name.c_str(), &lower, &js));
    const auto j = Json::parse(take(js));
    log_ << "ptilde family=" << name << " d=" << *d_ << " q=" << fmt(q_) << " lower=" << fmt(j["lower"].get<double>())
         << " upper=" << fmt(j["upper"].get<double>()) << "\n";
    line(j);
  }

  void simon() {
    auto amb = resolve_region(cfg_["ambient"].get<std::string>(), dim(), "ambient");
    auto s = resolve_region(cfg_["S"].get<std::string>(), amb.d, "S");
    const auto origin = origin_for(s);
    require_point(s.region.get(), origin, "field 'origin'");
    const auto z = parse_coord(cfg_["z"], "z");
    require_point(amb.region.get(), z, "field 'z'");
    if (find_point(s.region.get(), z)) throw ConfigError("field 'z': z must lie outside S");
    for (std::size_t i = 0; i < rclab_region_vertex_count(s.region.get()); ++i)
      if (!find_point(amb.region.get(), vertex_of(s.region.get(), i)))
        throw ConfigError("field 'S': S is not contained in the ambient region");
    if (dry_) return;
    for (double p : ps_) {
      const auto params = params_for(p, q_);
      int holds = 0;
      char* js = nullptr;
      check(rclab_check_simon(amb.region.get(), s.region.get(), origin.data(), z.data(), &params, &holds, &js));
      report(take(js));
    }
  }

  void diffineq() {
    const int n = parse_int_list(cfg_["n"], "n").front();
    if (dry_) return;
    int all = 0;
    char* js = nullptr;
    check(rclab_check_differential_inequality(*d_, n, q_, ps_.data(), ps_.size(), cfg_.value("lower", -1.0), &all,
                                              &js));
    for (const auto& r : Json::parse(take(js))) report(r.dump());
  }

  void event_check() {
    auto r = resolve_region(cfg_["region"].get<std::string>(), dim(), "region");
    auto ev = event_field("event", r, default_event(r.region.get()));
    if (dry_) return;
    for (double p : ps_) {
      const auto params = params_for(p, q_);
      int holds = 0;
      char* js = nullptr;
      if (cmd_ == "derivcheck")
        check(rclab_check_derivative_identity(r.region.get(), &params, ev.get(), &holds, &js));
      else
        check(rclab_check_pivotal_lower_chain(r.region.get(), &params, ev.get(), &holds, &js));
      report(take(js));
    }
  }

  void markov() {
    const int n = parse_int_list(cfg_["n"], "n").front();
    rclab_region* raw = nullptr;
    check(rclab_region_box(*d_, n, &raw));
    RegionPtr box(raw);
    auto s = resolve_region(cfg_["S"].get<std::string>(), dim(), "S");
    const auto x = parse_coord(cfg_["x"], "x");
    const auto y = parse_coord(cfg_["y"], "y");
    std::vector<int> zero(static_cast<std::size_t>(*d_), 0);
    require_point(s.region.get(), zero, "field 'S'");
    require_point(s.region.get(), x, "field 'x'");
    require_point(box.get(), y, "field 'y'");
    if (find_point(s.region.get(), y)) throw ConfigError("field 'y': y must lie outside S");
    int dist = 0;
    for (std::size_t i = 0; i < x.size(); ++i) dist += std::abs(x[i] - y[i]);
    if (dist != 1) throw ConfigError("fields 'x', 'y': {x,y} must be a lattice edge");
    for (std::size_t i = 0; i < rclab_region_vertex_count(s.region.get()); ++i)
      if (!find_point(box.get(), vertex_of(s.region.get(), i)))
        throw ConfigError("field 'S': S is not contained in the box");
    if (dry_) return;
    for (double p : ps_) {
      const auto params = params_for(p, q_);
      int holds = 0;
      char* js = nullptr;
      check(rclab_check_markov_factorization(*d_, n, &params, s.region.get(), x.data(), y.data(), &holds, &js));
      report(take(js));
    }
  }

  void fkg() {
    auto r = resolve_region(cfg_["region"].get<std::string>(), dim(), "region");
    auto a = event_field("event", r, default_event(r.region.get()));
    auto b = event_field("event_b", r, "always");
    if (dry_) return;
    for (double p : ps_) {
      const auto params = params_for(p, q_);
      int holds = 0;
      char* js = nullptr;
      check(rclab_check_fkg(r.region.get(), &params, a.get(), b.get(), &holds, &js));
      report(take(js));
    }
  }

  void tanh() {
    if (dry_) return;
    for (double p : ps_) {
      int holds = 0;
      char* js = nullptr;
      check(rclab_check_tanh_bound(p, &holds, &js));
      report(take(js));
    }
  }

  rclab_mc_options mc_options() const {
    rclab_mc_options o{};
    o.n_sweeps = cfg_.value("n_sweeps", std::uint64_t{100000});
    o.seed = cfg_.value("seed", std::uint64_t{1});
    const auto s = cfg_.value("sampler", std::string("auto"));
    o.sampler = s == "heat_bath" ? RCLAB_SAMPLER_HEAT_BATH
                : s == "swendsen_wang" ? RCLAB_SAMPLER_SWENDSEN_WANG
                                       : RCLAB_SAMPLER_AUTO;
    o.burn_in = cfg_.value("burn_in", std::uint64_t{0});
    o.chains = cfg_.value("chains", 1u);
    return o;
  }

  void check_sweeps() const {
    const auto o = mc_options();
    const auto burn = o.burn_in ? o.burn_in : std::max<std::uint64_t>(1000, o.n_sweeps / 10);
    if (o.n_sweeps <= burn || o.n_sweeps - burn < 32)
      throw ConfigError("field 'n_sweeps': needs at least 32 sweeps beyond the burn-in (" + std::to_string(burn) + ")");
  }

  Json mc_record(const std::string& op, double p, const Json& est) const {
    Json j;
    j["op"] = op;
    if (d_) j["d"] = *d_;
    j["q"] = q_;
    j["p"] = p;
    for (const auto& [k, v] : est.items()) j[k] = v;
    return j;
  }

  void log_mc(const Json& j) {
    log_ << cmd_ << " " << j["op"].get<std::string>() << " p=" << fmt(j["p"].get<double>())
         << " mean=" << fmt(j["mean"].get<double>()) << " stderr=" << fmt(j["stderr"].get<double>())
         << " seed=" << j["seed"].dump() << "\n";
  }

  void mc() {
    auto r = resolve_region(cfg_["region"].get<std::string>(), dim(), "region");
    const bool has_xy = cfg_.contains("x") || cfg_.contains("y");
    if (has_xy && cfg_.contains("event")) throw ConfigError("give either 'event' or 'x'/'y', not both");
    std::size_t x = 0, y = 0;
    EventPtr ev;
    if (has_xy) {
      if (!cfg_.contains("x") || !cfg_.contains("y")) throw ConfigError("connection estimate needs both x and y");
      x = require_point(r.region.get(), parse_coord(cfg_["x"], "x"), "field 'x'");
      y = require_point(r.region.get(), parse_coord(cfg_["y"], "y"), "field 'y'");
    } else {
      ev = event_field("event", r, default_event(r.region.get()));
    }
    check_sweeps();
    if (dry_) return;
    const auto opts = mc_options();
    const auto hash = region_hash(r.region.get());
    for (double p : ps_) {
      const auto params = params_for(p, q_);
      char* js = nullptr;
      if (has_xy) {
        check(rclab_mc_estimate_connection(r.region.get(), &params, x, y, &opts, &js));
      } else {
        double mean = 0.0, se = 0.0;
        check(rclab_mc_estimate_event(r.region.get(), &params, ev.get(), &opts, &mean, &se, &js));
      }
      auto j = mc_record(has_xy ? "connection" : "event", p, Json::parse(take(js)));
      Json out;
      for (const auto& [k, v] : j.items()) {
        out[k] = v;
        if (k == "p") {
          out["region_hash"] = hash;
          if (has_xy) {
            out["x"] = parse_coord(cfg_["x"], "x");
            out["y"] = parse_coord(cfg_["y"], "y");
          } else {
            out["event"] = events_["event"];
          }
        }
      }
      log_mc(out);
      line(out);
    }
  }

  void theta() {
    const auto ns = parse_int_list(cfg_["n"], "n");
    check_sweeps();
    if (cfg_.contains("lower"))
      for (double p : ps_)
        if (!(p > cfg_["lower"].get<double>()))
          throw ConfigError("field 'lower': the lower bound needs p > lower");
    if (dry_) return;
    const auto opts = mc_options();
    for (int n : ns) {
      for (double p : ps_) {
        char* js = nullptr;
        check(rclab_mc_estimate_theta(*d_, q_, p, n, &opts, &js));
        const auto est = Json::parse(take(js));
        Json j;
        j["op"] = "theta";
        j["d"] = *d_;
        j["q"] = q_;
        j["p"] = p;
        j["n"] = n;
        for (const auto& [k, v] : est.items()) j[k] = v;
        if (cfg_.contains("lower")) {
          double bound = 0.0;
          check(rclab_theta_lower_bound(p, cfg_["lower"].get<double>(), &bound));
          j["lower"] = cfg_["lower"];
          j["theta_lower_bound"] = bound;
        }
        log_mc(j);
        line(j);
      }
    }
  }

  void fit() {
    const int m = cfg_["box_radius"].get<int>();
    std::vector<int> dist;
    if (cfg_.contains("distances")) {
      dist = parse_int_list(cfg_["distances"], "distances");
    } else {
      for (int k = 1; k <= m; ++k) dist.push_back(k);
    }
    check_sweeps();
    if (dry_) return;
    const auto opts = mc_options();
    char* js = nullptr;
    check(rclab_mc_fit_decay(*d_, q_, ps_.front(), m, dist.data(), dist.size(), &opts, &js));
    const auto fitj = Json::parse(take(js));
    Json j;
    j["d"] = *d_;
    for (const auto& [k, v] : fitj.items()) j[k] = v;
    j["seed"] = opts.seed;
    j["n_sweeps"] = opts.n_sweeps;
    log_ << "fit d=" << *d_ << " p=" << fmt(ps_.front()) << " m=" << m << " status=" << j["status"].get<std::string>()
         << " rate=" << (j["rate"].is_number() ? fmt(j["rate"].get<double>()) : "null") << "\n";
    line(j);
  }

  const Json& cfg_;
  bool dry_;
  std::ostream& log_;
  std::string cmd_;
  std::optional<int> d_;
  double q_ = 2.0;
  std::vector<double> ps_;
  bool strict_ = false;
  std::string out_;
  bool violated_ = false;
  std::map<std::string, CheckerTally> tally_;
  std::map<std::string, std::string> events_;
};

void write_atomic(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ApiError(RCLAB_ERR_RESOURCE, "cannot open \"" + tmp.string() + "\" for writing");
    f << data;
    f.flush();
    if (!f) throw ApiError(RCLAB_ERR_RESOURCE, "failed writing \"" + tmp.string() + "\"");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ApiError(RCLAB_ERR_RESOURCE, "cannot rename output to \"" + path + "\"");
  }
}

int status_for(rclab_status s) {
  switch (s) {
    case RCLAB_ERR_INVALID_ARGUMENT:
    case RCLAB_ERR_DOMAIN:
      return kExitInvalid;
    case RCLAB_ERR_RESOURCE:
      return kExitResource;
    default:
      return kExitInternal;
  }
}

}  // namespace

Json parse_config_text(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::vector<std::string> validate(const Json& config) {
  auto errors = schema_errors(config);
  if (!errors.empty()) return errors;
  std::ostringstream sink;
  try {
    Runner(config, true, sink).execute();
  } catch (const ConfigError& e) {
    errors.push_back(e.what());
  } catch (const ApiError& e) {
    errors.push_back(e.what());
  }
  return errors;
}

std::vector<std::string> validate_text(const std::string& text) {
  try {
    return validate(parse_config_text(text));
  } catch (const ConfigError& e) {
    return {e.what()};
  }
}

int run(const Json& config, std::ostream& out, std::ostream& log) {
  const auto errors = validate(config);
  if (!errors.empty()) {
    for (const auto& e : errors) log << "error: " << e << "\n";
    return kExitInvalid;
  }
  const unsigned saved_threads = rclab_threads();
  const std::size_t saved_cap = rclab_enumeration_cap();
  struct Restore {
    unsigned threads;
    std::size_t cap;
    bool set_threads;
    ~Restore() {
      if (set_threads) rclab_set_threads(threads);
      rclab_set_enumeration_cap(cap);
    }
  } restore{saved_threads, saved_cap, config.contains("threads")};
  try {
    if (config.contains("threads")) rclab_set_threads(config["threads"].get<unsigned>());
    if (config.contains("max_edges")) check(rclab_set_enumeration_cap(config["max_edges"].get<std::size_t>()));
    Runner runner(config, false, log);
    runner.execute();
    runner.print_tally();
    if (config.contains("out"))
      write_atomic(config["out"].get<std::string>(), runner.output());
    else
      out << runner.output() << std::flush;
    if (runner.violated() && strict_for(config)) {
      log << "strict checker reported a violation\n";
      return kExitViolation;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ApiError& e) {
    log << "error: " << e.what() << "\n";
    return status_for(e.status);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace rclab_cli

#include "anosov/harness/experiments.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>

#include "anosov/atlas.hpp"
#include "anosov/holder.hpp"
#include "anosov/model.hpp"
#include "anosov/shadowing.hpp"
#include "anosov/spectrum.hpp"

namespace anosov {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string b01(bool b) { return b ? "1" : "0"; }

json config_json(const ExperimentConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : config_entries(cfg)) j[k] = v;
  return j;
}

// Numbers go through fmt_num so the JSON text does not depend on the library's float printer.
json num(double v) { return std::isfinite(v) ? json(v) : json(fmt_num(v)); }

class Session {
 public:
  Session(const RunContext& ctx, std::string name) : ctx_(ctx), name_(std::move(name)) {
    try {
      model_.emplace(build_model(ctx.cfg.model));
    } catch (const DomainError& e) {
      throw ConfigError("map", e.what());
    }
    ensure_output_dir(ctx.out);
    outcome_.subcommand = name_;
    outcome_.summary["subcommand"] = name_;
    outcome_.summary["config"] = config_json(ctx.cfg);
  }

  const ExperimentConfig& cfg() const { return ctx_.cfg; }
  const Model& model() const { return *model_; }
  const PerturbedMap& map() const { return model_->map; }
  Exec exec() const { return ctx_.exec; }
  json& summary() { return outcome_.summary; }

  void log(const std::string& s) const {
    if (ctx_.log) *ctx_.log << "[" << name_ << "] " << s << std::endl;
  }

  void csv(const std::string& file, const CsvTable& t) { emit(file, [&](const fs::path& p) { write_csv(p, t); }); }
  void svg(const std::string& file, const Plot& p) { emit(file, [&](const fs::path& q) { write_svg(q, p); }); }

  void problem(const std::string& what) {
    outcome_.numeric_ok = false;
    outcome_.problems.push_back(what);
    log("problem: " + what);
  }

  // Stopwatch for the log only; artifacts carry no timings.
  template <class F>
  auto timed(const std::string& what, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.1f s)", s);
    log(what + buf);
    return r;
  }

  RunOutcome finish() {
    outcome_.summary["status"] = outcome_.numeric_ok ? "ok" : "numeric_failure";
    outcome_.summary["problems"] = outcome_.problems;
    outcome_.summary["artifacts"] = outcome_.artifacts;
    write_json(ctx_.out / (name_ + ".json"), outcome_.summary);
    outcome_.artifacts.push_back(name_ + ".json");
    return outcome_;
  }

  int depth() const { return series_depth(map(), cfg().conj_tol); }

  // Loads the cached grid when its metadata matches the current map, otherwise builds and saves it.
  const ConjugacyGrid& grid() {
    if (grid_) return *grid_;
    const int res = cfg().conj_nodes_per_unit * map().k();
    const GridMeta want = grid_meta_for(map(), res, cfg().conj_tol, depth());
    const fs::path path = cfg().grid_path.empty() ? ctx_.out / "conjugacy_grid.bin" : fs::path(cfg().grid_path);
    json& info = outcome_.summary["grid"];
    info["path"] = path.string();
    info["resolution"] = res;
    if (fs::exists(path)) {
      try {
        grid_.emplace(load_grid(path.string(), &want));
        log("grid cache hit: " + path.string());
        info["cache"] = "hit";
        return *grid_;
      } catch (const GridFormatError& e) {
        log(std::string("grid cache miss (") + e.what() + "); rebuilding");
        info["cache"] = std::string("stale: ") + e.what();
      }
    } else {
      log("grid cache miss (no file); building " + std::to_string(res) + "^2 nodes");
      info["cache"] = "miss";
    }
    grid_.emplace(timed("grid built", [&] { return build_grid(map(), res, cfg().conj_tol, exec()); }));
    try {
      save_grid(*grid_, path.string());
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
    log("grid saved: " + path.string());
    return *grid_;
  }

 private:
  template <class W>
  void emit(const std::string& file, W&& w) {
    w(ctx_.out / file);
    outcome_.artifacts.push_back(file);
  }

  const RunContext& ctx_;
  std::string name_;
  std::optional<Model> model_;
  std::optional<ConjugacyGrid> grid_;
  RunOutcome outcome_;
};

// ---------------------------------------------------------------------------------------------------------

void run_map_check(Session& s) {
  const auto& map = s.map();
  const auto rep = s.timed("map_check", [&] { return map_check(map, s.cfg().cone_samples, s.cfg().seed, 1e-6, s.exec()); });
  const bool ok_fd = rep.max_fd_rel < 1e-5, ok_det = rep.max_det < 1e-12, ok_shear = rep.max_shear < 1e-8,
             ok_trip = rep.max_roundtrip < 1e-10, ok_id = rep.max_identity == 0.0;
  json& j = s.summary()["checks"];
  j["samples"] = rep.samples;
  j["max_fd_relative_error"] = num(rep.max_fd_rel);
  j["max_det_error"] = num(rep.max_det);
  j["max_shear_frame_error"] = num(rep.max_shear);
  j["max_roundtrip"] = num(rep.max_roundtrip);
  j["max_identity_error"] = num(rep.max_identity);
  j["pass"] = ok_fd && ok_det && ok_shear && ok_trip && ok_id;
  if (!ok_fd) s.problem("finite-difference mismatch " + fmt_num(rep.max_fd_rel));
  if (!ok_det) s.problem("det D theta differs from 1 by " + fmt_num(rep.max_det));
  if (!ok_shear) s.problem("circle-frame shear mismatch " + fmt_num(rep.max_shear));
  if (!ok_trip) s.problem("f_inv(f(x)) roundtrip error " + fmt_num(rep.max_roundtrip));
  if (!ok_id) s.problem("theta differs from the identity where it must not");

  CsvTable checks{{"check", "value", "limit", "pass"}, {}};
  checks.add({"fd_relative_error", fmt_num(rep.max_fd_rel), fmt_num(1e-5), b01(ok_fd)});
  checks.add({"det_error", fmt_num(rep.max_det), fmt_num(1e-12), b01(ok_det)});
  checks.add({"shear_frame_error", fmt_num(rep.max_shear), fmt_num(1e-8), b01(ok_shear)});
  checks.add({"roundtrip", fmt_num(rep.max_roundtrip), fmt_num(1e-10), b01(ok_trip)});
  checks.add({"identity_error", fmt_num(rep.max_identity), fmt_num(0.0), b01(ok_id)});
  s.csv("map_check.csv", checks);

  const auto decay = vertical_vector_decay(map, 20);
  CsvTable t{{"n", "norm"}, {}};
  Plot p{"vertical vector at R", "n", "|Df^n e_s|", false, true, {{"norm", {}, {}, true}}, {1.0}};
  for (std::size_t i = 0; i < decay.n.size(); ++i) {
    t.add({std::to_string(decay.n[i]), fmt_num(decay.norms[i])});
    p.series[0].x.push_back(decay.n[i]);
    p.series[0].y.push_back(decay.norms[i]);
  }
  s.summary()["vertical_decay_warning"] = decay.warning;
  s.csv("vertical_decay.csv", t);
  s.svg("vertical_decay.svg", p);
}

void run_cones(Session& s) {
  const auto& map = s.map();
  RegionAtlas atlas(map, s.model().frame);
  ConeOptions opt;
  opt.samples = s.cfg().cone_samples;
  opt.epsilon = s.cfg().cone_epsilon;
  opt.seed = s.cfg().seed;
  const auto rep = s.timed("cone suite", [&] { return verify_cone_conditions(map, atlas, opt, s.exec()); });

  CsvTable t{{"x", "y", "region", "converged", "tan_u_eu", "tan_u_es", "tan_s_es", "rho", "d_stable", "in_U", "in_V",
              "in_Binf"},
             {}};
  for (const auto& r : rep.rows)
    t.add({fmt_num(r.p.x), fmt_num(r.p.y), r.label.name(), b01(r.converged), fmt_num(r.tan_u_eu), fmt_num(r.tan_u_es),
           fmt_num(r.tan_s_es), fmt_num(r.rho), fmt_num(r.d_stable), b01(r.in_U), b01(r.in_V), b01(r.in_binf)});
  s.csv("cones.csv", t);

  CsvTable env{{"d_stable", "max_tan_s_es"}, {}};
  Plot p{"stable-direction envelope", "d(S)", "max tan(E^s, e_s)", true, true, {{"bin max", {}, {}, false}}, {}};
  for (std::size_t i = 0; i < rep.envelope_d.size(); ++i) {
    env.add({fmt_num(rep.envelope_d[i]), fmt_num(rep.envelope_tan[i])});
    p.series[0].x.push_back(rep.envelope_d[i]);
    p.series[0].y.push_back(rep.envelope_tan[i]);
  }
  s.csv("cones_envelope.csv", env);
  s.svg("cones_envelope.svg", p);

  json& j = s.summary()["constants"];
  j["tau"] = num(rep.tau);
  j["xi"] = num(rep.xi);
  j["kappa"] = num(rep.kappa);
  j["epsilon"] = num(opt.epsilon);
  j["eps_measured_u"] = num(rep.eps_measured_u);
  j["eps_measured_s"] = num(rep.eps_measured_s);
  j["prop_slope"] = num(rep.prop_slope);
  j["min_lemma_ratio"] = num(rep.min_lemma_ratio);
  json& v = s.summary()["violations"];
  v["t4_u"] = rep.violations_t4_u;
  v["t4_s"] = rep.violations_t4_s;
  v["binf"] = rep.violations_binf;
  v["lemma"] = rep.violations_lemma;
  s.summary()["unconverged"] = rep.unconverged;
  s.summary()["unconverged_in_bar"] = rep.unconverged_in_bar;
  if (rep.unconverged > rep.unconverged_in_bar)
    s.problem(std::to_string(rep.unconverged - rep.unconverged_in_bar) + " direction fields unconverged outside B-bar");
}

void run_tangency(Session& s) {
  const auto fit = s.timed("tangency fit", [&] {
    return tangency_order(s.map(), s.cfg().tangency_scales, s.cfg().tangency_rho_max);
  });
  CsvTable t{{"rho", "tan"}, {}};
  Plot p{"tangency order", "rho", "tan angle(E^u, e_s)", true, true, {{"measured", {}, {}, false}, {"fit", {}, {}, true}}, {}};
  for (std::size_t i = 0; i < fit.rho.size(); ++i) {
    t.add({fmt_num(fit.rho[i]), fmt_num(fit.tan_values[i])});
    p.series[0].x.push_back(fit.rho[i]);
    p.series[0].y.push_back(fit.tan_values[i]);
    p.series[1].x.push_back(fit.rho[i]);
    p.series[1].y.push_back(std::exp(fit.intercept) * std::pow(fit.rho[i], fit.slope));
  }
  s.csv("tangency.csv", t);
  if (!fit.transversal) s.svg("tangency.svg", p);
  json& j = s.summary()["constants"];
  j["slope"] = num(fit.slope);
  j["intercept"] = num(fit.intercept);
  j["transversal"] = fit.transversal;
  if (!fit.transversal && !std::isfinite(fit.slope)) s.problem("tangency fit is not finite");
}

void run_conjugacy(Session& s) {
  const auto& map = s.map();
  const int N = s.depth();
  const auto& g = s.grid();
  const int k = map.k();

  // off-grid probes
  const std::size_t probes = 10000;
  std::vector<double> res(probes);
  std::vector<TorusPoint> pts(probes);
  for_each_index(probes, s.exec(), [&](std::size_t i) {
    auto rng = rng_stream(s.cfg().seed, 1000000 + i);
    pts[i] = TorusPoint::make(uniform(rng, 0, k), uniform(rng, 0, k), k);
    res[i] = conjugacy_residual(map, pts[i], N);
  });
  double worst = 0;
  CsvTable t{{"x", "y", "residual"}, {}};
  for (std::size_t i = 0; i < probes; ++i) {
    worst = std::max(worst, res[i]);
    t.add({fmt_num(pts[i].x), fmt_num(pts[i].y), fmt_num(res[i])});
  }
  s.csv("conjugacy_probes.csv", t);

  // residual against truncation depth on a fixed subset: the geometric tail
  CsvTable d{{"depth", "max_residual"}, {}};
  Plot p{"conjugacy residual vs series depth", "N", "max residual", false, true, {{"max residual", {}, {}, true}}, {s.cfg().conj_tol}};
  for (int n = 2; n <= N; n += 2) {
    double m = 0;
    for (std::size_t i = 0; i < 200; ++i) m = std::max(m, conjugacy_residual(map, pts[i], n));
    d.add({std::to_string(n), fmt_num(m)});
    p.series[0].x.push_back(n);
    p.series[0].y.push_back(std::max(m, 1e-18));
  }
  s.csv("conjugacy_depth.csv", d);
  s.svg("conjugacy_depth.svg", p);

  json& j = s.summary()["constants"];
  j["series_depth"] = N;
  j["max_residual_offgrid"] = num(worst);
  j["grid_max_displacement"] = num(g.max_norm());
  j["tol"] = num(s.cfg().conj_tol);
  if (!(worst < s.cfg().conj_tol)) s.problem("off-grid residual " + fmt_num(worst) + " exceeds tol");
}

void add_fit_rows(CsvTable& t, Plot& p, const ExponentFit& f) {
  PlotSeries ser{f.strategy, {}, {}, false};
  for (const auto& r : f.rows) {
    t.add({f.strategy, fmt_num(r.scale), fmt_num(r.worst), std::to_string(r.pairs), std::to_string(r.failures)});
    ser.x.push_back(r.scale);
    ser.y.push_back(r.worst);
  }
  p.series.push_back(std::move(ser));
}

json fit_json(const ExponentFit& f) {
  return {{"exponent", num(f.exponent)}, {"constant", num(f.constant)}, {"residual", num(f.residual)},
          {"monotone_breaks", f.monotone_breaks}};
}

void run_holder(Session& s) {
  const auto& map = s.map();
  const int k = map.k();
  RegionAtlas atlas(map, s.model().frame);
  const double s0 = s.cfg().holder_scale0 > 0 ? s.cfg().holder_scale0 : map.r() / 10;
  const auto scales = scale_ladder(s0, s.cfg().holder_scales);
  HolderOptions ho;
  ho.pairs_per_scale = s.cfg().holder_pairs;
  ho.seed = s.cfg().seed;
  const int N = s.depth();
  const PointMap H = h_map(map, N);
  const PointMap Hi = h_inverse_map(map, N, 0.01 * s.cfg().conj_tol, &s.grid());

  struct Job {
    std::string name;
    PointMap eval;
    PairSampler sampler;
    std::string band;  // "lo,hi"
    double lo, hi;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Job> jobs = {
      {"calibration_0.25", power_map(0.25, k), calibration_pairs(k), "0.23,0.27", 0.23, 0.27},
      {"calibration_0.5", power_map(0.5, k), calibration_pairs(k), "0.48,0.52", 0.48, 0.52},
      {"calibration_1", power_map(1.0, k), calibration_pairs(k), "0.98,1.02", 0.98, 1.02},
      {"h_near_orbit", H, near_orbit_pairs(atlas), "0.4,0.6", 0.4, 0.6},
      {"h_uniform", H, uniform_pairs(k), "", -inf, inf},
      {"h_outside_U", H, outside_u_pairs(atlas), ">=0.85", 0.85, inf},
      {"h_leaf_unstable", H, leaf_pairs(map, Orientation::Unstable), ">=0.85", 0.85, inf},
      {"h_leaf_stable", H, leaf_pairs(map, Orientation::Stable), ">=0.85", 0.85, inf},
      {"hinv_near_orbit", Hi, near_orbit_pairs(atlas), ">=0.2", 0.2, inf},
      {"hinv_uniform", Hi, uniform_pairs(k), ">=0.2", 0.2, inf},
      {"hinv_L_leaf_unstable", Hi, linear_leaf_pairs(map.L(), Orientation::Unstable), ">=0.2", 0.2, inf},
  };

  CsvTable t{{"strategy", "scale", "worst", "pairs", "failures"}, {}};
  Plot p{"worst-case modulus of continuity", "scale", "worst image distance", true, true, {}, {}};
  json& fits = s.summary()["exponents"];
  for (const auto& job : jobs) {
    try {
      const auto f = s.timed(job.name, [&] { return estimate_exponent(job.eval, job.sampler, scales, ho, job.name, s.exec()); });
      add_fit_rows(t, p, f);
      json j = fit_json(f);
      if (!job.band.empty()) {
        j["band"] = job.band;
        j["in_band"] = f.exponent >= job.lo && f.exponent <= job.hi;
      }
      fits[job.name] = j;
    } catch (const DomainError& e) {
      fits[job.name] = {{"error", e.what()}};
      s.problem(job.name + ": " + e.what());
    }
  }

  const auto strata = s.timed("tube scan", [&] { return tube_exponent_scan(map, atlas, H, scales, ho, s.exec()); });
  for (const auto& st : strata) {
    if (!st.available) {
      fits["stratum_" + st.stratum] = {{"available", false}};
      continue;
    }
    ExponentFit f = st.fit;
    f.strategy = "stratum_" + st.stratum;
    add_fit_rows(t, p, f);
    fits[f.strategy] = fit_json(f);
  }
  s.csv("holder.csv", t);
  s.svg("holder.svg", p);

  BeakOptions bo;
  bo.samples = s.cfg().beak_samples;
  bo.seed = s.cfg().seed;
  const auto br = s.timed("beak probe", [&] { return beak_probe(map, atlas, bo, s.exec()); });
  CsvTable bt{{"n", "kind", "x1", "y1", "x2", "x3", "y3", "D", "holds"}, {}};
  Plot bp{"beak: |y1 - y3| against |x1 - x2|", "|x1 - x2|", "|y1 - y3|", true, true, {}, {}};
  PlotSeries a{"case A", {}, {}, false};
  for (const auto& r : br.rows) {
    bt.add({std::to_string(r.n), std::string(1, r.kind), fmt_num(r.x1), fmt_num(r.y1), fmt_num(r.x2), fmt_num(r.x3),
            fmt_num(r.y3), fmt_num(r.D), b01(r.holds)});
    if (r.kind == 'A') {
      a.x.push_back(std::fabs(r.x1 - r.x2));
      a.y.push_back(std::fabs(r.y1 - r.y3));
    }
  }
  bp.series.push_back(std::move(a));
  s.csv("beak.csv", bt);
  s.svg("beak.svg", bp);
  json& bj = s.summary()["beak"];
  bj["case_a"] = br.case_a;
  bj["case_b"] = br.case_b;
  bj["case_a_fail"] = br.case_a_fail;
  bj["case_b_fail"] = br.case_b_fail;
  bj["skipped"] = br.skipped;
  bj["c_spread"] = num(br.c_spread);
  json dec = json::array();
  for (std::size_t i = 0; i < br.decade_c.size(); ++i) dec.push_back({{"lo", num(br.decade_lo[i])}, {"C", num(br.decade_c[i])}});
  bj["decades"] = dec;
}

void run_spectrum(Session& s) {
  const auto& map = s.map();
  const auto est = s.timed("periodic spectrum", [&] {
    return periodic_spectrum(map, &s.grid(), s.cfg().period_cap, RefineOptions{}, s.exec());
  });
  CsvTable t{{"period", "x", "y", "mag_lo", "mag_hi", "rate_lo", "rate_hi", "residual", "unimodularity", "iterations",
              "hyperbolic"},
             {}};
  json counts = json::array();
  for (const auto& pr : est.periods) {
    counts.push_back({{"period", pr.period}, {"expected", pr.expected}, {"found", pr.records.size()},
                      {"failures", pr.failures}, {"duplicates", pr.duplicates}});
    for (const auto& r : pr.records)
      t.add({std::to_string(r.period), fmt_num(r.point.x), fmt_num(r.point.y), fmt_num(r.mag_lo), fmt_num(r.mag_hi),
             fmt_num(r.rate_lo), fmt_num(r.rate_hi), fmt_num(r.residual), fmt_num(r.unimodularity),
             std::to_string(r.iterations), b01(r.hyperbolic)});
  }
  s.csv("spectrum.csv", t);
  json& j = s.summary()["constants"];
  j["min_log_rate"] = num(est.min_log_rate);
  j["half_log_lambda"] = num(0.5 * std::log(map.L().lambda()));
  j["max_unimodularity"] = num(est.max_unimodularity);
  j["non_hyperbolic"] = est.non_hyperbolic;
  j["counts_match"] = est.counts_match();
  s.summary()["periods"] = counts;
  if (est.failures) s.problem(std::to_string(est.failures) + " periodic refinements did not converge");

  // growth-rate probe at R along the vertical vector
  const TorusPoint R = s.model().frame.r_point;
  const Vec2 v = map.L().eig().e_s;
  std::vector<int> ns;
  for (int n : {1, 2, 5, 10, 20, 50, 100, 200, 500})
    if (n < s.cfg().probe_n) ns.push_back(n);
  ns.push_back(s.cfg().probe_n);
  std::vector<int> grid;
  for (auto it = ns.rbegin(); it != ns.rend(); ++it) grid.push_back(-*it);
  grid.insert(grid.end(), ns.begin(), ns.end());
  CsvTable pt{{"mode", "n", "log_norm", "rate", "alignment"}, {}};
  Plot pp{"growth-rate probe at R, vertical vector", "n", "log |Df^n v|", false, false, {}, {0.0}};
  for (auto [mode, name] : {std::pair{ProbeMode::Auto, "auto"}, std::pair{ProbeMode::Direct, "direct"}}) {
    PlotSeries ser{name, {}, {}, true};
    for (const auto& pv : growth_rate_probe(map, R, v, grid, mode)) {
      pt.add({name, std::to_string(pv.n), fmt_num(pv.log_norm), fmt_num(pv.rate), fmt_num(pv.alignment)});
      ser.x.push_back(pv.n);
      ser.y.push_back(pv.log_norm);
      if (mode == ProbeMode::Auto && std::abs(pv.n) == s.cfg().probe_n)
        j[pv.n > 0 ? "probe_rate_forward" : "probe_rate_backward"] = num(pv.rate);
    }
    pp.series.push_back(std::move(ser));
  }
  s.csv("probe.csv", pt);
  s.svg("probe.svg", pp);

  CsvTable wt{{"point", "N", "residual"}, {}};
  const TorusPoint generic = TorusPoint::make(0.3, 3.3, map.k());
  for (int N : {5, 10, 20, 40}) {
    wt.add({"R", std::to_string(N), fmt_num(weyl_residual(map, R, v, N))});
    wt.add({"generic", std::to_string(N), fmt_num(weyl_residual(map, generic, normalized(Vec2{0.6, 0.8}), N))});
  }
  s.csv("weyl.csv", wt);
}

void run_shadow(Session& s) {
  const auto& L = s.map().L();
  const int N = s.cfg().shadow_window;
  const double C = shadowing_constant(L);
  CsvTable t{{"xi", "defect", "delta", "C_xi", "ratio", "boundary", "delta_recomputed", "holds"}, {}};
  Plot p{"linear shadowing", "xi", "delta", true, true, {{"delta", {}, {}, false}, {"C xi", {}, {}, true}}, {}};
  bool holds = true;
  for (std::size_t i = 0; i < s.cfg().shadow_xis.size(); ++i) {
    const double xi = s.cfg().shadow_xis[i];
    const auto po = random_pseudo_orbit(L, N, xi, s.cfg().seed + i);
    const auto r = shadow_linear(L, po);
    const double rec = recompute_delta(L, po, r.x);
    const bool ok = r.delta <= C * r.xi;
    holds = holds && ok;
    t.add({fmt_num(xi), fmt_num(po.defect), fmt_num(r.delta), fmt_num(C * r.xi), fmt_num(r.delta / r.xi),
           fmt_num(r.boundary), fmt_num(rec), b01(ok)});
    p.series[0].x.push_back(r.xi);
    p.series[0].y.push_back(r.delta);
    p.series[1].x.push_back(r.xi);
    p.series[1].y.push_back(C * r.xi);
  }
  s.csv("shadow.csv", t);
  s.svg("shadow.svg", p);
  s.summary()["constants"]["C"] = num(C);
  s.summary()["bound_holds"] = holds;

  const auto& map = s.map();
  const auto q = quasi_anosov_probe(map, s.model().frame.r_point, L.eig().e_s, 20);
  CsvTable qt{{"n", "norm"}, {}};
  for (std::size_t i = 0; i < q.n.size(); ++i) qt.add({std::to_string(q.n[i]), fmt_num(q.norms[i])});
  s.csv("quasi_anosov.csv", qt);
  s.summary()["quasi_anosov"] = {{"max_norm", num(q.max_norm)}, {"bounded", q.bounded}, {"first_exceed", q.first_exceed}};
}

void run_fisher(Session& s) {
  const auto& map = s.map();
  const TorusPoint R = s.model().frame.r_point;
  const Vec2 v = map.L().eig().e_s;
  CsvTable t{{"mode", "epsilon", "xi", "delta", "delta_series", "bound"}, {}};
  Plot p{"shadowing distance against defect", "xi", "delta", true, true, {}, {}};
  for (auto [mode, name] : {std::pair{FisherMode::Identity, "identity"}, std::pair{FisherMode::Conjugacy, "conjugacy"}}) {
    FisherReport rep;
    try {
      rep = s.timed(std::string("fisher ") + name, [&] {
        return fisher_experiment(map, R, v, s.cfg().fisher_eps, s.cfg().fisher_window, mode, s.exec());
      });
    } catch (const DomainError& e) {
      s.summary()[name] = {{"error", e.what()}};
      s.problem(std::string(name) + ": " + e.what());
      continue;
    }
    PlotSeries ser{name, {}, {}, false};
    for (const auto& r : rep.rows) {
      t.add({name, fmt_num(r.epsilon), fmt_num(r.xi), fmt_num(r.delta), fmt_num(r.delta_series), fmt_num(r.bound)});
      ser.x.push_back(r.xi);
      ser.y.push_back(r.delta);
    }
    p.series.push_back(std::move(ser));
    s.summary()[name] = {{"defect_exponent", num(rep.defect_exponent)}, {"kappa", num(rep.kappa)}, {"C", num(rep.C)},
                         {"bound_holds", rep.bound_holds}, {"min_ratio", num(rep.min_ratio)},
                         {"max_ratio", num(rep.max_ratio)}};
  }
  s.csv("fisher.csv", t);
  s.svg("fisher.svg", p);
}

void run_persistence(Session& s) {
  CsvTable t{{"t", "grid", "failures", "failures_outside_bar", "unconverged", "min_expansion"}, {}};
  CsvTable ft{{"t", "x", "y", "region"}, {}};
  json rows = json::array();
  for (double tv : s.cfg().persistence_ts) {
    const auto m = s.map().with_t(tv);
    RegionAtlas atlas(m, s.model().frame);
    const auto rep = s.timed("persistence t=" + fmt_num(tv), [&] {
      return anosov_persistence_check(m, s.cfg().persistence_grid, s.cfg().persistence_M, s.exec());
    });
    std::size_t outside = 0;
    for (const auto& q : rep.failure_points) {
      const auto lab = atlas.classify(q);
      if (!lab.in_bar()) ++outside;
      ft.add({fmt_num(tv), fmt_num(q.x), fmt_num(q.y), lab.name()});
    }
    t.add({fmt_num(tv), std::to_string(rep.grid), std::to_string(rep.failures), std::to_string(outside),
           std::to_string(rep.unconverged), fmt_num(rep.min_expansion)});
    rows.push_back({{"t", num(tv)}, {"failures", rep.failures}, {"failures_outside_bar", outside},
                    {"unconverged", rep.unconverged}, {"min_expansion", num(rep.min_expansion)},
                    {"anosov_witness", rep.failures == 0 && rep.min_expansion > 1.0}});
  }
  s.csv("persistence.csv", t);
  s.csv("persistence_failures.csv", ft);
  s.summary()["rows"] = rows;
}

using Runner = void (*)(Session&);

const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"map-check", run_map_check}, {"cones", run_cones},   {"tangency", run_tangency},
      {"conjugacy", run_conjugacy}, {"holder", run_holder}, {"spectrum", run_spectrum},
      {"shadow", run_shadow},       {"fisher", run_fisher}, {"persistence", run_persistence},
  };
  return r;
}

RunOutcome run_one(const std::string& name, Runner fn, const RunContext& ctx) {
  Session s(ctx, name);
  try {
    fn(s);
  } catch (const std::exception& e) {
    json& j = s.summary();
    j["status"] = "partial";
    j["error"] = e.what();
    try {
      write_json(ctx.out / (name + ".json"), j);
    } catch (const IoError&) {
    }
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ConfigError*>(&e)) throw;
    throw NumericFailure(name + ": " + e.what());
  }
  return s.finish();
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, f] : runners()) v.push_back(n);
    v.push_back("all");
    return v;
  }();
  return names;
}

RunOutcome run_subcommand(const std::string& name, const RunContext& ctx) {
  for (const auto& [n, fn] : runners())
    if (n == name) return run_one(n, fn, ctx);
  if (name != "all") throw ConfigError("subcommand", "unknown '" + name + "'");

  RunOutcome all;
  all.subcommand = "all";
  all.summary["subcommand"] = "all";
  all.summary["config"] = config_json(ctx.cfg);
  for (const auto& [n, fn] : runners()) {
    json entry;
    try {
      auto o = run_one(n, fn, ctx);
      entry = {{"status", o.numeric_ok ? "ok" : "numeric_failure"}, {"problems", o.problems}};
      all.artifacts.insert(all.artifacts.end(), o.artifacts.begin(), o.artifacts.end());
      if (!o.numeric_ok) {
        all.numeric_ok = false;
        for (const auto& p : o.problems) all.problems.push_back(n + ": " + p);
      }
    } catch (const NumericFailure& e) {
      entry = {{"status", "partial"}, {"error", e.what()}};
      all.numeric_ok = false;
      all.problems.push_back(e.what());
    }
    all.summary["runs"][n] = entry;
  }
  all.summary["status"] = all.numeric_ok ? "ok" : "numeric_failure";
  write_json(ctx.out / "all.json", all.summary);
  all.artifacts.push_back("all.json");
  return all;
}

int exit_code_for(const RunOutcome& o) { return o.numeric_ok ? 0 : 3; }

}  // namespace anosov

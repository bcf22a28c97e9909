#include "anosov/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace anosov {

std::string RegionLabel::name() const {
  switch (kind) {
    case RegionKind::BarForward: return "Bbar_" + std::to_string(n);
    case RegionKind::BarBackward: return "Bbar_-" + std::to_string(n);
    case RegionKind::Bn: return "B_" + std::to_string(n);
    case RegionKind::U: return "U";
    case RegionKind::V: return "V";
    case RegionKind::Outside: return "outside";
  }
  return "?";
}

RegionAtlas::RegionAtlas(const PerturbedMap& map, const HeteroclinicFrame& frame, AtlasParams params)
    : map_(map), frame_(frame), params_(params) {
  const int D = params_.depth;
  orbit_.resize(static_cast<std::size_t>(2 * D + 1));
  orbit_[static_cast<std::size_t>(D)] = map_.center();
  for (int n = 1; n <= D; ++n) {
    orbit_[static_cast<std::size_t>(D + n)] = map_.f(orbit_[static_cast<std::size_t>(D + n - 1)]);
    orbit_[static_cast<std::size_t>(D - n)] = map_.f_inv(orbit_[static_cast<std::size_t>(D - n + 1)]);
  }
  // forward orbit of R lies on the stable line of P between R and f(R) (sides alternate if mu_s < 0)
  const auto& e = map_.L().eig();
  const double s = frame_.s_r, t = frame_.t_r;
  s0_ = std::min({0.0, s, e.mu_s * s});
  s1_ = std::max({0.0, s, e.mu_s * s});
  t0_ = std::min({0.0, t / e.mu_u, t / (e.mu_u * e.mu_u)});
  t1_ = std::max({0.0, t / e.mu_u, t / (e.mu_u * e.mu_u)});
}

Vec2 RegionAtlas::local_coords(const TorusPoint& p, int n) const {
  return map_.L().eigen_coords(lift_delta(orbit(n), p));
}

double RegionAtlas::stable_segment_distance(const TorusPoint& p) const {
  return distance_to_segment(p, frame_.p, map_.L().eig().e_s, s0_, s1_);
}

double RegionAtlas::unstable_segment_distance(const TorusPoint& p) const {
  return distance_to_segment(p, frame_.q, map_.L().eig().e_u, t0_, t1_);
}

bool RegionAtlas::in_U(const TorusPoint& p) const { return in_B(p) || stable_segment_distance(p) <= w_u(); }

bool RegionAtlas::in_V(const TorusPoint& p) const {
  return distance(map_.L().apply(p), map_.center()) < map_.r() || unstable_segment_distance(p) <= w_v();
}

bool RegionAtlas::in_bar_forward(const TorusPoint& p, int n) const {
  const Vec2 c = local_coords(p, n);
  const double rt = rtilde(), l = lambda();
  return std::fabs(c.x) <= rt * std::pow(l, -n) && std::fabs(c.y) <= rt * std::pow(l, -3 * n);
}

bool RegionAtlas::in_bar_backward(const TorusPoint& p, int n) const {
  const Vec2 c = local_coords(p, -n);
  const double rt = rtilde(), l = lambda();
  return std::fabs(c.y) <= rt * std::pow(l, -(n - 1)) && std::fabs(c.x) <= rt * std::pow(l, -3 * (n - 1));
}

std::optional<int> RegionAtlas::b_index(const TorusPoint& p) const {
  TorusPoint q = p;
  for (int j = 0; j <= 5 * params_.depth; ++j) {
    if (in_B(q)) return j;
    if (!in_U(q)) return std::nullopt;
    q = map_.f_inv(q);
  }
  return std::nullopt;
}

RegionLabel RegionAtlas::classify(const TorusPoint& p) const {
  for (int n = 0; n <= params_.depth; ++n)
    if (in_bar_forward(p, n)) return {RegionKind::BarForward, n};
  for (int n = 1; n <= params_.depth; ++n)
    if (in_bar_backward(p, n)) return {RegionKind::BarBackward, n};
  if (const auto b = b_index(p)) return {RegionKind::Bn, *b};
  if (in_U(p)) return {RegionKind::U, 0};
  if (in_V(p)) return {RegionKind::V, 0};
  return {RegionKind::Outside, 0};
}

namespace {

TorusPoint draw_sample(const RegionAtlas& atlas, std::mt19937_64& g, std::uint8_t& kind, double d_min) {
  const auto& map = atlas.map();
  const int k = map.k();
  const auto& e = map.L().eig();
  const Vec2 nrm = normalized(perp(e.e_s));
  const double u = uniform01(g);
  if (u < 0.40) {
    kind = 0;
    return TorusPoint::make(uniform(g, 0, k), uniform(g, 0, k), k);
  }
  const TorusPoint& P = atlas.frame().p;
  if (u < 0.65) {
    kind = 1;
    const double s = uniform(g, atlas.seg_s0(), atlas.seg_s1());
    const double w = uniform(g, -atlas.w_u(), atlas.w_u());
    return translate(P, e.e_s * s + nrm * w);
  }
  if (u < 0.80) {
    kind = 2;
    const int n = static_cast<int>(uniform01(g) * (atlas.params().depth + 1));
    const double rt = atlas.rtilde(), l = atlas.lambda();
    const double x = uniform(g, -3.0, 3.0) * rt * std::pow(l, -n);
    const double y = uniform(g, -3.0, 3.0) * rt * std::pow(l, -3 * n);
    return translate(atlas.orbit(n), e.e_u * x + e.e_s * y);
  }
  if (u < 0.90) {
    kind = 3;
    const double rho = atlas.r() * std::sqrt(uniform01(g));
    const double a = uniform(g, 0.0, 2.0 * std::numbers::pi);
    return translate(map.center(), Vec2{std::cos(a), std::sin(a)} * rho);
  }
  kind = 4;
  const double d = d_min * std::pow(atlas.w_u() / d_min, uniform01(g));
  const double s = uniform(g, atlas.seg_s0(), atlas.seg_s1());
  return translate(P, e.e_s * s + nrm * (uniform01(g) < 0.5 ? -d : d));
}

}  // namespace

ConeReport verify_cone_conditions(const PerturbedMap& map, const RegionAtlas& atlas, const ConeOptions& opt, Exec exec) {
  ConeReport rep;
  rep.samples = opt.samples;
  rep.rows.resize(opt.samples);
  const auto eu = ProjectiveDirection::from_vector(map.L().eig().e_u);
  const auto es = ProjectiveDirection::from_vector(map.L().eig().e_s);

  for_each_index(opt.samples, exec, [&](std::size_t i) {
    auto g = rng_stream(opt.seed, i);
    ConeSample& s = rep.rows[i];
    s.p = draw_sample(atlas, g, s.kind, opt.d_min);
    s.label = atlas.classify(s.p);
    const DirectionResult du = unstable_direction(map, s.p, opt.dir);
    const DirectionResult ds = stable_direction(map, s.p, opt.dir);
    s.converged = du.converged && ds.converged;
    s.tan_u_eu = angle_tan(du.dir, eu);
    s.tan_u_es = angle_tan(du.dir, es);
    s.tan_s_es = angle_tan(ds.dir, es);
    s.rho = distance(s.p, map.center());
    s.d_stable = atlas.stable_segment_distance(s.p);
    s.in_U = atlas.in_U(s.p);
    s.in_V = atlas.in_V(s.p);
    const auto bi = atlas.b_index(s.p);
    s.in_binf = bi.has_value();
    if (bi && s.converged) {
      // tau is measured at the preimage in B, which for n = 0 is the point itself
      const TorusPoint pre = *bi == 0 ? s.p : map.iterate(s.p, -*bi);
      const double rho = distance(pre, map.center());
      if (rho > 0.0) {
        const DirectionResult dp = *bi == 0 ? du : unstable_direction(map, pre, opt.dir);
        if (dp.converged) s.tau_candidate = angle_tan(dp.dir, es) / rho;
      }
    }
  });

  rep.tau = std::numeric_limits<double>::infinity();
  for (const auto& s : rep.rows)
    if (s.converged) rep.tau = std::fmin(rep.tau, s.tau_candidate);
  rep.xi = rep.tau * atlas.rtilde();
  rep.min_lemma_ratio = std::numeric_limits<double>::infinity();

  const double lo = std::log(opt.d_min), hi = std::log(atlas.w_u());
  const int nb = opt.envelope_bins;
  std::vector<double> bin_max(static_cast<std::size_t>(nb), -1.0), bin_d(static_cast<std::size_t>(nb), 0.0);
  for (const auto& s : rep.rows) {
    if (!s.converged) {
      ++rep.unconverged;
      if (s.label.in_bar()) ++rep.unconverged_in_bar;
      continue;
    }
    if (!s.in_U) {
      rep.eps_measured_u = std::fmax(rep.eps_measured_u, s.tan_u_eu);
      if (!(s.tan_u_eu < opt.epsilon)) ++rep.violations_t4_u;
    }
    if (!s.in_V) {
      rep.eps_measured_s = std::fmax(rep.eps_measured_s, s.tan_s_es);
      if (!(s.tan_s_es < opt.epsilon)) ++rep.violations_t4_s;
    }
    if (!s.in_binf) {
      rep.max_tan_outside_binf = std::fmax(rep.max_tan_outside_binf, s.tan_u_eu);
      if (!(s.tan_u_eu < 1.0)) ++rep.violations_binf;
    }
    if (s.in_U && !s.label.in_bar()) {
      rep.min_lemma_ratio = std::fmin(rep.min_lemma_ratio, s.tan_u_es / rep.xi);
      if (!(s.tan_u_es >= rep.xi)) ++rep.violations_lemma;
    }
    if (s.in_U && s.d_stable >= opt.d_min) {
      rep.kappa = std::fmax(rep.kappa, s.tan_s_es / (s.d_stable * s.d_stable));
      const double ld = std::log(s.d_stable);
      if (ld < hi) {
        const int b = std::clamp(static_cast<int>((ld - lo) / (hi - lo) * nb), 0, nb - 1);
        if (s.tan_s_es > bin_max[static_cast<std::size_t>(b)]) {
          bin_max[static_cast<std::size_t>(b)] = s.tan_s_es;
          bin_d[static_cast<std::size_t>(b)] = s.d_stable;
        }
      }
    }
  }
  std::vector<double> lx, ly;
  for (int b = 0; b < nb; ++b) {
    if (bin_max[static_cast<std::size_t>(b)] <= 0.0) continue;
    rep.envelope_d.push_back(bin_d[static_cast<std::size_t>(b)]);
    rep.envelope_tan.push_back(bin_max[static_cast<std::size_t>(b)]);
    lx.push_back(std::log(bin_d[static_cast<std::size_t>(b)]));
    ly.push_back(std::log(bin_max[static_cast<std::size_t>(b)]));
  }
  if (lx.size() >= 2) rep.prop_slope = fit_line(lx, ly).first;
  return rep;
}

}  // namespace anosov

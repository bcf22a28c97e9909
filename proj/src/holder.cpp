#include "anosov/holder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace anosov {

std::vector<double> scale_ladder(double s0, int count) {
  std::vector<double> s;
  for (int j = 0; j < count; ++j) s.push_back(std::ldexp(s0, -j));
  return s;
}

ExponentFit fit_envelope(std::vector<ScaleRow> rows, const std::string& strategy) {
  ExponentFit fit;
  fit.strategy = strategy;
  std::vector<double> lx, ly;
  for (const auto& r : rows) {
    if (r.pairs == 0 || !(r.worst > 0.0)) continue;
    lx.push_back(std::log(r.scale));
    ly.push_back(std::log(r.worst));
  }
  fit.rows = std::move(rows);
  if (lx.size() < 2) return fit;
  const auto [slope, icpt] = fit_line(lx, ly);
  fit.exponent = slope;
  fit.constant = std::exp(icpt);
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) ss += std::pow(ly[i] - (icpt + slope * lx[i]), 2);
  fit.residual = std::sqrt(ss / static_cast<double>(lx.size()));
  // rows run from coarse to fine
  for (std::size_t i = 1; i < lx.size(); ++i)
    if (ly[i] - slope * lx[i] > ly[i - 1] - slope * lx[i - 1] + 1e-12) ++fit.monotone_breaks;
  return fit;
}

ExponentFit estimate_exponent(const PointMap& eval, const PairSampler& sampler, const std::vector<double>& scales,
                              const HolderOptions& opt, const std::string& strategy, Exec exec) {
  if (scales.size() < 5) throw DomainError("estimate_exponent needs at least 5 scales");
  const std::size_t P = opt.pairs_per_scale;
  std::vector<double> dist(scales.size() * P, -1.0);
  for_each_index(scales.size() * P, exec, [&](std::size_t idx) {
    const double s = scales[idx / P];
    auto g = rng_stream(opt.seed, idx);
    for (int tries = 0; tries < 64; ++tries) {
      const auto pr = sampler(g, s);
      if (!pr || std::fabs(pr->d - s) >= 0.25 * s) continue;
      const auto ha = eval(pr->a), hb = eval(pr->b);
      if (ha && hb) dist[idx] = distance(*ha, *hb);
      return;
    }
  });
  std::vector<ScaleRow> rows;
  for (std::size_t j = 0; j < scales.size(); ++j) {
    ScaleRow row;
    row.scale = scales[j];
    for (std::size_t p = 0; p < P; ++p) {
      const double d = dist[j * P + p];
      if (d < 0.0) {
        ++row.failures;
        continue;
      }
      ++row.pairs;
      row.worst = std::fmax(row.worst, d);
    }
    if (static_cast<double>(row.failures) > opt.failure_budget * static_cast<double>(P))
      throw DomainError(strategy + ": " + std::to_string(row.failures) + " evaluator failures at scale " +
                        std::to_string(row.scale));
    rows.push_back(row);
  }
  return fit_envelope(std::move(rows), strategy);
}

PointMap h_map(const PerturbedMap& map, int N) {
  return [map, N](const TorusPoint& x) -> std::optional<TorusPoint> { return conjugacy_eval(map, x, N); };
}

PointMap h_inverse_map(const PerturbedMap& map, int N, double tol, const ConjugacyGrid* grid) {
  return [map, N, tol, grid](const TorusPoint& y) -> std::optional<TorusPoint> {
    const InverseResult r = conjugacy_inverse(map, y, N, tol, grid);
    if (!r.converged) return std::nullopt;
    return r.x;
  };
}

namespace {

Vec2 random_unit(std::mt19937_64& g) {
  const double a = uniform(g, 0.0, std::numbers::pi);
  return {std::cos(a), std::sin(a)};
}

}  // namespace

PairSampler uniform_pairs(int k) {
  return [k](std::mt19937_64& g, double s) -> std::optional<SamplePair> {
    const TorusPoint a = TorusPoint::make(uniform(g, 0, k), uniform(g, 0, k), k);
    return SamplePair{a, translate(a, random_unit(g) * s), s};
  };
}

PairSampler outside_u_pairs(const RegionAtlas& atlas) {
  const int k = atlas.map().k();
  return [&atlas, k](std::mt19937_64& g, double s) -> std::optional<SamplePair> {
    const TorusPoint a = TorusPoint::make(uniform(g, 0, k), uniform(g, 0, k), k);
    const TorusPoint b = translate(a, random_unit(g) * s);
    if (atlas.in_U(a) || atlas.in_U(b)) return std::nullopt;
    return SamplePair{a, b, s};
  };
}

PairSampler near_orbit_pairs(const RegionAtlas& atlas, int n_max) {
  n_max = std::min(n_max, atlas.params().depth);
  return [&atlas, n_max](std::mt19937_64& g, double s) -> std::optional<SamplePair> {
    const int n = static_cast<int>(uniform01(g) * (n_max + 1));
    const auto& e = atlas.map().L().eig();
    const double rt = atlas.rtilde(), l = atlas.lambda();
    const Vec2 off = e.e_u * (uniform(g, -1, 1) * rt * std::pow(l, -n)) + e.e_s * (uniform(g, -1, 1) * rt * std::pow(l, -3 * n));
    const TorusPoint c = translate(atlas.orbit(n), off);
    const Vec2 d = random_unit(g) * (0.5 * s);
    return SamplePair{translate(c, d), translate(c, d * -1.0), s};
  };
}

PairSampler leaf_pairs(const PerturbedMap& map, Orientation o, const LeafOptions& lopt) {
  return [map, o, lopt](std::mt19937_64& g, double s) -> std::optional<SamplePair> {
    const int k = map.k();
    // half the starts within 2r of R, where the leaves bend
    TorusPoint a;
    if (uniform01(g) < 0.5) {
      a = TorusPoint::make(uniform(g, 0, k), uniform(g, 0, k), k);
    } else {
      const double rho = 2.0 * map.r() * std::sqrt(uniform01(g));
      const double ang = uniform(g, 0, 2 * std::numbers::pi);
      a = translate(map.center(), Vec2{std::cos(ang), std::sin(ang)} * rho);
    }
    LeafOptions lo = lopt;
    lo.h0 = std::min(lo.h0, s / 4);
    // leaves through the sharp bends near f^n(R), n large, need tiny steps; redraw those
    lo.max_steps = std::min<std::size_t>(lo.max_steps, 4000);
    const LeafSegment seg = integrate_leaf(map, a, o, uniform01(g) < 0.5 ? s : -s, lo);
    if (seg.truncated) return std::nullopt;
    return SamplePair{a, seg.points.back(), seg.arclength};
  };
}

PairSampler linear_leaf_pairs(const ToralAutomorphism& L, Orientation o) {
  const Vec2 e = o == Orientation::Unstable ? L.eig().e_u : L.eig().e_s;
  const int k = L.k();
  return [e, k](std::mt19937_64& g, double s) -> std::optional<SamplePair> {
    const TorusPoint a = TorusPoint::make(uniform(g, 0, k), uniform(g, 0, k), k);
    return SamplePair{a, translate(a, e * (uniform01(g) < 0.5 ? s : -s)), s};
  };
}

PairSampler calibration_pairs(int k) {
  return [k](std::mt19937_64& g, double s) -> std::optional<SamplePair> {
    // offset u*s from the singular endpoint, u log-uniform in [1e-6, 2]
    const double u = 1e-6 * std::pow(2e6, uniform01(g));
    const double x = u * s;
    if (x + s > 1.0) return std::nullopt;
    return SamplePair{TorusPoint::make(x, 0.0, k), TorusPoint::make(x + s, 0.0, k), s};
  };
}

PointMap power_map(double beta, int k) {
  return [beta, k](const TorusPoint& p) -> std::optional<TorusPoint> {
    return TorusPoint::make(std::pow(p.x, beta), p.y, k);
  };
}

std::string stratum_of(const RegionLabel& l) {
  switch (l.kind) {
    case RegionKind::BarForward: return l.n == 0 ? "Bbar_0" : "Bbar_n";
    case RegionKind::BarBackward: return "Bbar_-n";
    case RegionKind::Bn: return "B_n";
    case RegionKind::U: return "U";
    case RegionKind::V: return "V";
    case RegionKind::Outside: return "outside-U";
  }
  return "?";
}

std::vector<StratumFit> tube_exponent_scan(const PerturbedMap& map, const RegionAtlas& atlas, const PointMap& eval,
                                           const std::vector<double>& scales, const HolderOptions& opt, Exec exec) {
  const PairSampler uni = uniform_pairs(map.k());
  const PairSampler near0 = near_orbit_pairs(atlas, 0);
  const PairSampler near = near_orbit_pairs(atlas, 6);
  const auto& e = map.L().eig();
  const Vec2 nrm = normalized(perp(e.e_s));
  const PairSampler tube = [&atlas, &e, nrm](std::mt19937_64& g, double s) -> std::optional<SamplePair> {
    const double t = uniform(g, atlas.seg_s0(), atlas.seg_s1());
    const TorusPoint c = translate(atlas.frame().p, e.e_s * t + nrm * uniform(g, -atlas.w_u(), atlas.w_u()));
    const Vec2 d = random_unit(g) * (0.5 * s);
    return SamplePair{translate(c, d), translate(c, d * -1.0), s};
  };
  const std::size_t P = opt.pairs_per_scale;
  struct Rec {
    std::string stratum;
    double d = -1.0;
  };
  std::vector<Rec> rec(scales.size() * P);
  for_each_index(rec.size(), exec, [&](std::size_t idx) {
    const double s = scales[idx / P];
    auto g = rng_stream(opt.seed, idx);
    const double u = uniform01(g);
    const PairSampler& smp = u < 0.4 ? uni : u < 0.6 ? near0 : u < 0.8 ? near : tube;
    const auto pr = smp(g, s);
    if (!pr) return;
    const TorusPoint mid = translate(pr->a, lift_delta(pr->a, pr->b) * 0.5);
    rec[idx].stratum = stratum_of(atlas.classify(mid));
    const auto ha = eval(pr->a), hb = eval(pr->b);
    if (ha && hb) rec[idx].d = distance(*ha, *hb);
  });
  std::map<std::string, std::vector<ScaleRow>> by;
  for (const char* name : {"outside-U", "U", "B_n", "Bbar_0", "Bbar_n", "Bbar_-n", "V"}) {
    auto& rows = by[name];
    for (double s : scales) rows.push_back({s, 0.0, 0, 0});
  }
  for (std::size_t idx = 0; idx < rec.size(); ++idx) {
    if (rec[idx].stratum.empty()) continue;
    ScaleRow& row = by[rec[idx].stratum][idx / P];
    if (rec[idx].d < 0.0) {
      ++row.failures;
      continue;
    }
    ++row.pairs;
    row.worst = std::fmax(row.worst, rec[idx].d);
  }
  std::vector<StratumFit> out;
  for (auto& [name, rows] : by) {
    StratumFit sf;
    sf.stratum = name;
    sf.available = std::all_of(rows.begin(), rows.end(), [](const ScaleRow& r) { return r.pairs >= 100; });
    sf.fit = fit_envelope(rows, name);
    out.push_back(std::move(sf));
  }
  return out;
}

}  // namespace anosov

#include "anosov/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace anosov {

double PeriodicOrbitRecord::margin() const {
  return std::fmin(std::fabs(std::log(rate_lo)), std::fabs(std::log(rate_hi)));
}

namespace {

Vec2 periodic_defect(const PerturbedMap& map, const TorusPoint& x, int p) {
  return lift_delta(x, map.iterate(x, p));
}

}  // namespace

void fill_eigen(const PerturbedMap& map, PeriodicOrbitRecord& rec) {
  Mat2 D = Mat2::identity();
  TorusPoint q = rec.point;
  for (int i = 0; i < rec.period; ++i) {
    D = map.df(q) * D;
    q = map.f(q);
  }
  const double tr = D.trace(), det = D.det();
  const double disc = tr * tr - 4.0 * det;
  double m1 = 0.0, m2 = 0.0;
  if (disc < 0.0) {
    m1 = m2 = std::sqrt(std::fabs(det));
    rec.hyperbolic = false;
  } else {
    // larger root first, the other from the determinant to avoid cancellation
    const double big = 0.5 * (tr + std::copysign(std::sqrt(disc), tr));
    m1 = std::fabs(big);
    m2 = big != 0.0 ? std::fabs(det / big) : 0.0;
    rec.hyperbolic = true;
  }
  rec.mag_lo = std::fmin(m1, m2);
  rec.mag_hi = std::fmax(m1, m2);
  rec.rate_lo = std::pow(rec.mag_lo, 1.0 / rec.period);
  rec.rate_hi = std::pow(rec.mag_hi, 1.0 / rec.period);
  rec.unimodularity = std::fabs(rec.mag_lo * rec.mag_hi - 1.0);
  if (rec.hyperbolic) rec.hyperbolic = rec.margin() > 0.0;
}

PeriodicOrbitRecord refine_periodic_point(const PerturbedMap& map, const TorusPoint& seed, int period,
                                          const RefineOptions& opt) {
  PeriodicOrbitRecord rec;
  rec.period = period;
  TorusPoint x = seed;
  Vec2 F = periodic_defect(map, x, period);
  double res = norm(F);
  for (int it = 0; it < opt.max_iter && res > opt.target; ++it) {
    ++rec.iterations;
    const double h = opt.fd_step;
    const Vec2 cx = (periodic_defect(map, translate(x, {h, 0.0}), period) - F) * (1.0 / h);
    const Vec2 cy = (periodic_defect(map, translate(x, {0.0, h}), period) - F) * (1.0 / h);
    const Mat2 J = Mat2::columns(cx, cy);
    const double det = J.det();
    if (std::fabs(det) < 1e-300) break;
    const Vec2 step = Mat2{J.d, -J.b, -J.c, J.a} * F * (-1.0 / det);
    bool moved = false;
    for (double a = 1.0; a > 1e-6; a *= opt.damping) {
      const TorusPoint xn = translate(x, step * a);
      const Vec2 Fn = periodic_defect(map, xn, period);
      if (norm(Fn) < res) {
        x = xn;
        F = Fn;
        res = norm(Fn);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  rec.point = x;
  rec.residual = distance(map.iterate(x, period), x);
  rec.converged = rec.residual < opt.target;
  fill_eigen(map, rec);
  return rec;
}

TransportReport transported_periodic_points(const PerturbedMap& map, const ConjugacyGrid* grid, int period,
                                            const RefineOptions& opt, Exec exec) {
  TransportReport rep;
  rep.period = period;
  rep.expected = periodic_point_count(map.L().matrix(), period);
  const auto ys = periodic_points_linear(map.L(), period);
  const int N = series_depth(map, 1e-9);
  std::vector<PeriodicOrbitRecord> all(ys.size());
  for_each_index(ys.size(), exec, [&](std::size_t i) {
    const InverseResult inv = conjugacy_inverse(map, ys[i], N, 1e-8, grid);
    all[i] = refine_periodic_point(map, inv.x, period, opt);
  });
  for (const auto& r : all) {
    if (!r.converged) {
      ++rep.failures;
      continue;
    }
    const bool dup = std::any_of(rep.records.begin(), rep.records.end(),
                                 [&](const PeriodicOrbitRecord& o) { return distance(o.point, r.point) < 1e-7; });
    if (dup) {
      ++rep.duplicates;
      continue;
    }
    rep.records.push_back(r);
  }
  return rep;
}

bool SpectrumEstimate::counts_match() const {
  return std::all_of(periods.begin(), periods.end(), [](const TransportReport& r) { return r.counts_match(); });
}

SpectrumEstimate periodic_spectrum(const PerturbedMap& map, const ConjugacyGrid* grid, int period_cap,
                                   const RefineOptions& opt, Exec exec) {
  SpectrumEstimate est;
  est.min_log_rate = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= period_cap; ++p) {
    TransportReport rep = transported_periodic_points(map, grid, p, opt, exec);
    est.failures += rep.failures;
    est.duplicates += rep.duplicates;
    for (const auto& r : rep.records) {
      est.rates.push_back(r.rate_lo);
      est.rates.push_back(r.rate_hi);
      est.min_log_rate = std::fmin(est.min_log_rate, r.margin());
      est.max_unimodularity = std::fmax(est.max_unimodularity, r.unimodularity);
      if (!r.hyperbolic) ++est.non_hyperbolic;
    }
    est.periods.push_back(std::move(rep));
  }
  std::sort(est.rates.begin(), est.rates.end());
  return est;
}

namespace {

ProbeValue direct_value(const PerturbedMap& map, const TorusPoint& x, Vec2 v, int n) {
  ProbeValue pv;
  pv.n = n;
  TorusPoint q = x;
  Vec2 w = normalized(v);
  double acc = std::log(norm(v));
  for (int i = 0; i < std::abs(n); ++i) {
    if (n > 0) {
      w = map.df(q) * w;
      q = map.f(q);
    } else {
      w = map.df_inv(q) * w;
      q = map.f_inv(q);
    }
    const double nw = norm(w);
    acc += std::log(nw);
    w = w / nw;
  }
  pv.log_norm = acc;
  return pv;
}

ProbeValue pullback_value(const PerturbedMap& map, const TorusPoint& x, Vec2 v, int n) {
  ProbeValue pv;
  pv.n = n;
  const int m = std::abs(n);
  std::vector<TorusPoint> orbit{x};
  for (int i = 0; i < m; ++i) orbit.push_back(n > 0 ? map.f(orbit.back()) : map.f_inv(orbit.back()));
  // start with the L-contracted direction at the far end and come back with the inverse cocycle
  Vec2 u = n > 0 ? map.L().eig().e_s : map.L().eig().e_u;
  double acc = 0.0;
  for (int j = m; j >= 1; --j) {
    u = n > 0 ? map.df_inv(orbit[j]) * u : map.df(orbit[j]) * u;
    const double nu = norm(u);
    acc += std::log(nu);
    u = u / nu;
  }
  pv.log_norm = std::log(norm(v)) - acc;
  pv.alignment = std::atan2(std::fabs(cross(u, v)), std::fabs(dot(u, v)));
  return pv;
}

}  // namespace

std::vector<ProbeValue> growth_rate_probe(const PerturbedMap& map, const TorusPoint& x, Vec2 v,
                                          const std::vector<int>& n_grid, ProbeMode mode) {
  std::vector<ProbeValue> out;
  for (int n : n_grid) {
    ProbeValue pv;
    if (n == 0 || mode == ProbeMode::Direct) {
      pv = direct_value(map, x, v, n);
    } else {
      pv = pullback_value(map, x, v, n);
      if (mode == ProbeMode::Auto && pv.alignment >= 1e-8) pv = direct_value(map, x, v, n);
    }
    pv.rate = n != 0 ? pv.log_norm / n : 0.0;
    out.push_back(pv);
  }
  return out;
}

double weyl_residual(const PerturbedMap& map, const TorusPoint& x, Vec2 v, int N) {
  std::vector<int> grid;
  for (int n = -N; n <= N + 1; ++n) grid.push_back(n);
  const auto pr = growth_rate_probe(map, x, v, grid);
  double mass = 0.0;
  for (const auto& p : pr)
    if (p.n <= N) mass += std::exp(2.0 * p.log_norm);
  // f_* X agrees with X except at f^{N+1}x (new mass) and f^{-N}x (nothing maps there)
  const double leak = std::exp(2.0 * pr.back().log_norm) + std::exp(2.0 * pr.front().log_norm);
  return std::sqrt(leak / mass);
}

}  // namespace anosov

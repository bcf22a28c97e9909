#include "anosov/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "anosov/cocycle.hpp"
#include "anosov/spectrum.hpp"

namespace anosov {

double pseudo_orbit_defect(const StepMap& g, const std::vector<TorusPoint>& pts) {
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) e = std::fmax(e, distance(g(pts[i]), pts[i + 1]));
  return e;
}

StepMap step_of(const PerturbedMap& map) {
  return [map](const TorusPoint& p) { return map.f(p); };
}

StepMap step_of(const ToralAutomorphism& L) {
  return [L](const TorusPoint& p) { return L.apply(p); };
}

namespace {

constexpr int kPullbackMargin = 40;

// f^n(x) for n = -N..N (index n + N); the same floating-point orbit everywhere it is needed
std::vector<TorusPoint> orbit_window(const PerturbedMap& map, const TorusPoint& x, int N) {
  std::vector<TorusPoint> z(static_cast<std::size_t>(2 * N + 1));
  z[static_cast<std::size_t>(N)] = x;
  for (int n = 1; n <= N; ++n) {
    z[static_cast<std::size_t>(N + n)] = map.f(z[static_cast<std::size_t>(N + n - 1)]);
    z[static_cast<std::size_t>(N - n)] = map.f_inv(z[static_cast<std::size_t>(N - n + 1)]);
  }
  return z;
}

double angle(Vec2 a, Vec2 b) { return std::atan2(std::fabs(cross(a, b)), std::fabs(dot(a, b))); }

// One side of the tangent sequence: out[n] = Df^{sign n} v for n = 0..N.
std::vector<Vec2> tangent_side(const PerturbedMap& map, const TorusPoint& x, Vec2 v, int N, int sign) {
  const int M = N + kPullbackMargin;
  std::vector<TorusPoint> z{x};
  for (int i = 0; i < M; ++i) z.push_back(sign > 0 ? map.f(z.back()) : map.f_inv(z.back()));
  // direction contracted along this side, brought back from the far end
  std::vector<Vec2> u(static_cast<std::size_t>(M + 1));
  std::vector<double> s(static_cast<std::size_t>(M + 1), 1.0);
  u[static_cast<std::size_t>(M)] = sign > 0 ? map.L().eig().e_s : map.L().eig().e_u;
  for (int j = M; j >= 1; --j) {
    const Vec2 a = sign > 0 ? map.df_inv(z[static_cast<std::size_t>(j)]) * u[static_cast<std::size_t>(j)]
                            : map.df(z[static_cast<std::size_t>(j)]) * u[static_cast<std::size_t>(j)];
    s[static_cast<std::size_t>(j)] = norm(a);
    u[static_cast<std::size_t>(j - 1)] = a / s[static_cast<std::size_t>(j)];
  }
  std::vector<Vec2> out(static_cast<std::size_t>(N + 1));
  out[0] = v;
  if (norm(v) > 0.0 && angle(u[0], v) < 1e-8) {
    const double sg = dot(u[0], v) >= 0.0 ? 1.0 : -1.0;
    double len = norm(v);
    for (int n = 1; n <= N; ++n) {
      len /= s[static_cast<std::size_t>(n)];
      out[static_cast<std::size_t>(n)] = u[static_cast<std::size_t>(n)] * (sg * len);
    }
    return out;
  }
  for (int n = 1; n <= N; ++n) {
    const auto& p = z[static_cast<std::size_t>(n - 1)];
    out[static_cast<std::size_t>(n)] =
        sign > 0 ? map.df(p) * out[static_cast<std::size_t>(n - 1)] : map.df_inv(p) * out[static_cast<std::size_t>(n - 1)];
  }
  return out;
}

}  // namespace

std::vector<Vec2> tangent_sequence(const PerturbedMap& map, const TorusPoint& x, Vec2 v, int N, double bound) {
  const auto fwd = tangent_side(map, x, v, N, 1);
  const auto bwd = tangent_side(map, x, v, N, -1);
  std::vector<Vec2> out(static_cast<std::size_t>(2 * N + 1));
  for (int n = 0; n <= N; ++n) {
    out[static_cast<std::size_t>(N + n)] = fwd[static_cast<std::size_t>(n)];
    out[static_cast<std::size_t>(N - n)] = bwd[static_cast<std::size_t>(n)];
  }
  for (int m = 0; m <= N; ++m)
    for (int n : {m, -m})
      if (norm(out[static_cast<std::size_t>(N + n)]) > bound)
        throw DomainError("tangent sequence unbounded: |Df^n v| = " + std::to_string(norm(out[static_cast<std::size_t>(N + n)])) +
                          " > " + std::to_string(bound) + " at n = " + std::to_string(n));
  return out;
}

TangentPseudoOrbit make_tangent_pseudo_orbit(const PerturbedMap& map, const TorusPoint& x, Vec2 v, double epsilon,
                                             int N) {
  const auto vs = tangent_sequence(map, x, v, N);
  TangentPseudoOrbit t;
  t.epsilon = epsilon;
  t.true_orbit = orbit_window(map, x, N);
  t.orbit.source = "tangent";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    t.orbit.points.push_back(translate(t.true_orbit[i], vs[i] * epsilon));
    t.delta = std::fmax(t.delta, distance(t.true_orbit[i], t.orbit.points[i]));
  }
  t.orbit.defect = pseudo_orbit_defect(step_of(map), t.orbit.points);
  t.c_tilde = epsilon > 0.0 ? t.orbit.defect / (epsilon * epsilon) : 0.0;
  return t;
}

double shadowing_constant(const ToralAutomorphism& L) {
  const Vec2 cu{L.eigen_coords({1.0, 0.0}).x, L.eigen_coords({0.0, 1.0}).x};
  const Vec2 cs{L.eigen_coords({1.0, 0.0}).y, L.eigen_coords({0.0, 1.0}).y};
  const double lam = L.lambda();
  return (norm(cu) + lam * norm(cs)) / (lam - 1.0);
}

PseudoOrbit random_pseudo_orbit(const ToralAutomorphism& L, int N, double xi, std::uint64_t seed) {
  auto g = rng_stream(seed, 0);
  const int k = L.k();
  PseudoOrbit po;
  po.source = "synthetic";
  TorusPoint y = TorusPoint::make(uniform(g, 0, k), uniform(g, 0, k), k);
  for (int n = -N; n <= N; ++n) {
    po.points.push_back(y);
    const double phi = uniform(g, 0, 2 * std::numbers::pi);
    y = translate(L.apply(y), {xi * std::cos(phi), xi * std::sin(phi)});
  }
  po.defect = pseudo_orbit_defect(step_of(L), po.points);
  return po;
}

ShadowingResult shadow_linear(const ToralAutomorphism& L, const PseudoOrbit& pseudo) {
  const int N = pseudo.N();
  const std::size_t size = pseudo.points.size();
  const double mu_u = L.eig().mu_u, mu_s = L.eig().mu_s;
  ShadowingResult res;
  // d_n in eigen coordinates, index n + N for n = -N..N-1
  std::vector<Vec2> d(size - 1);
  for (std::size_t i = 0; i + 1 < size; ++i) {
    const Vec2 dn = lift_delta(L.apply(pseudo.points[i]), pseudo.points[i + 1]);
    res.xi = std::fmax(res.xi, norm(dn));
    d[i] = L.eigen_coords(dn);
  }
  // w^u_n = (w^u_{n+1} + d^u_n)/mu_u from the right end, w^s_{n+1} = mu_s w^s_n - d^s_n from the left
  std::vector<double> wu(size, 0.0), ws(size, 0.0);
  for (std::size_t i = size - 1; i-- > 0;) wu[i] = (wu[i + 1] + d[i].x) / mu_u;
  for (std::size_t i = 1; i < size; ++i) ws[i] = mu_s * ws[i - 1] - d[i - 1].y;
  res.w.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    res.w[i] = L.from_eigen_coords({wu[i], ws[i]});
    res.delta = std::fmax(res.delta, norm(res.w[i]));
  }
  res.x = translate(pseudo.at(0), res.w[static_cast<std::size_t>(N)]);
  res.C = shadowing_constant(L);
  res.boundary = res.C * res.xi * std::pow(L.lambda(), -N);
  return res;
}

double recompute_delta(const ToralAutomorphism& L, const PseudoOrbit& pseudo, const TorusPoint& x) {
  const int N = pseudo.N();
  double delta = distance(x, pseudo.at(0));
  TorusPoint f = x, b = x;
  for (int n = 1; n <= N; ++n) {
    f = L.apply(f);
    b = L.apply_inv(b);
    delta = std::fmax(delta, std::fmax(distance(f, pseudo.at(n)), distance(b, pseudo.at(-n))));
  }
  return delta;
}

QuasiAnosovReport quasi_anosov_probe(const PerturbedMap& map, const TorusPoint& x, Vec2 v, int N, double threshold) {
  QuasiAnosovReport rep;
  std::vector<int> grid;
  for (int n = -N; n <= N; ++n) grid.push_back(n);
  const auto pr = growth_rate_probe(map, x, v, grid, ProbeMode::Auto);
  for (const auto& p : pr) {
    const double nv = std::exp(p.log_norm);
    rep.n.push_back(p.n);
    rep.norms.push_back(nv);
    rep.max_norm = std::fmax(rep.max_norm, nv);
    if (nv > threshold && (rep.first_exceed == 0 || std::abs(p.n) < rep.first_exceed)) rep.first_exceed = std::abs(p.n);
  }
  rep.bounded = rep.max_norm <= threshold;
  return rep;
}

FisherReport fisher_experiment(const PerturbedMap& map, const TorusPoint& x, Vec2 v,
                               const std::vector<double>& epsilons, int N, FisherMode mode, Exec exec) {
  FisherReport rep;
  rep.mode = mode;
  const auto& L = map.L();
  rep.C = shadowing_constant(L);
  const auto vs = tangent_sequence(map, x, v, N);
  const auto z = orbit_window(map, x, N);
  const std::size_t size = z.size();
  const int depth = mode == FisherMode::Conjugacy ? series_depth(map, 1e-13) : 0;
  std::vector<TorusPoint> hz(size);
  if (mode == FisherMode::Conjugacy)
    for_each_index(size, exec, [&](std::size_t i) { hz[i] = conjugacy_eval(map, z[i], depth); });
  rep.bound_holds = true;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  std::vector<double> le, lx, ld;
  for (double eps : epsilons) {
    FisherRow row;
    row.epsilon = eps;
    PseudoOrbit po;
    po.points.resize(size);
    for_each_index(size, exec, [&](std::size_t i) {
      const TorusPoint y = translate(z[i], vs[i] * eps);
      po.points[i] = mode == FisherMode::Conjugacy ? conjugacy_eval(map, y, depth) : y;
    });
    const auto& ref = mode == FisherMode::Conjugacy ? hz : z;
    po.source = mode == FisherMode::Conjugacy ? "image" : "tangent";
    po.defect = mode == FisherMode::Conjugacy ? pseudo_orbit_defect(step_of(L), po.points)
                                              : pseudo_orbit_defect(step_of(map), po.points);
    row.xi = po.defect;
    for (std::size_t i = 0; i < size; ++i) row.delta = std::fmax(row.delta, distance(ref[i], po.points[i]));
    if (mode == FisherMode::Conjugacy) row.delta_series = shadow_linear(L, po).delta;
    row.bound = rep.C * row.xi;
    rep.bound_holds = rep.bound_holds && row.delta <= row.bound;
    rep.min_ratio = std::fmin(rep.min_ratio, row.delta / eps);
    rep.max_ratio = std::fmax(rep.max_ratio, row.delta / eps);
    le.push_back(std::log(eps));
    lx.push_back(std::log(row.xi));
    ld.push_back(std::log(row.delta));
    rep.rows.push_back(row);
  }
  if (le.size() >= 2) {
    rep.defect_exponent = fit_line(le, lx).first;
    rep.kappa = fit_line(lx, ld).first;
  }
  return rep;
}

}  // namespace anosov

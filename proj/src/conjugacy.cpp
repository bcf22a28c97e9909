#include "anosov/conjugacy.hpp"

#include <algorithm>
#include <cmath>

namespace anosov {

Vec2 forcing_term(const PerturbedMap& map, const TorusPoint& x) {
  const TorusPoint lx = map.L().apply(x);
  return lift_delta(lx, map.theta(lx));
}

int series_depth(const PerturbedMap& map, double tol, int cap) {
  const double lam = map.L().lambda();
  const double bound = 2.0 * map.r() / (1.0 - 1.0 / lam);
  const int N = std::max(1, static_cast<int>(std::ceil(std::log(tol / bound) / std::log(1.0 / lam))));
  if (N > cap)
    throw DomainError("series depth " + std::to_string(N) + " exceeds cap " + std::to_string(cap) +
                      " for tol " + std::to_string(tol));
  return N;
}

Vec2 displacement(const PerturbedMap& map, const TorusPoint& x, int N) {
  if (map.t() == 0.0) return {0.0, 0.0};
  const auto& L = map.L();
  const double mu_u = L.eig().mu_u, mu_s = L.eig().mu_s;
  // u = L^{-1}(p + u o f), split along e_u (forward sum) and e_s (backward sum)
  double uu = 0.0, w = 1.0 / mu_u;
  TorusPoint q = x;
  for (int n = 0; n < N; ++n) {
    uu += w * L.eigen_coords(forcing_term(map, q)).x;
    w /= mu_u;
    q = map.f(q);
  }
  double us = 0.0;
  w = 1.0;
  q = x;
  for (int n = 1; n <= N; ++n) {
    q = map.f_inv(q);
    us -= w * L.eigen_coords(forcing_term(map, q)).y;
    w *= mu_s;
  }
  return L.from_eigen_coords({uu, us});
}

TorusPoint conjugacy_eval(const PerturbedMap& map, const TorusPoint& x, int N) {
  return translate(x, displacement(map, x, N));
}

double conjugacy_residual(const PerturbedMap& map, const TorusPoint& x, int N) {
  return distance(conjugacy_eval(map, map.f(x), N), map.L().apply(conjugacy_eval(map, x, N)));
}

GridMeta grid_meta_for(const PerturbedMap& map, int resolution, double tol, int truncation) {
  GridMeta m;
  m.m = map.L().matrix();
  m.k = map.k();
  m.center = {map.center().x, map.center().y};
  m.r = map.r();
  m.t = map.t();
  m.profile = map.profile().kind;
  m.alpha = map.profile().alpha;
  m.resolution = resolution;
  m.tol = tol;
  m.truncation = truncation;
  return m;
}

Vec2 ConjugacyGrid::node_u(int i, int j) const {
  const int n = meta.resolution;
  i = ((i % n) + n) % n;
  j = ((j % n) + n) % n;
  const std::size_t idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
  return {ux[idx], uy[idx]};
}

TorusPoint ConjugacyGrid::node(int i, int j) const {
  return TorusPoint::make(i * spacing(), j * spacing(), meta.k);
}

Vec2 ConjugacyGrid::interpolate(const TorusPoint& x) const {
  const double gx = x.x / spacing(), gy = x.y / spacing();
  const int i = static_cast<int>(std::floor(gx)), j = static_cast<int>(std::floor(gy));
  const double fx = gx - i, fy = gy - j;
  return node_u(i, j) * ((1 - fx) * (1 - fy)) + node_u(i + 1, j) * (fx * (1 - fy)) +
         node_u(i, j + 1) * ((1 - fx) * fy) + node_u(i + 1, j + 1) * (fx * fy);
}

double ConjugacyGrid::max_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < ux.size(); ++i) m = std::fmax(m, std::hypot(ux[i], uy[i]));
  return m;
}

ConjugacyGrid build_grid(const PerturbedMap& map, int resolution, double tol, Exec exec) {
  if (resolution < 64 * map.k()) throw DomainError("grid resolution below 64 nodes per unit length");
  const int N = series_depth(map, tol);
  ConjugacyGrid g;
  g.meta = grid_meta_for(map, resolution, tol, N);
  const std::size_t n = static_cast<std::size_t>(resolution);
  g.ux.assign(n * n, 0.0);
  g.uy.assign(n * n, 0.0);
  for_each_index(n * n, exec, [&](std::size_t idx) {
    const Vec2 u = displacement(map, g.node(static_cast<int>(idx % n), static_cast<int>(idx / n)), N);
    g.ux[idx] = u.x;
    g.uy[idx] = u.y;
  });
  return g;
}

namespace {

Vec2 solve2(const Mat2& J, Vec2 r) {
  const double det = J.det();
  if (std::fabs(det) < 1e-300) return {0.0, 0.0};
  return Mat2{J.d, -J.b, -J.c, J.a} * r * (1.0 / det);
}

}  // namespace

InverseResult conjugacy_inverse(const PerturbedMap& map, const TorusPoint& y, int N, double tol,
                                const ConjugacyGrid* grid) {
  InverseResult res;
  const Vec2 u0 = grid ? grid->interpolate(y) : displacement(map, y, N);
  TorusPoint x = translate(y, u0 * -1.0);
  auto resid = [&](const TorusPoint& z) { return lift_delta(y, conjugacy_eval(map, z, N)); };
  const double target = 0.1 * tol;
  Vec2 r = resid(x);
  double best = norm(r);
  TorusPoint best_x = x;
  // damped fixed point x <- x - (h(x) - y)/2; h - id is C^0 small so this contracts away from the tangency orbit
  int stall = 0;
  for (int it = 0; it < 200 && best > target; ++it) {
    x = translate(x, r * -0.5);
    r = resid(x);
    ++res.iterations;
    const double nr = norm(r);
    if (nr < best * 0.999) {
      best = nr;
      best_x = x;
      stall = 0;
    } else if (++stall > 10) {
      break;
    }
  }
  if (best > target) {
    // Levenberg-Marquardt on the residual with a finite-difference Jacobian
    res.fallback = true;
    x = best_x;
    r = resid(x);
    double lm = 1e-3;
    for (int it = 0; it < 100 && best > target; ++it) {
      const double hstep = std::fmax(1e-9, std::fmin(1e-6, 10.0 * best));
      const Vec2 cx = (resid(translate(x, {hstep, 0.0})) - r) * (1.0 / hstep);
      const Vec2 cy = (resid(translate(x, {0.0, hstep})) - r) * (1.0 / hstep);
      const Mat2 J{cx.x, cy.x, cx.y, cy.y};
      const Mat2 JtJ = J.transpose() * J;
      const Vec2 g = J.transpose() * r;
      bool improved = false;
      for (int tries = 0; tries < 12; ++tries) {
        const Mat2 A{JtJ.a + lm, JtJ.b, JtJ.c, JtJ.d + lm};
        const TorusPoint xn = translate(x, solve2(A, g) * -1.0);
        const Vec2 rn = resid(xn);
        ++res.iterations;
        if (norm(rn) < 0.99 * best) {
          x = xn;
          r = rn;
          best = norm(rn);
          best_x = xn;
          lm = std::fmax(lm * 0.1, 1e-15);
          improved = true;
          break;
        }
        lm *= 10.0;
      }
      if (!improved) break;
    }
  }
  res.x = best_x;
  res.residual = best;
  res.converged = best < tol;
  return res;
}

InjectivityReport injectivity_probe(const ConjugacyGrid& g, double scale, std::size_t pairs, std::uint64_t seed,
                                    double collapse_tol) {
  InjectivityReport rep;
  rep.min_image_distance = std::numeric_limits<double>::infinity();
  rep.min_ratio = std::numeric_limits<double>::infinity();
  const int n = g.meta.resolution;
  const double h = g.spacing();
  const int reach = std::max(1, static_cast<int>(std::ceil(2.0 * scale / h)));
  auto gen = rng_stream(seed, 0);
  for (std::size_t p = 0; p < pairs; ++p) {
    const int i = static_cast<int>(uniform01(gen) * n), j = static_cast<int>(uniform01(gen) * n);
    int di = 0, dj = 0;
    double d = 0.0;
    do {
      di = static_cast<int>(std::lround(uniform(gen, -reach, reach)));
      dj = static_cast<int>(std::lround(uniform(gen, -reach, reach)));
      d = std::hypot(di * h, dj * h);
    } while (d < scale || d > 2.0 * scale);
    const TorusPoint a = translate(g.node(i, j), g.node_u(i, j));
    const TorusPoint b = translate(g.node(i + di, j + dj), g.node_u(i + di, j + dj));
    const double dh = distance(a, b);
    ++rep.pairs;
    rep.min_image_distance = std::fmin(rep.min_image_distance, dh);
    rep.min_ratio = std::fmin(rep.min_ratio, dh / d);
    if (dh < collapse_tol) ++rep.collapses;
  }
  return rep;
}

}  // namespace anosov

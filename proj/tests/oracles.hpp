// Independent reference computations for tests. They use only the map evaluations (f, L) and plain
// arithmetic, never the library routine they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "anosov/perturbation.hpp"
#include "anosov/shadowing.hpp"

namespace oracle {

using namespace anosov;

inline IntMat2 int_pow(IntMat2 m, int p) {
  IntMat2 r{1, 0, 0, 1};
  for (int i = 0; i < p; ++i) r = r * m;
  return r;
}

// Points x = k (i, j) / D on [0, k)^2 with (m^p - I)(i, j) = 0 mod D, D = |det(m^p - I)|.
// Every solution of (m^p - I) x in k Z^2 has this form since (m^p - I)^{-1} = adj / det.
inline std::vector<TorusPoint> linear_periodic_points(const IntMat2& m, int k, int p) {
  IntMat2 a = int_pow(m, p);
  a.a -= 1;
  a.d -= 1;
  const std::int64_t D = std::llabs(a.det());
  std::vector<TorusPoint> out;
  auto mod = [D](std::int64_t v) { return ((v % D) + D) % D; };
  for (std::int64_t i = 0; i < D; ++i)
    for (std::int64_t j = 0; j < D; ++j)
      if (mod(a.a * i + a.b * j) == 0 && mod(a.c * i + a.d * j) == 0)
        out.push_back(TorusPoint::make(double(k) * i / D, double(k) * j / D, k));
  return out;
}

// Seeds on an n x n lattice, plain Newton with its own central-difference Jacobian, duplicates merged.
inline std::vector<TorusPoint> scan_periodic_points(const PerturbedMap& f, int p, int n) {
  const int k = f.k();
  auto F = [&](const TorusPoint& x) { return lift_delta(x, f.iterate(x, p)); };
  std::vector<TorusPoint> found;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      TorusPoint x = TorusPoint::make(k * (i + 0.5) / n, k * (j + 0.5) / n, k);
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const Vec2 r = F(x);
        if (norm(r) < 1e-11) {
          ok = true;
          break;
        }
        const double h = 1e-7;
        const Vec2 cx = (F(translate(x, {h, 0})) - F(translate(x, {-h, 0}))) / (2 * h);
        const Vec2 cy = (F(translate(x, {0, h})) - F(translate(x, {0, -h}))) / (2 * h);
        const double det = cx.x * cy.y - cy.x * cx.y;
        if (std::fabs(det) < 1e-14) break;
        Vec2 step{(cy.y * r.x - cy.x * r.y) / det, (-cx.y * r.x + cx.x * r.y) / det};
        const double nn = norm(step);
        if (nn > 0.05) step = step * (0.05 / nn);  // stay in the basin of the nearest root
        x = translate(x, -1.0 * step);
      }
      if (!ok) continue;
      if (std::none_of(found.begin(), found.end(), [&](const TorusPoint& q) { return distance(q, x) < 1e-7; }))
        found.push_back(x);
    }
  return found;
}

// Golden-section minimum of a convex function on [lo, hi].
inline double golden_min(const std::function<double(double)>& g, double lo, double hi, int iters, double* arg = nullptr) {
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi, c = b - phi * (b - a), d = a + phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int i = 0; i < iters; ++i) {
    if (gc < gd) {
      b = d, d = c, gd = gc;
      c = b - phi * (b - a);
      gc = g(c);
    } else {
      a = c, c = d, gc = gd;
      d = a + phi * (b - a);
      gd = g(d);
    }
  }
  if (arg) *arg = 0.5 * (a + b);
  return std::min(gc, gd);
}

struct Minimax {
  double delta = 0.0;
  Vec2 w0;  // correction at n = 0
};

// min over w_0 of max_n |w_n|, w_{n+1} = L w_n - d_n, over the window extended by `extension` exact
// L-steps at both ends (zero defects there). The recursion runs in eigen coordinates from n = 0 in both
// directions, so the only amplification is lambda^{N + extension} on the optimizer's rounding.
inline Minimax minimax_shadow(const ToralAutomorphism& L, const PseudoOrbit& po, int extension = 12) {
  const int N = po.N();
  const auto& e = L.eig();
  std::vector<Vec2> d;  // d_n in eigen coordinates, n = -N..N-1
  double xi = 0;
  for (int n = -N; n < N; ++n) {
    const Vec2 dn = lift_delta(L.apply(po.at(n)), po.at(n + 1));
    xi = std::max(xi, norm(dn));
    d.push_back(L.eigen_coords(dn));
  }
  auto defect = [&](int n) { return (n >= -N && n < N) ? d[static_cast<std::size_t>(n + N)] : Vec2{0, 0}; };
  const int lo = -N - extension, hi = N + extension;
  auto F = [&](double a, double b) {
    double worst = 0;
    Vec2 c{a, b};
    for (int n = 0; n <= hi; ++n) {
      worst = std::max(worst, norm(L.from_eigen_coords(c)));
      const Vec2 dn = defect(n);
      c = {e.mu_u * c.x - dn.x, e.mu_s * c.y - dn.y};
    }
    c = {a, b};
    for (int n = -1; n >= lo; --n) {
      const Vec2 dn = defect(n);
      c = {(c.x + dn.x) / e.mu_u, (c.y + dn.y) / e.mu_s};
      worst = std::max(worst, norm(L.from_eigen_coords(c)));
    }
    return worst;
  };
  const double span = 10 * (xi + 1e-300);
  double a_best = 0, b_best = 0;
  const double best = golden_min(
      [&](double a) { return golden_min([&](double b) { return F(a, b); }, -span, span, 160); }, -span, span, 160,
      &a_best);
  golden_min([&](double b) { return F(a_best, b); }, -span, span, 160, &b_best);
  return {best, L.from_eigen_coords({a_best, b_best})};
}

}  // namespace oracle

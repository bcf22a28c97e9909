#include "anosov/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace anosov {

ProjectiveDirection ProjectiveDirection::from_vector(Vec2 v) {
  double a = std::atan2(v.y, v.x);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return {a};
}

double angle_between(const ProjectiveDirection& d1, const ProjectiveDirection& d2) {
  const Vec2 u1 = d1.unit(), u2 = d2.unit();
  return std::atan2(std::fabs(cross(u1, u2)), std::fabs(dot(u1, u2)));
}

double angle_tan(const ProjectiveDirection& d1, const ProjectiveDirection& d2) {
  const Vec2 u1 = d1.unit(), u2 = d2.unit();
  const double s = std::fabs(cross(u1, u2)), c = std::fabs(dot(u1, u2));
  if (c <= 1e-15 * s) return std::numeric_limits<double>::infinity();
  return s / c;
}

ProjectiveDirection push_direction(const PerturbedMap& map, const TorusPoint& p, ProjectiveDirection d, int n) {
  Vec2 v = d.unit();
  TorusPoint q = p;
  for (int i = 0; i < n; ++i) {
    v = normalized(map.df(q) * v);
    q = map.f(q);
  }
  for (int i = 0; i < -n; ++i) {
    v = normalized(map.df_inv(q) * v);
    q = map.f_inv(q);
  }
  return ProjectiveDirection::from_vector(v);
}

namespace {

// Pushes seed along the orbit stored in pts (pts[0] = p) from pts[depth] back to p.
template <bool Unstable>
Vec2 push_from_depth(const PerturbedMap& map, const std::vector<TorusPoint>& pts, int depth, Vec2 seed) {
  Vec2 v = seed;
  for (int j = depth; j >= 1; --j) {
    v = Unstable ? map.df(pts[j]) * v : map.df_inv(pts[j]) * v;
    v = normalized(v);
  }
  return v;
}

template <bool Unstable>
DirectionResult limit_direction(const PerturbedMap& map, const TorusPoint& p, const DirectionOptions& opt) {
  const Vec2 seed = Unstable ? map.L().eig().e_u : map.L().eig().e_s;
  std::vector<TorusPoint> pts;
  pts.reserve(static_cast<std::size_t>(opt.max_depth) + 1);
  pts.push_back(p);
  auto extend = [&](int depth) {
    while (static_cast<int>(pts.size()) <= depth)
      pts.push_back(Unstable ? map.f_inv(pts.back()) : map.f(pts.back()));
  };
  int depth = std::clamp(opt.min_depth, 1, opt.max_depth);
  extend(depth);
  Vec2 prev = push_from_depth<Unstable>(map, pts, depth, seed);
  DirectionResult res;
  while (true) {
    const int next = std::min(2 * depth, opt.max_depth);
    if (next == depth) {
      res.dir = ProjectiveDirection::from_vector(prev);
      res.depth = depth;
      res.converged = false;
      return res;
    }
    extend(next);
    const Vec2 cur = push_from_depth<Unstable>(map, pts, next, seed);
    const double diff = std::atan2(std::fabs(cross(prev, cur)), std::fabs(dot(prev, cur)));
    res.cauchy = diff;
    if (diff < opt.tol) {
      res.dir = ProjectiveDirection::from_vector(cur);
      res.depth = depth;
      res.converged = true;
      return res;
    }
    prev = cur;
    depth = next;
  }
}

}  // namespace

DirectionResult unstable_direction(const PerturbedMap& map, const TorusPoint& p, const DirectionOptions& opt) {
  return limit_direction<true>(map, p, opt);
}

DirectionResult stable_direction(const PerturbedMap& map, const TorusPoint& p, const DirectionOptions& opt) {
  return limit_direction<false>(map, p, opt);
}

ExpansionResult expansion_factor(const PerturbedMap& map, const TorusPoint& p, const DirectionOptions& opt) {
  const DirectionResult eu = unstable_direction(map, p, opt);
  return {norm(map.df(p) * eu.dir.unit()), eu.converged};
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

TangencyFit tangency_order(const PerturbedMap& map, int n_scales, double rho_max_factor, const DirectionOptions& opt) {
  TangencyFit fit;
  const Vec2 eu = map.L().eig().e_u;
  const ProjectiveDirection es = ProjectiveDirection::from_vector(map.L().eig().e_s);
  std::vector<double> lx, ly;
  double rho = rho_max_factor * map.r();
  for (int j = 0; j < n_scales; ++j, rho *= 0.5) {
    const TorusPoint S = map.theta(translate(map.center(), eu * rho));
    const DirectionResult d = unstable_direction(map, S, opt);
    const double tv = angle_tan(d.dir, es);
    fit.rho.push_back(rho);
    fit.tan_values.push_back(tv);
    if (!d.converged || !std::isfinite(tv) || tv <= 0.0) continue;
    lx.push_back(std::log(rho));
    ly.push_back(std::log(tv));
  }
  // E^u perpendicular to e_s (or bounded away from it) at every scale: no tangency to measure
  const bool all_transversal = std::all_of(fit.tan_values.begin(), fit.tan_values.end(),
                                           [](double v) { return !std::isfinite(v) || v > 1e3; });
  if (all_transversal) {
    fit.transversal = true;
    fit.slope = 0.0;
    return fit;
  }
  if (lx.size() < 3) throw DomainError("tangency_order: fewer than 3 usable scales");
  std::tie(fit.slope, fit.intercept) = fit_line(lx, ly);
  return fit;
}

PersistencePoint cone_persistence_point(const PerturbedMap& map, const TorusPoint& x, int M,
                                        const DirectionOptions& opt) {
  PersistencePoint out;
  const DirectionResult eu = unstable_direction(map, x, opt);
  const DirectionResult es = stable_direction(map, x, opt);
  out.converged = eu.converged && es.converged;
  Mat2 A = Mat2::identity();
  TorusPoint q = x;
  for (int i = 0; i < M; ++i) {
    A = map.df(q) * A;
    q = map.f(q);
  }
  const Vec2 u = eu.dir.unit(), s = es.dir.unit();
  out.du = norm(A * u);
  out.ds = norm(A * s);
  out.invariant = out.ds < out.du;
  double mn = std::numeric_limits<double>::infinity();
  for (int i = -20; i <= 20; ++i) {
    const Vec2 v = u + s * (i / 20.0);
    const double nv = norm(v);
    if (nv == 0.0) continue;
    mn = std::fmin(mn, norm(A * v) / nv);
  }
  out.min_expansion = mn;
  return out;
}

PersistenceReport anosov_persistence_check(const PerturbedMap& map, std::size_t grid, int M, Exec exec,
                                           const DirectionOptions& opt) {
  PersistenceReport rep;
  rep.t = map.t();
  rep.grid = grid;
  const std::size_t n = grid * grid;
  std::vector<PersistencePoint> res(n);
  const double h = static_cast<double>(map.k()) / static_cast<double>(grid);
  for_each_index(n, exec, [&](std::size_t i) {
    const auto x = TorusPoint::make((static_cast<double>(i % grid) + 0.5) * h, (static_cast<double>(i / grid) + 0.5) * h, map.k());
    res[i] = cone_persistence_point(map, x, M, opt);
  });
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = res[i];
    if (!r.converged) ++rep.unconverged;
    rep.min_expansion = std::fmin(rep.min_expansion, r.min_expansion);
    if (!r.converged || !r.invariant || !(r.min_expansion > 1.0)) {
      ++rep.failures;
      rep.failure_points.push_back(TorusPoint::make((static_cast<double>(i % grid) + 0.5) * h,
                                                    (static_cast<double>(i / grid) + 0.5) * h, map.k()));
    }
  }
  return rep;
}

}  // namespace anosov

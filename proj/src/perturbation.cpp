#include "anosov/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace anosov {

ProfileKind parse_profile(const std::string& s) {
  if (s == "quadratic") return ProfileKind::Quadratic;
  if (s == "power") return ProfileKind::Power;
  throw DomainError("unknown profile '" + s + "' (expected quadratic|power)");
}

std::string to_string(ProfileKind k) { return k == ProfileKind::Quadratic ? "quadratic" : "power"; }

std::pair<double, double> BumpProfile::eval(double rho) const {
  if (rho < 0.0) throw DomainError("gamma_eval: rho must be >= 0");
  constexpr double h = std::numbers::pi / 2.0;
  if (rho >= r) return {0.0, 0.0};
  if (kind == ProfileKind::Quadratic) {
    const double u = 1.0 - rho / r;
    return {h * u * u, -2.0 * h * u / r};
  }
  const double half = 0.5 * r;
  if (rho <= half) {
    const double q = std::pow(rho / r, alpha);
    // gamma' blows up at 0 for alpha < 1; report the one-sided limit
    const double gp = rho > 0.0 ? -h * alpha * q / rho : (alpha == 1.0 ? -h / r : (alpha < 1.0 ? -INFINITY : 0.0));
    return {h - h * q, gp};
  }
  // cubic Hermite from (r/2, g0, g0') to (r, 0, 0)
  const double q0 = std::pow(0.5, alpha);
  const double g0 = h - h * q0;
  const double g0p = -h * alpha * q0 / half;
  const double s = (rho - half) / half;
  const double h00 = (2.0 * s - 3.0) * s * s + 1.0;
  const double h10 = ((s - 2.0) * s + 1.0) * s;
  const double d00 = 6.0 * s * s - 6.0 * s;
  const double d10 = (3.0 * s - 4.0) * s + 1.0;
  return {h00 * g0 + h10 * half * g0p, (d00 * g0 + d10 * half * g0p) / half};
}

PerturbedMap::PerturbedMap(ToralAutomorphism L, TorusPoint center, BumpProfile profile, double t)
    : L_(std::move(L)), center_(center), profile_(profile), t_(t) {
  if (profile_.r <= 0.0 || 2.0 * profile_.r >= L_.k()) throw DomainError("bump radius r must satisfy 0 < 2r < k");
  if (t_ < 0.0 || t_ > 1.0) throw DomainError("parameter t must lie in [0,1]");
  if (profile_.kind == ProfileKind::Power && (profile_.alpha <= 0.0 || profile_.alpha > 2.0))
    throw DomainError("tangency alpha must lie in (0,2]");
}

TorusPoint PerturbedMap::theta(const TorusPoint& p) const {
  const Vec2 d = lift_delta(center_, p);
  const double rho = norm(d);
  if (rho >= profile_.r || t_ == 0.0) return p;
  const double phi = t_ * profile_.eval(rho).first;
  return translate(center_, Mat2::rotation_cw(phi) * d);
}

TorusPoint PerturbedMap::theta_inv(const TorusPoint& p) const {
  const Vec2 d = lift_delta(center_, p);
  const double rho = norm(d);
  if (rho >= profile_.r || t_ == 0.0) return p;
  const double phi = t_ * profile_.eval(rho).first;
  return translate(center_, Mat2::rotation_cw(-phi) * d);
}

Mat2 PerturbedMap::d_theta(const TorusPoint& p) const {
  const Vec2 d = lift_delta(center_, p);
  const double rho = norm(d);
  if (rho >= profile_.r || t_ == 0.0) return Mat2::identity();
  const auto [g, gp] = profile_.eval(rho);
  const Mat2 rot = Mat2::rotation_cw(t_ * g);
  if (rho == 0.0) return rot;
  // Rc(phi) (I + alpha u n^T), n radial, u counter-clockwise tangent, alpha = -t rho gamma'
  const Vec2 n = d / rho;
  const Vec2 u = perp(n);
  const double al = -t_ * rho * gp;
  const Mat2 shear{1.0 + al * u.x * n.x, al * u.x * n.y, al * u.y * n.x, 1.0 + al * u.y * n.y};
  return rot * shear;
}

Mat2 PerturbedMap::d_theta_inv(const TorusPoint& p) const {
  const Mat2 m = d_theta(theta_inv(p));
  // det = 1 exactly in exact arithmetic
  return {m.d, -m.b, -m.c, m.a};
}

TorusPoint PerturbedMap::iterate(const TorusPoint& p, int n) const {
  TorusPoint q = p;
  for (int i = 0; i < n; ++i) q = f(q);
  for (int i = 0; i < -n; ++i) q = f_inv(q);
  return q;
}

double PerturbedMap::shear(double rho) const { return -t_ * rho * profile_.eval(rho).second; }

DecayProfile vertical_vector_decay(const PerturbedMap& map, int n_max) {
  DecayProfile out;
  out.warning = map.t() < 1.0;
  const Vec2 v = map.L().eig().e_s;
  std::vector<double> fwd(n_max + 1), bwd(n_max + 1);
  TorusPoint p = map.center();
  Vec2 w = v;
  fwd[0] = 1.0;
  for (int i = 1; i <= n_max; ++i) {
    w = map.df(p) * w;
    p = map.f(p);
    fwd[i] = norm(w);
  }
  p = map.center();
  w = v;
  bwd[0] = 1.0;
  for (int i = 1; i <= n_max; ++i) {
    w = map.df_inv(p) * w;
    p = map.f_inv(p);
    bwd[i] = norm(w);
  }
  for (int i = n_max; i >= 1; --i) {
    out.n.push_back(-i);
    out.norms.push_back(bwd[i]);
  }
  for (int i = 0; i <= n_max; ++i) {
    out.n.push_back(i);
    out.norms.push_back(fwd[i]);
  }
  return out;
}

}  // namespace anosov

namespace anosov {

MapCheckReport map_check(const PerturbedMap& map, std::size_t samples, std::uint64_t seed, double fd_step, Exec exec) {
  struct Row {
    double fd = 0, det = 0, shear = 0, trip = 0, id = 0;
  };
  std::vector<Row> rows(samples);
  const int k = map.k();
  const double r = map.r();
  for_each_index(samples, exec, [&](std::size_t i) {
    auto g = rng_stream(seed, i);
    TorusPoint p;
    if (i % 2 == 0) {
      p = TorusPoint::make(uniform(g, 0, k), uniform(g, 0, k), k);
    } else {
      const double rho = r * std::sqrt(uniform01(g)), phi = uniform(g, 0, 2 * std::numbers::pi);
      p = translate(map.center(), {rho * std::cos(phi), rho * std::sin(phi)});
    }
    Row& row = rows[i];
    const Mat2 J = map.d_theta(p);
    Mat2 fd;
    for (int c = 0; c < 2; ++c) {
      const Vec2 e = c == 0 ? Vec2{fd_step, 0} : Vec2{0, fd_step};
      const Vec2 col = lift_delta(map.theta(translate(p, -1.0 * e)), map.theta(translate(p, e))) / (2 * fd_step);
      if (c == 0) fd.a = col.x, fd.c = col.y;
      else fd.b = col.x, fd.d = col.y;
    }
    row.fd = op_norm(J - fd) / op_norm(J);
    row.det = std::fabs(J.det() - 1.0);
    row.trip = distance(map.f_inv(map.f(p)), p);
    const Vec2 d = lift_delta(map.center(), p);
    const double rho = norm(d);
    if (rho < r && rho > 0 && map.t() > 0) {
      // (tangent, radial) frame at p in, rotated frame out
      const Vec2 n = d / rho, u = perp(n);
      const Mat2 back = Mat2::rotation_cw(-map.t() * map.profile().eval(rho).first) * J;
      const Vec2 bu = back * u, bn = back * n;
      const double al = map.shear(rho);
      row.shear = std::max({std::fabs(dot(bu, u) - 1), std::fabs(dot(bu, n)), std::fabs(dot(bn, u) - al),
                            std::fabs(dot(bn, n) - 1)});
    } else {
      row.id = distance(map.theta(p), p) + op_norm(J - Mat2::identity());
    }
  });
  MapCheckReport rep;
  rep.samples = samples;
  for (const auto& row : rows) {
    rep.max_fd_rel = std::max(rep.max_fd_rel, row.fd);
    rep.max_det = std::max(rep.max_det, row.det);
    rep.max_shear = std::max(rep.max_shear, row.shear);
    rep.max_roundtrip = std::max(rep.max_roundtrip, row.trip);
    rep.max_identity = std::max(rep.max_identity, row.id);
  }
  return rep;
}

}  // namespace anosov

#include "anosov/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace anosov {

double wrap_coord(double v, int k) {
  const double kk = static_cast<double>(k);
  double w = std::fmod(v, kk);
  if (w < 0.0) w += kk;
  // fmod of a tiny negative number can land exactly on k after the shift
  if (w >= kk) w = 0.0;
  return w;
}

TorusPoint TorusPoint::make(double x, double y, int k) {
  if (k < 1) throw DomainError("cover size k must be positive");
  return {wrap_coord(x, k), wrap_coord(y, k), k};
}

namespace {

double wrap_centered(double v, int k) {
  const double kk = static_cast<double>(k);
  return v - kk * std::floor(v / kk + 0.5);
}

Vec2 wrap_vec(Vec2 v, int k) { return {wrap_centered(v.x, k), wrap_centered(v.y, k)}; }

Vec2 eigenvector(const IntMat2& m, double mu) {
  const Vec2 v1{static_cast<double>(m.b), mu - static_cast<double>(m.a)};
  const Vec2 v2{mu - static_cast<double>(m.d), static_cast<double>(m.c)};
  Vec2 v = norm(v1) >= norm(v2) ? v1 : v2;
  v = normalized(v);
  if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
  return v;
}

std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// returns g = gcd(a, b) and x with a*x = g (mod b)
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::int64_t t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  x = old_s;
  return old_r;
}

}  // namespace

Vec2 lift_delta(const TorusPoint& from, const TorusPoint& to) {
  return wrap_vec({to.x - from.x, to.y - from.y}, from.k);
}

double distance(const TorusPoint& a, const TorusPoint& b) { return norm(lift_delta(a, b)); }

TorusPoint translate(const TorusPoint& p, Vec2 v) { return TorusPoint::make(p.x + v.x, p.y + v.y, p.k); }

IntMat2 IntMat2::pow(int p) const {
  IntMat2 out{};
  for (int i = 0; i < p; ++i) out = out * (*this);
  return out;
}

EigenData eigen_data(const IntMat2& m) {
  const std::int64_t D = m.det();
  if (D != 1 && D != -1) {
    std::ostringstream os;
    os << "matrix is not unimodular: |det m| = " << std::llabs(D) << " (expected 1)";
    throw DomainError(os.str());
  }
  const double T = static_cast<double>(m.trace());
  const double disc = T * T - 4.0 * static_cast<double>(D);
  // det = 1 needs |trace| > 2; det = -1 needs trace != 0 (eigenvalues +-1 otherwise)
  if ((D == 1 && std::llabs(m.trace()) <= 2) || (D == -1 && m.trace() == 0)) {
    std::ostringstream os;
    os << "matrix is not hyperbolic: |trace m| = " << std::llabs(m.trace())
       << (D == 1 ? " (need > 2)" : " (need != 0 for det -1)");
    throw DomainError(os.str());
  }
  const double sq = std::sqrt(disc);
  // the root of larger modulus avoids cancellation; the other comes from the product
  const double big = T >= 0.0 ? 0.5 * (T + sq) : 0.5 * (T - sq);
  const double small = static_cast<double>(D) / big;
  EigenData e;
  e.mu_u = big;
  e.mu_s = small;
  e.lambda = std::fabs(big);
  e.e_u = eigenvector(m, big);
  e.e_s = eigenvector(m, small);
  return e;
}

ToralAutomorphism::ToralAutomorphism(IntMat2 m, int k) : m_(m), k_(k), eig_(eigen_data(m)) {
  if (k < 1) throw DomainError("cover size k must be positive");
  real_ = m.to_real();
  inv_ = real_.inverse();
  to_eig_ = Mat2::columns(eig_.e_u, eig_.e_s).inverse();
}

TorusPoint ToralAutomorphism::apply(const TorusPoint& p) const {
  const Vec2 v = real_ * Vec2{p.x, p.y};
  return TorusPoint::make(v.x, v.y, k_);
}

TorusPoint ToralAutomorphism::apply_inv(const TorusPoint& p) const {
  const Vec2 v = inv_ * Vec2{p.x, p.y};
  return TorusPoint::make(v.x, v.y, k_);
}

TorusPoint ToralAutomorphism::apply_pow(const TorusPoint& p, int n) const {
  TorusPoint q = p;
  for (int i = 0; i < n; ++i) q = apply(q);
  for (int i = 0; i < -n; ++i) q = apply_inv(q);
  return q;
}

std::int64_t periodic_point_count(const IntMat2& m, int period) {
  IntMat2 A = m.pow(period);
  A.a -= 1;
  A.d -= 1;
  return std::llabs(A.det());
}

std::vector<TorusPoint> periodic_points_linear(const ToralAutomorphism& L, int period, int cap) {
  if (period < 1) throw DomainError("period must be positive");
  if (period > cap) {
    std::ostringstream os;
    os << "period " << period << " exceeds cap " << cap << " (about "
       << periodic_point_count(L.matrix(), period) << " points)";
    throw DomainError(os.str());
  }
  IntMat2 A = L.matrix().pow(period);
  A.a -= 1;
  A.d -= 1;
  const std::int64_t N = std::llabs(A.det());
  // x = k w / N with w in [0,N)^2 and A w = 0 (mod N)
  std::vector<TorusPoint> out;
  out.reserve(static_cast<std::size_t>(N));
  // pick the row whose w2 coefficient shares the smaller gcd with N
  std::int64_t inv_b = 0, inv_d = 0;
  const std::int64_t gb = ext_gcd(mod_floor(A.b, N), N, inv_b);
  const std::int64_t gd = ext_gcd(mod_floor(A.d, N), N, inv_d);
  const bool use_first = gb <= gd;
  const std::int64_t ca = use_first ? A.a : A.c;
  const std::int64_t g = use_first ? gb : gd;
  const std::int64_t inv = use_first ? inv_b : inv_d;
  const std::int64_t Ng = N / g;
  for (std::int64_t w1 = 0; w1 < N; ++w1) {
    const std::int64_t rhs = mod_floor(-ca * w1, N);
    if (rhs % g != 0) continue;
    const std::int64_t base = mod_floor((rhs / g) % Ng * mod_floor(inv, Ng), Ng);
    for (std::int64_t j = 0; j < g; ++j) {
      const std::int64_t w2 = base + j * Ng;
      if (mod_floor(A.a * w1 + A.b * w2, N) != 0 || mod_floor(A.c * w1 + A.d * w2, N) != 0) continue;
      const double kk = static_cast<double>(L.k());
      out.push_back(TorusPoint::make(kk * static_cast<double>(w1) / static_cast<double>(N),
                                     kk * static_cast<double>(w2) / static_cast<double>(N), L.k()));
    }
  }
  return out;
}

std::vector<TorusPoint> fixed_points(const ToralAutomorphism& L) { return periodic_points_linear(L, 1); }

FrameRule parse_frame_rule(const std::string& s) {
  if (s == "compact") return FrameRule::Compact;
  if (s == "equal_distance") return FrameRule::EqualDistance;
  throw DomainError("unknown frame rule '" + s + "' (expected compact|equal_distance)");
}

std::string to_string(FrameRule r) { return r == FrameRule::Compact ? "compact" : "equal_distance"; }

HeteroclinicFrame build_heteroclinic_frame(const ToralAutomorphism& L, const TorusPoint& p,
                                           const TorusPoint& q, FrameRule rule, double search_radius) {
  const int k = L.k();
  if (distance(p, q) < 1e-12) throw DomainError("heteroclinic frame needs distinct fixed points P != Q");
  if (distance(L.apply(p), p) > 1e-9 || distance(L.apply(q), q) > 1e-9)
    throw DomainError("P and Q must be fixed points of L");
  if (search_radius <= 0.0) search_radius = 10.0 * k;
  const Vec2 es = L.eig().e_s, eu = L.eig().e_u;
  // s e_s - t e_u = (Q - P) + k n
  const Mat2 Minv = Mat2::columns(es, -eu).inverse();
  const Vec2 dqp{q.x - p.x, q.y - p.y};
  const int nmax = static_cast<int>(std::ceil((2.0 * search_radius + norm(dqp)) / k)) + 1;

  bool found = false;
  double best_key = std::numeric_limits<double>::infinity(), best_tie = best_key;
  double bs = 0.0, bt = 0.0;
  for (int i = -nmax; i <= nmax; ++i) {
    for (int j = -nmax; j <= nmax; ++j) {
      const Vec2 st = Minv * (dqp + Vec2{static_cast<double>(k * i), static_cast<double>(k * j)});
      const double s = st.x, t = st.y;
      if (std::fabs(s) > search_radius || std::fabs(t) > search_radius) continue;
      if (std::fabs(s) < 1e-9 || std::fabs(t) < 1e-9) continue;
      const double key = rule == FrameRule::Compact ? std::fmax(std::fabs(s), std::fabs(t))
                                                    : std::fabs(std::fabs(s) - std::fabs(t));
      const double tie = std::fabs(s);
      if (key < best_key - 1e-12 || (std::fabs(key - best_key) <= 1e-12 && tie < best_tie)) {
        best_key = key;
        best_tie = tie;
        bs = s;
        bt = t;
        found = true;
      }
    }
  }
  if (!found) {
    std::ostringstream os;
    os << "no intersection of W^s(P) and W^u(Q) within search radius " << search_radius;
    throw DomainError(os.str());
  }
  HeteroclinicFrame fr;
  fr.p = p;
  fr.q = q;
  fr.s_r = bs;
  fr.t_r = bt;
  fr.r_point = translate(p, es * bs);
  fr.dist_pr = std::fabs(bs);
  fr.dist_qr = std::fabs(bt);
  const Vec2 R{fr.r_point.x, fr.r_point.y};
  fr.residual_s = norm(wrap_vec(R - (Vec2{p.x, p.y} + es * bs), k));
  fr.residual_u = norm(wrap_vec(R - (Vec2{q.x, q.y} + eu * bt), k));
  return fr;
}

double distance_to_segment(const TorusPoint& x, const TorusPoint& base, Vec2 dir, double s0, double s1) {
  const Vec2 d0 = lift_delta(base, x);
  const double kk = static_cast<double>(x.k);
  const double dd = dot(dir, dir);
  double best = std::numeric_limits<double>::infinity();
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const Vec2 d = d0 + Vec2{kk * i, kk * j};
      const double s = std::clamp(dot(d, dir) / dd, std::fmin(s0, s1), std::fmax(s0, s1));
      best = std::fmin(best, norm(d - dir * s));
    }
  }
  return best;
}

}  // namespace anosov

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "anosov/linalg.hpp"

namespace anosov {

// Point of R^2 / kZ^2 stored by its representative in [0,k)^2.
struct TorusPoint {
  double x = 0.0;
  double y = 0.0;
  int k = 1;

  static TorusPoint make(double x, double y, int k);
  bool operator==(const TorusPoint&) const = default;
};

double wrap_coord(double v, int k);
// nearest-representative displacement to - from
Vec2 lift_delta(const TorusPoint& from, const TorusPoint& to);
double distance(const TorusPoint& a, const TorusPoint& b);
TorusPoint translate(const TorusPoint& p, Vec2 v);

struct IntMat2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  std::int64_t det() const { return a * d - b * c; }
  std::int64_t trace() const { return a + d; }
  IntMat2 operator*(const IntMat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  IntMat2 pow(int p) const;
  Mat2 to_real() const {
    return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c),
            static_cast<double>(d)};
  }
  bool operator==(const IntMat2&) const = default;
};

struct EigenData {
  double lambda = 1.0;  // |mu_u| > 1
  double mu_u = 1.0;    // signed eigenvalues
  double mu_s = 1.0;
  Vec2 e_u;
  Vec2 e_s;
};

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Closed-form eigendata. Throws DomainError naming the violated invariant.
EigenData eigen_data(const IntMat2& m);

class ToralAutomorphism {
 public:
  ToralAutomorphism(IntMat2 m, int k);

  const IntMat2& matrix() const { return m_; }
  const Mat2& real() const { return real_; }
  const Mat2& real_inverse() const { return inv_; }
  int k() const { return k_; }
  const EigenData& eig() const { return eig_; }
  double lambda() const { return eig_.lambda; }

  TorusPoint apply(const TorusPoint& p) const;
  TorusPoint apply_inv(const TorusPoint& p) const;
  TorusPoint apply_pow(const TorusPoint& p, int n) const;

  // coefficients (c_u, c_s) with v = c_u e_u + c_s e_s
  Vec2 eigen_coords(Vec2 v) const { return to_eig_ * v; }
  Vec2 from_eigen_coords(Vec2 c) const { return eig_.e_u * c.x + eig_.e_s * c.y; }

 private:
  IntMat2 m_;
  int k_;
  Mat2 real_, inv_, to_eig_;
  EigenData eig_;
};

// Number of solutions of (m^p - I) x = 0 on R^2/kZ^2; independent of k.
std::int64_t periodic_point_count(const IntMat2& m, int period);
std::vector<TorusPoint> fixed_points(const ToralAutomorphism& L);
// All x with L^p x = x (minimal period divides p). Refuses periods above cap.
std::vector<TorusPoint> periodic_points_linear(const ToralAutomorphism& L, int period, int cap = 10);

enum class FrameRule {
  Compact,        // minimize max(dist_pr, dist_qr)
  EqualDistance,  // minimize |dist_pr - dist_qr|, ties to smaller dist_pr
};
FrameRule parse_frame_rule(const std::string& s);
std::string to_string(FrameRule r);

struct HeteroclinicFrame {
  TorusPoint p, q, r_point;
  // lifted parameters: R = P + s_r e_s = Q + t_r e_u (mod k)
  double s_r = 0.0;
  double t_r = 0.0;
  double dist_pr = 0.0;
  double dist_qr = 0.0;
  double residual_s = 0.0;  // distance from R to the line P + s e_s
  double residual_u = 0.0;  // distance from R to the line Q + t e_u
};

HeteroclinicFrame build_heteroclinic_frame(const ToralAutomorphism& L, const TorusPoint& p,
                                           const TorusPoint& q, FrameRule rule = FrameRule::Compact,
                                           double search_radius = -1.0);

// Distance from x to the straight segment base + s*dir, s in [s0, s1], on the torus.
double distance_to_segment(const TorusPoint& x, const TorusPoint& base, Vec2 dir, double s0, double s1);

}  // namespace anosov

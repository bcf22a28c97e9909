#pragma once

#include <string>
#include <utility>
#include <vector>

#include "anosov/parallel.hpp"
#include "anosov/torus.hpp"

namespace anosov {

enum class ProfileKind {
  Quadratic,  // gamma = (pi/2)(1 - rho/r)^2, quadratic tangency
  Power,      // pi/2 - (pi/2)(rho/r)^alpha on [0, r/2], Hermite blend to 0 on [r/2, r]
};
ProfileKind parse_profile(const std::string& s);
std::string to_string(ProfileKind k);

struct BumpProfile {
  ProfileKind kind = ProfileKind::Quadratic;
  double r = 0.25;
  double alpha = 1.0;  // tangency_alpha; only read by Power

  // (gamma, gamma') at rho >= 0
  std::pair<double, double> eval(double rho) const;
};

// f_t = theta_t o L, theta_t a clockwise rotation about R by t*gamma(rho).
class PerturbedMap {
 public:
  PerturbedMap(ToralAutomorphism L, TorusPoint center, BumpProfile profile, double t);

  const ToralAutomorphism& L() const { return L_; }
  const TorusPoint& center() const { return center_; }
  const BumpProfile& profile() const { return profile_; }
  double t() const { return t_; }
  double r() const { return profile_.r; }
  int k() const { return L_.k(); }
  PerturbedMap with_t(double t) const { return PerturbedMap(L_, center_, profile_, t); }

  double rho(const TorusPoint& p) const { return distance(p, center_); }

  TorusPoint theta(const TorusPoint& p) const;
  TorusPoint theta_inv(const TorusPoint& p) const;
  Mat2 d_theta(const TorusPoint& p) const;
  Mat2 d_theta_inv(const TorusPoint& p) const;

  TorusPoint f(const TorusPoint& p) const { return theta(L_.apply(p)); }
  TorusPoint f_inv(const TorusPoint& p) const { return L_.apply_inv(theta_inv(p)); }
  Mat2 df(const TorusPoint& p) const { return d_theta(L_.apply(p)) * L_.real(); }
  Mat2 df_inv(const TorusPoint& p) const { return L_.real_inverse() * d_theta_inv(p); }
  TorusPoint iterate(const TorusPoint& p, int n) const;

  // shear entry of d_theta in the (tangent, radial) circle frame
  double shear(double rho) const;

 private:
  ToralAutomorphism L_;
  TorusPoint center_;
  BumpProfile profile_;
  double t_;
};

struct DecayProfile {
  std::vector<int> n;
  std::vector<double> norms;
  bool warning = false;  // t < 1: the decay claim does not apply
};

// ||Df^n v|| for the unit vertical (e_s) vector at R, n in [-n_max, n_max]
DecayProfile vertical_vector_decay(const PerturbedMap& map, int n_max);

struct MapCheckReport {
  std::size_t samples = 0;
  double max_fd_rel = 0.0;     // |D theta - central differences| / |D theta|
  double max_det = 0.0;        // |det D theta - 1|
  double max_shear = 0.0;      // circle-frame matrix vs [[1, alpha], [0, 1]]
  double max_roundtrip = 0.0;  // distance(f_inv(f(x)), x)
  double max_identity = 0.0;   // theta - id where it must vanish (outside B, or everywhere at t = 0)
};

// Half the samples uniform on the torus, half uniform in B.
MapCheckReport map_check(const PerturbedMap& map, std::size_t samples, std::uint64_t seed, double fd_step = 1e-6,
                         Exec exec = Exec::Parallel);

}  // namespace anosov

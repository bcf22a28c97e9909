#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anosov/cocycle.hpp"

namespace anosov {

struct AtlasParams {
  double rtilde_factor = 0.05;  // rtilde = factor * r
  double w_u_factor = 3.0;      // tube half-widths in units of r
  double w_v_factor = 2.0;
  int depth = 8;                // B-bar components tracked on each side of R
};

enum class RegionKind {
  BarForward,   // B-bar_n around f^n(R), n >= 0
  BarBackward,  // mirror component around f^{-n}(R), n >= 1
  Bn,           // B_n minus B-bar_n
  U,            // U minus B_infinity
  V,
  Outside,
};

struct RegionLabel {
  RegionKind kind = RegionKind::Outside;
  int n = 0;
  std::string name() const;
  bool in_bar() const { return kind == RegionKind::BarForward || kind == RegionKind::BarBackward; }
};

class RegionAtlas {
 public:
  RegionAtlas(const PerturbedMap& map, const HeteroclinicFrame& frame, AtlasParams params = {});

  const PerturbedMap& map() const { return map_; }
  const HeteroclinicFrame& frame() const { return frame_; }
  const AtlasParams& params() const { return params_; }
  double r() const { return map_.r(); }
  double rtilde() const { return params_.rtilde_factor * map_.r(); }
  double w_u() const { return params_.w_u_factor * map_.r(); }
  double w_v() const { return params_.w_v_factor * map_.r(); }
  double lambda() const { return map_.L().lambda(); }

  // f^n(R) for |n| <= depth
  const TorusPoint& orbit(int n) const { return orbit_[static_cast<std::size_t>(n + params_.depth)]; }
  // (x, y) of p in eigen coordinates centred at f^n(R)
  Vec2 local_coords(const TorusPoint& p, int n) const;

  bool in_B(const TorusPoint& p) const { return distance(p, map_.center()) < map_.r(); }
  bool in_U(const TorusPoint& p) const;
  bool in_V(const TorusPoint& p) const;
  // d(S): distance to the stable segment through P carrying the forward orbit of R
  double stable_segment_distance(const TorusPoint& p) const;
  double unstable_segment_distance(const TorusPoint& p) const;
  bool in_bar_forward(const TorusPoint& p, int n) const;
  bool in_bar_backward(const TorusPoint& p, int n) const;
  // smallest n with f^{-n}(p) in B and the intermediate points in U
  std::optional<int> b_index(const TorusPoint& p) const;
  RegionLabel classify(const TorusPoint& p) const;

  // stable segment parameters: P + s e_s, s in [s0, s1]
  double seg_s0() const { return s0_; }
  double seg_s1() const { return s1_; }
  double seg_t0() const { return t0_; }
  double seg_t1() const { return t1_; }

 private:
  PerturbedMap map_;
  HeteroclinicFrame frame_;
  AtlasParams params_;
  std::vector<TorusPoint> orbit_;
  double s0_, s1_, t0_, t1_;
};

struct ConeOptions {
  std::size_t samples = 100000;
  double epsilon = 0.1;
  std::uint64_t seed = 1;
  double d_min = 1e-5;  // sampling range for d(S)
  int envelope_bins = 16;
  DirectionOptions dir{};
};

struct ConeSample {
  TorusPoint p;
  RegionLabel label;
  bool converged = false;
  double tan_u_eu = 0.0;  // tan angle(E^u, e_u)
  double tan_u_es = 0.0;  // tan angle(E^u, e_s)
  double tan_s_es = 0.0;  // tan angle(E^s, e_s)
  double rho = 0.0;       // distance to R
  double d_stable = 0.0;  // d(S)
  bool in_U = false, in_V = false, in_binf = false;
  double tau_candidate = std::numeric_limits<double>::infinity();
  std::uint8_t kind = 0;  // sampler that produced the point
};

struct ConeReport {
  std::size_t samples = 0;
  std::size_t unconverged = 0;
  std::size_t unconverged_in_bar = 0;
  double tau = 0.0;
  double xi = 0.0;
  double kappa = 0.0;
  double eps_measured_u = 0.0;  // max tan(E^u, e_u) outside U
  double eps_measured_s = 0.0;  // max tan(E^s, e_s) outside V
  double max_tan_outside_binf = 0.0;
  double min_lemma_ratio = 0.0; // min tan(E^u, e_s)/xi over U minus B-bar
  double prop_slope = 0.0;
  std::size_t violations_t4_u = 0, violations_t4_s = 0, violations_binf = 0, violations_lemma = 0;
  std::size_t violations() const { return violations_t4_u + violations_t4_s + violations_binf + violations_lemma; }
  std::vector<double> envelope_d, envelope_tan;
  std::vector<ConeSample> rows;
};

ConeReport verify_cone_conditions(const PerturbedMap& map, const RegionAtlas& atlas, const ConeOptions& opt,
                                  Exec exec = Exec::Parallel);

}  // namespace anosov

#pragma once

#include <limits>
#include <vector>

#include "anosov/parallel.hpp"
#include "anosov/perturbation.hpp"

namespace anosov {

// A tangent direction modulo pi, angle canonical in [0, pi).
struct ProjectiveDirection {
  double angle = 0.0;

  static ProjectiveDirection from_vector(Vec2 v);
  Vec2 unit() const { return {std::cos(angle), std::sin(angle)}; }
};

// |tan| of the angle between two directions; +inf when perpendicular.
double angle_tan(const ProjectiveDirection& d1, const ProjectiveDirection& d2);
// unsigned angle between directions, in [0, pi/2]
double angle_between(const ProjectiveDirection& d1, const ProjectiveDirection& d2);

ProjectiveDirection push_direction(const PerturbedMap& map, const TorusPoint& p, ProjectiveDirection d, int n);

struct DirectionOptions {
  int min_depth = 16;
  int max_depth = 400;
  double tol = 1e-9;
};

struct DirectionResult {
  ProjectiveDirection dir;
  bool converged = false;
  int depth = 0;       // depth at which the Cauchy test passed (or the cap)
  double cauchy = 0.0; // last angle difference
};

DirectionResult unstable_direction(const PerturbedMap& map, const TorusPoint& p, const DirectionOptions& opt = {});
DirectionResult stable_direction(const PerturbedMap& map, const TorusPoint& p, const DirectionOptions& opt = {});

struct ExpansionResult {
  double value = 0.0;
  bool converged = false;
};
// D^u(p) = |Df(p) e| for the unit vector e along E^u(p)
ExpansionResult expansion_factor(const PerturbedMap& map, const TorusPoint& p, const DirectionOptions& opt = {});

struct TangencyFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool transversal = false;  // no tangency: tan stays bounded below (t = 0)
  std::vector<double> rho;
  std::vector<double> tan_values;
};

// Fits log tan(E^u, e_s) against log rho along theta(R + rho e_u), rho geometric from rho_max.
TangencyFit tangency_order(const PerturbedMap& map, int n_scales, double rho_max_factor = 0.2,
                           const DirectionOptions& opt = {});

// One-step M-cocycle cone test in the frame (E^u(x), E^s(x)) with cone |b| <= |a|.
struct PersistencePoint {
  bool converged = false;
  bool invariant = false;    // Df^M maps the cone strictly inside itself
  double du = 0.0, ds = 0.0; // |Df^M| on E^u and E^s
  double min_expansion = 0.0;
};
PersistencePoint cone_persistence_point(const PerturbedMap& map, const TorusPoint& x, int M,
                                        const DirectionOptions& opt = {});

struct PersistenceReport {
  double t = 0.0;
  std::size_t grid = 0;
  std::size_t failures = 0;
  std::size_t unconverged = 0;
  double min_expansion = std::numeric_limits<double>::infinity();
  std::vector<TorusPoint> failure_points;
};
PersistenceReport anosov_persistence_check(const PerturbedMap& map, std::size_t grid, int M, Exec exec,
                                           const DirectionOptions& opt = {});

// least squares slope/intercept of y against x
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace anosov

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "anosov/conjugacy.hpp"
#include "anosov/parallel.hpp"

namespace anosov {

// Points y_{-N..N}; points[i] is y_{i - N}.
struct PseudoOrbit {
  std::vector<TorusPoint> points;
  double defect = 0.0;  // max_i distance(g(y_i), y_{i+1})
  std::string source;   // tangent | synthetic | image
  int N() const { return static_cast<int>(points.size() / 2); }
  const TorusPoint& at(int n) const { return points[static_cast<std::size_t>(n + N())]; }
};

using StepMap = std::function<TorusPoint(const TorusPoint&)>;

double pseudo_orbit_defect(const StepMap& g, const std::vector<TorusPoint>& pts);
StepMap step_of(const PerturbedMap& map);
StepMap step_of(const ToralAutomorphism& L);

// v_n = Df^n v for |n| <= N, index n + N. A v in the contracted direction is followed by pullback (see
// growth_rate_probe); otherwise it is pushed directly. Throws DomainError naming the first n with ||v_n|| > bound.
std::vector<Vec2> tangent_sequence(const PerturbedMap& map, const TorusPoint& x, Vec2 v, int N, double bound = 1.0 + 1e-9);

struct TangentPseudoOrbit {
  PseudoOrbit orbit;
  std::vector<TorusPoint> true_orbit;  // f^n(x), same indexing
  double epsilon = 0.0;
  double c_tilde = 0.0;  // defect / epsilon^2
  double delta = 0.0;    // max distance(f^n x, y_n)
};

// y_n = f^n(x) + eps v_n (flat exponential map).
TangentPseudoOrbit make_tangent_pseudo_orbit(const PerturbedMap& map, const TorusPoint& x, Vec2 v, double epsilon,
                                             int N);

struct ShadowingResult {
  TorusPoint x;
  std::vector<Vec2> w;      // corrections: L^n x = y_n + w_n
  double delta = 0.0;       // max |w_n|
  double xi = 0.0;          // max |d_n|, d_n = y_{n+1} - L y_n
  double C = 0.0;           // delta <= C xi for bi-infinite sequences
  double boundary = 0.0;    // bound on the truncation error of w_0 from the window ends
  std::string method = "series";
};

// (|pi_u| + lambda |pi_s|) / (lambda - 1), pi the eigen-coordinate functionals.
double shadowing_constant(const ToralAutomorphism& L);

// y_{n+1} = L y_n + d_n with |d_n| = xi in a random direction; y_{-N} uniform on the torus.
PseudoOrbit random_pseudo_orbit(const ToralAutomorphism& L, int N, double xi, std::uint64_t seed);

ShadowingResult shadow_linear(const ToralAutomorphism& L, const PseudoOrbit& pseudo);

// max |L^n x - y_n| by direct iteration from x (accurate while lambda^N * 1e-16 is small).
double recompute_delta(const ToralAutomorphism& L, const PseudoOrbit& pseudo, const TorusPoint& x);

struct QuasiAnosovReport {
  std::vector<int> n;
  std::vector<double> norms;  // ||Df^n v||
  double max_norm = 0.0;
  int first_exceed = 0;       // first |n| where ||Df^n v|| > threshold (0: never)
  bool bounded = false;       // max_norm <= threshold
};

QuasiAnosovReport quasi_anosov_probe(const PerturbedMap& map, const TorusPoint& x, Vec2 v, int N,
                                     double threshold = 1.1);

enum class FisherMode {
  Identity,   // h = id: the tangent pseudo-orbit of f is measured against f itself
  Conjugacy,  // mapped through h to a pseudo-orbit of L
};

struct FisherRow {
  double epsilon = 0.0;
  double xi = 0.0;            // defect of the (mapped) pseudo-orbit
  double delta = 0.0;         // distance to the (mapped) true orbit
  double delta_series = 0.0;  // shadow_linear on the mapped pseudo-orbit (Conjugacy only)
  double bound = 0.0;         // C xi
};

struct FisherReport {
  FisherMode mode = FisherMode::Conjugacy;
  std::vector<FisherRow> rows;
  double defect_exponent = 0.0;  // xi ~ eps^e
  double kappa = 0.0;            // delta ~ xi^kappa
  double C = 0.0;
  bool bound_holds = false;      // delta <= C xi at every eps
  double min_ratio = 0.0, max_ratio = 0.0;  // delta / eps
};

// Tangent pseudo-orbits at x along the bounded direction v.
FisherReport fisher_experiment(const PerturbedMap& map, const TorusPoint& x, Vec2 v,
                               const std::vector<double>& epsilons, int N, FisherMode mode, Exec exec = Exec::Parallel);

}  // namespace anosov

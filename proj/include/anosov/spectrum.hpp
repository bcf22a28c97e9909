#pragma once

#include <vector>

#include "anosov/conjugacy.hpp"
#include "anosov/parallel.hpp"

namespace anosov {

struct PeriodicOrbitRecord {
  TorusPoint point;
  int period = 0;
  double mag_lo = 0.0, mag_hi = 0.0;    // |eigenvalues| of Df^p, ascending
  double rate_lo = 0.0, rate_hi = 0.0;  // magnitude^{1/p}
  double residual = 0.0;                // distance(f^p(x), x)
  double unimodularity = 0.0;           // |mag_lo * mag_hi - 1|
  int iterations = 0;
  bool converged = false;
  bool hyperbolic = false;  // real eigenvalues off the unit circle
  double margin() const;    // min |log rate|
};

struct RefineOptions {
  double fd_step = 1e-7;
  double damping = 0.5;  // backtracking factor on the Newton step
  int max_iter = 100;
  double target = 1e-10;
};

// Newton on x -> f^p(x) - x with a finite-difference Jacobian; the step is halved until the residual drops.
PeriodicOrbitRecord refine_periodic_point(const PerturbedMap& map, const TorusPoint& seed, int period,
                                          const RefineOptions& opt = {});

// Eigen data of Df^p at x, filled into rec.
void fill_eigen(const PerturbedMap& map, PeriodicOrbitRecord& rec);

struct TransportReport {
  int period = 0;
  std::int64_t expected = 0;     // |det(L^p - I)|
  std::vector<PeriodicOrbitRecord> records;  // converged and distinct
  std::size_t failures = 0;      // refinement did not reach the target
  std::size_t duplicates = 0;    // converged onto a point already found
  bool counts_match() const { return failures == 0 && static_cast<std::int64_t>(records.size()) == expected; }
};

// Seeds h^{-1}(y) for every L-periodic y of the given period; grid (optional) seeds the inverse.
TransportReport transported_periodic_points(const PerturbedMap& map, const ConjugacyGrid* grid, int period,
                                            const RefineOptions& opt = {}, Exec exec = Exec::Parallel);

struct SpectrumEstimate {
  std::vector<TransportReport> periods;
  std::vector<double> rates;  // sorted union of normalized rates
  double min_log_rate = 0.0;  // min over records of |log rate|
  double max_unimodularity = 0.0;
  std::size_t failures = 0, duplicates = 0, non_hyperbolic = 0;
  bool counts_match() const;
};

SpectrumEstimate periodic_spectrum(const PerturbedMap& map, const ConjugacyGrid* grid, int period_cap,
                                   const RefineOptions& opt = {}, Exec exec = Exec::Parallel);

struct ProbeValue {
  int n = 0;
  double log_norm = 0.0;   // log ||Df^n v||
  double rate = 0.0;       // log_norm / n
  double alignment = 0.0;  // Pullback: angle between v and the direction actually measured
};

enum class ProbeMode {
  Direct,    // push v with the renormalized cocycle
  Pullback,  // measure the direction contracted by Df^n (e_s pulled back from f^n x, or e_u from f^{-n} x)
  Auto,      // Pullback when v lies in the contracted direction (alignment < 1e-8), Direct otherwise
};

// Signed n; the cocycle is renormalized every step so |n| can be large. Direct pushing cannot follow a
// contracted direction beyond ~35 steps (rounding excites the expanding one); Pullback measures the contracted
// direction itself and reports how far it is from v.
std::vector<ProbeValue> growth_rate_probe(const PerturbedMap& map, const TorusPoint& x, Vec2 v,
                                          const std::vector<int>& n_grid, ProbeMode mode = ProbeMode::Auto);

// Orbit field X(f^n x) = Df^n v, |n| <= N, and ||f_* X - X|| / ||X|| in l^2 over the orbit.
// Small values mean 1 is an approximate eigenvalue of f_* (the vector is bounded in both directions).
double weyl_residual(const PerturbedMap& map, const TorusPoint& x, Vec2 v, int N);

}  // namespace anosov

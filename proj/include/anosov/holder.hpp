#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anosov/atlas.hpp"
#include "anosov/conjugacy.hpp"
#include "anosov/leaf.hpp"

namespace anosov {

// Pair at input distance d (Euclidean or leafwise).
struct SamplePair {
  TorusPoint a, b;
  double d = 0.0;
};

using PointMap = std::function<std::optional<TorusPoint>(const TorusPoint&)>;
using PairSampler = std::function<std::optional<SamplePair>(std::mt19937_64&, double scale)>;

struct ScaleRow {
  double scale = 0.0;
  double worst = 0.0;  // max image distance over the pairs at this scale
  std::size_t pairs = 0;
  std::size_t failures = 0;
};

struct ExponentFit {
  std::string strategy;
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;        // rms of the log-log fit
  std::size_t monotone_breaks = 0;  // scales where worst/s^exponent increases going finer
  std::vector<ScaleRow> rows;
};

struct HolderOptions {
  std::size_t pairs_per_scale = 1000;
  std::uint64_t seed = 1;
  double failure_budget = 0.01;  // evaluator failures tolerated per scale
};

// s0 * 2^{-j}, j = 0..count-1
std::vector<double> scale_ladder(double s0, int count);

// Worst-case envelope per scale and least-squares slope of log(worst) on log(scale).
// Throws DomainError with fewer than 5 scales or too many evaluator failures.
ExponentFit estimate_exponent(const PointMap& eval, const PairSampler& sampler, const std::vector<double>& scales,
                              const HolderOptions& opt, const std::string& strategy, Exec exec = Exec::Parallel);

ExponentFit fit_envelope(std::vector<ScaleRow> rows, const std::string& strategy);

// Evaluators
PointMap h_map(const PerturbedMap& map, int N);
PointMap h_inverse_map(const PerturbedMap& map, int N, double tol, const ConjugacyGrid* grid = nullptr);

// Samplers
PairSampler uniform_pairs(int k);
// These two hold a reference to atlas; it must outlive the sampler.
PairSampler outside_u_pairs(const RegionAtlas& atlas);
// centred in B-bar_n, n <= n_max, random direction, symmetric about the centre
PairSampler near_orbit_pairs(const RegionAtlas& atlas, int n_max = 6);
// b on the f-leaf through a at leafwise distance scale
PairSampler leaf_pairs(const PerturbedMap& map, Orientation o, const LeafOptions& lopt = {});
// straight L-leaves (for h^{-1} along W_L)
PairSampler linear_leaf_pairs(const ToralAutomorphism& L, Orientation o);
// known exponent beta for the calibration oracle: pairs on the segment [0, 1] of the x-axis, near 0
PairSampler calibration_pairs(int k);
PointMap power_map(double beta, int k);

struct StratumFit {
  std::string stratum;
  bool available = false;
  ExponentFit fit;
};

// Mixed sampling (uniform, tube, near-orbit); pairs are binned by the label of their midpoint.
std::vector<StratumFit> tube_exponent_scan(const PerturbedMap& map, const RegionAtlas& atlas, const PointMap& eval,
                                           const std::vector<double>& scales, const HolderOptions& opt,
                                           Exec exec = Exec::Parallel);
std::string stratum_of(const RegionLabel& l);

struct BeakSample {
  int n = 0;
  char kind = 'A';  // 'A' or 'B'
  double x1 = 0, y1 = 0, x2 = 0, x3 = 0, y3 = 0;
  double D = 0.0;   // distance from the beak to f^n(R)
  bool holds = false;
};

struct BeakReport {
  std::size_t case_a = 0, case_b = 0;
  std::size_t case_a_fail = 0, case_b_fail = 0;
  std::size_t skipped = 0;  // leaves did not meet within the local length
  std::vector<double> decade_lo;  // |x1 - x2| decade lower edges
  std::vector<double> decade_c;   // max |y1 - y3| / sqrt|x1 - x2| in each decade
  double c_spread = 0.0;          // max/min of decade_c over populated decades
  std::vector<BeakSample> rows;
};

struct BeakOptions {
  std::size_t samples = 1000;  // per case
  int n_max = 2;
  std::uint64_t seed = 1;
  double dx_min = 1e-9, dx_max = 1e-5;  // Case A horizontal separations
};

BeakReport beak_probe(const PerturbedMap& map, const RegionAtlas& atlas, const BeakOptions& opt,
                      Exec exec = Exec::Parallel);

}  // namespace anosov

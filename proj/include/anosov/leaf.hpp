#pragma once

#include <optional>
#include <vector>

#include "anosov/atlas.hpp"

namespace anosov {

enum class Orientation { Stable, Unstable };

struct LeafSegment {
  TorusPoint base;
  Orientation orientation = Orientation::Unstable;
  std::vector<TorusPoint> points;
  std::vector<Vec2> offsets;  // unwrapped positions relative to base, offsets[0] = 0
  double arclength = 0.0;
  bool truncated = false;     // direction field failed to converge somewhere on the path
  std::size_t steps_rejected = 0;
};

struct LeafOptions {
  double tol = 1e-7;  // local error per unit arclength
  double h0 = 1e-3;   // initial step
  double h_min = 1e-10;
  double h_max = 0.05;
  std::size_t max_steps = 200000;  // accepted + rejected; exceeding it marks the leaf truncated
  DirectionOptions dir{24, 400, 1e-11};
};

// Follows the E^u (or E^s) field from p for |length|; sign picks the side (positive = along e_u or e_s).
LeafSegment integrate_leaf(const PerturbedMap& map, const TorusPoint& p, Orientation o, double length,
                           const LeafOptions& opt = {});

// Leaf through p of half-length `half` on each side, ordered from the negative end to the positive end.
LeafSegment local_leaf(const PerturbedMap& map, const TorusPoint& p, Orientation o, double half,
                       const LeafOptions& opt = {});

// Max distance of f(seg) from the leaf through f(base) integrated independently.
double leaf_invariance_error(const PerturbedMap& map, const LeafSegment& seg, const LeafOptions& opt = {});

// Distance from q to the polyline (q taken near the segment).
double distance_to_polyline(const LeafSegment& seg, const TorusPoint& q);

// First crossing of two polylines; both are expressed in the frame of a.base.
std::optional<TorusPoint> intersect_leaves(const LeafSegment& a, const LeafSegment& b);

struct CycleRecord {
  int start = 0;
  int n = 0;          // steps before d^u stops shrinking faster than 1/mu
  int length = 0;     // n + 4m + 4
  bool complete = false;
  double growth = 0.0;  // d^u ratio across the cycle
  double bound = 0.0;   // lambda^{-n-m-1} mu^{3n+3m+3}
  bool holds = false;
};

struct CycleReport {
  int N = 0;                    // first time d^u >= r/10 (or the cap)
  bool window_capped = false;
  bool first_incomplete = false;
  bool n1_check = true;         // N - n1 >= 3 n1 when the first cycle is incomplete
  int max_components_per_iterate = 0;
  std::vector<double> du;       // leaf length of f^i[a, b]
  std::vector<CycleRecord> cycles;
  bool all_hold() const;
};

struct CycleOptions {
  int m = 2;
  double mu_factor = 0.9;  // mu = factor * lambda
  int cap = 200;
  std::size_t resolution = 4096;
};

// a and b on a common unstable leaf; the leaf arc between them is followed under f.
CycleReport cycle_expansion_check(const PerturbedMap& map, const RegionAtlas& atlas, const TorusPoint& a,
                                  const TorusPoint& b, const CycleOptions& opt = {});

}  // namespace anosov

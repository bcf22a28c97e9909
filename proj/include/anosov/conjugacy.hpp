#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "anosov/parallel.hpp"
#include "anosov/perturbation.hpp"

namespace anosov {

// p(x) = f(x) - L(x) on the nearest lift; supported on L^{-1}(B)
Vec2 forcing_term(const PerturbedMap& map, const TorusPoint& x);

// Terms needed so the geometric tail lambda^{-N} * 2r / (1 - 1/lambda) drops below tol.
int series_depth(const PerturbedMap& map, double tol, int cap = 60);

// u = h - id from the eigencomponent series truncated at N terms on each side
Vec2 displacement(const PerturbedMap& map, const TorusPoint& x, int N);
TorusPoint conjugacy_eval(const PerturbedMap& map, const TorusPoint& x, int N);
// distance(h(f(x)), L(h(x)))
double conjugacy_residual(const PerturbedMap& map, const TorusPoint& x, int N);

class GridFormatError : public std::runtime_error {
 public:
  GridFormatError(const std::string& field, const std::string& what)
      : std::runtime_error("grid " + field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GridMeta {
  IntMat2 m;
  int k = 1;
  Vec2 center;
  double r = 0.0;
  double t = 0.0;
  ProfileKind profile = ProfileKind::Quadratic;
  double alpha = 1.0;
  int resolution = 0;  // nodes per axis over [0, k)
  double tol = 0.0;
  int truncation = 0;
};

GridMeta grid_meta_for(const PerturbedMap& map, int resolution, double tol, int truncation);

// u sampled at nodes (i, j) * k / resolution; row-major with j the row
struct ConjugacyGrid {
  GridMeta meta;
  std::vector<double> ux, uy;

  double spacing() const { return static_cast<double>(meta.k) / meta.resolution; }
  Vec2 node_u(int i, int j) const;
  TorusPoint node(int i, int j) const;
  // bilinear interpolation; only C^0 accurate near the orbit of R
  Vec2 interpolate(const TorusPoint& x) const;
  double max_norm() const;
};

ConjugacyGrid build_grid(const PerturbedMap& map, int resolution, double tol, Exec exec = Exec::Parallel);
void save_grid(const ConjugacyGrid& g, const std::string& path);
// Throws GridFormatError; when expect is given the metadata must match it.
ConjugacyGrid load_grid(const std::string& path, const GridMeta* expect = nullptr);
std::uint64_t byte_checksum(const unsigned char* data, std::size_t n);

struct InverseResult {
  TorusPoint x;
  double residual = 0.0;  // distance(h(x), y)
  int iterations = 0;
  bool converged = false;
  bool fallback = false;  // damped iteration stalled and the local solver took over
};

// h^{-1}(y). The seed comes from the grid when given (nearest node of h-image search is not needed:
// x0 = y - u(y) is already within ||u||_inf of the answer).
InverseResult conjugacy_inverse(const PerturbedMap& map, const TorusPoint& y, int N, double tol,
                                const ConjugacyGrid* grid = nullptr);

struct InjectivityReport {
  std::size_t pairs = 0;
  double min_image_distance = 0.0;
  double min_ratio = 0.0;  // min d(h(a), h(b)) / d(a, b)
  std::size_t collapses = 0;
};

// Pairs of grid nodes at distances in [scale, 2 scale]; images from the stored node values.
InjectivityReport injectivity_probe(const ConjugacyGrid& g, double scale, std::size_t pairs, std::uint64_t seed,
                                    double collapse_tol = 1e-9);

}  // namespace anosov

#pragma once

#include "anosov/perturbation.hpp"

namespace anosov {

// Everything needed to instantiate f_t on a cover; defaults are the reference geometry.
struct ModelParams {
  IntMat2 m{-2, -1, -1, -1};
  int k = 5;
  Vec2 p{0.0, 0.0};
  Vec2 q{1.0, 2.0};
  FrameRule rule = FrameRule::Compact;
  double r = -1.0;  // negative: 0.05 k
  double t = 1.0;
  ProfileKind profile = ProfileKind::Quadratic;
  double alpha = 1.0;
};

struct Model {
  HeteroclinicFrame frame;
  PerturbedMap map;
};

Model build_model(const ModelParams& params);

}  // namespace anosov

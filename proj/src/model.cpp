#include "anosov/model.hpp"

namespace anosov {

Model build_model(const ModelParams& params) {
  ToralAutomorphism L(params.m, params.k);
  const auto P = TorusPoint::make(params.p.x, params.p.y, params.k);
  const auto Q = TorusPoint::make(params.q.x, params.q.y, params.k);
  const HeteroclinicFrame fr = build_heteroclinic_frame(L, P, Q, params.rule);
  BumpProfile prof;
  prof.kind = params.profile;
  prof.r = params.r > 0.0 ? params.r : 0.05 * params.k;
  prof.alpha = params.alpha;
  return Model{fr, PerturbedMap(L, fr.r_point, prof, params.t)};
}

}  // namespace anosov

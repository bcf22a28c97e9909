#include <algorithm>
#include <cmath>

#include "anosov/model.hpp"
#include "anosov/spectrum.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace anosov;

namespace {
Model model_at(double t) {
  ModelParams p;
  p.t = t;
  return build_model(p);
}

bool contains(const std::vector<PeriodicOrbitRecord>& recs, const TorusPoint& x) {
  return std::any_of(recs.begin(), recs.end(), [&](const PeriodicOrbitRecord& r) { return distance(r.point, x) < 1e-7; });
}
}  // namespace

TEST_CASE("t = 0: periodic records are the linear ones with rates 1/lambda and lambda") {
  const auto m = model_at(0.0);
  const double lam = m.map.L().lambda();
  const auto est = periodic_spectrum(m.map, nullptr, 3);
  CHECK(est.counts_match());
  for (const auto& pr : est.periods) {
    const auto brute = oracle::linear_periodic_points(m.map.L().matrix(), 5, pr.period);
    CHECK(pr.records.size() == brute.size());
    for (const auto& x : brute) CHECK(contains(pr.records, x));
    for (const auto& r : pr.records) {
      CHECK(r.rate_hi == doctest::Approx(lam).epsilon(1e-9));
      CHECK(r.rate_lo == doctest::Approx(1 / lam).epsilon(1e-9));
    }
  }
}

TEST_CASE("t = 1: transported periodic points agree with a brute-force scan") {
  const auto m = model_at(1.0);
  for (int p = 1; p <= 2; ++p) {
    const auto rep = transported_periodic_points(m.map, nullptr, p);
    CHECK(rep.counts_match());
    const auto scan = oracle::scan_periodic_points(m.map, p, 60);
    CHECK(scan.size() == rep.records.size());
    for (const auto& x : scan) CHECK(contains(rep.records, x));
    for (const auto& r : rep.records) {
      CHECK(r.residual < 1e-10);
      CHECK(r.unimodularity < 1e-8);
      CHECK(r.hyperbolic);
      CHECK(r.margin() > 0.5 * std::log(m.map.L().lambda()));
    }
  }
}

TEST_CASE("refinement from a perturbed seed returns to the fixed point") {
  const auto m = model_at(1.0);
  const auto r = refine_periodic_point(m.map, translate(m.frame.q, {1e-3, -2e-3}), 1);
  CHECK(r.converged);
  CHECK(distance(r.point, m.frame.q) < 1e-10);
  CHECK(r.mag_lo * r.mag_hi == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectrum: parallel equals serial") {
  const auto m = model_at(0.5);
  const auto a = periodic_spectrum(m.map, nullptr, 3, {}, Exec::Serial);
  const auto b = periodic_spectrum(m.map, nullptr, 3, {}, Exec::Parallel);
  CHECK(a.rates == b.rates);
  CHECK(a.counts_match());
}

TEST_CASE("growth-rate probe at t = 0 is log lambda along e_u and -log lambda along e_s") {
  const auto m = model_at(0.0);
  const double ll = std::log(m.map.L().lambda());
  const auto x = TorusPoint::make(0.7, 2.9, 5);
  const std::vector<int> ns{-50, -5, 1, 10, 100};
  for (const auto& pv : growth_rate_probe(m.map, x, m.map.L().eig().e_u, ns))
    CHECK(pv.rate == doctest::Approx(ll).epsilon(1e-9));
  for (const auto& pv : growth_rate_probe(m.map, x, m.map.L().eig().e_s, ns))
    CHECK(pv.rate == doctest::Approx(-ll).epsilon(1e-9));
}

TEST_CASE("vertical vector at R: contracted both ways at the rate log lambda") {
  const auto m = model_at(1.0);
  const double ll = std::log(m.map.L().lambda());
  const auto R = m.frame.r_point;
  const auto vals = growth_rate_probe(m.map, R, m.map.L().eig().e_s, {-100, -10, 10, 100});
  for (const auto& pv : vals) {
    // log |Df^n v| = -|n| log lambda
    CHECK(pv.log_norm == doctest::Approx(-std::abs(pv.n) * ll).epsilon(1e-9));
    CHECK(pv.alignment < 1e-8);
  }
}

TEST_CASE("Weyl residual: bounded orbit field at R, none at a generic point") {
  const auto m = model_at(1.0);
  const Vec2 es = m.map.L().eig().e_s;
  const double w10 = weyl_residual(m.map, m.frame.r_point, es, 10);
  const double w20 = weyl_residual(m.map, m.frame.r_point, es, 20);
  CHECK(w20 < w10);
  CHECK(w20 < 1e-6);
  CHECK(weyl_residual(m.map, TorusPoint::make(0.3, 3.3, 5), normalized(Vec2{0.6, 0.8}), 20) > 0.5);
}

#include <cmath>

#include "anosov/model.hpp"
#include "anosov/shadowing.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace anosov;

namespace {
Model model_at(double t) {
  ModelParams p;
  p.t = t;
  return build_model(p);
}
}  // namespace

TEST_CASE("shadowing constant from the eigen projections") {
  const auto m = model_at(1.0);
  const auto& L = m.map.L();
  const double lam = L.lambda();
  // minus the cat map is symmetric, so both projections have norm 1
  CHECK(shadowing_constant(L) == doctest::Approx((1 + lam) / (lam - 1)).epsilon(1e-12));
}

TEST_CASE("a true orbit is its own shadow") {
  const auto m = model_at(1.0);
  const auto& L = m.map.L();
  PseudoOrbit po;
  TorusPoint y = TorusPoint::make(1.1, 2.3, 5);
  for (int n = -6; n <= 6; ++n) {
    po.points.push_back(y);
    y = L.apply(y);
  }
  const auto r = shadow_linear(L, po);
  CHECK(r.delta < 1e-13);
  CHECK(r.xi < 1e-13);
}

TEST_CASE("single defect: delta = xi / lambda") {
  const auto m = model_at(1.0);
  const auto& L = m.map.L();
  const double xi = 1e-4;
  for (int N : {3, 6, 10}) {
    PseudoOrbit po;
    TorusPoint y = TorusPoint::make(0.4, 1.7, 5);
    for (int n = -N; n <= N; ++n) {
      po.points.push_back(y);
      y = L.apply(y);
      if (n == 0) y = translate(y, L.eig().e_u * xi);
    }
    const auto r = shadow_linear(L, po);
    CHECK(r.xi == doctest::Approx(xi).epsilon(1e-9));
    CHECK(r.delta == doctest::Approx(xi / L.lambda()).epsilon(1e-8));
    const auto o = oracle::minimax_shadow(L, po);
    CHECK(o.delta == doctest::Approx(xi / L.lambda()).epsilon(1e-6));
  }
}

TEST_CASE("series shadow matches the minimax oracle on short windows") {
  const auto m = model_at(1.0);
  const auto& L = m.map.L();
  for (int N = 1; N <= 6; ++N)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto po = random_pseudo_orbit(L, N, 1e-4, seed);
      const auto r = shadow_linear(L, po);
      const auto o = oracle::minimax_shadow(L, po);
      CHECK(r.delta == doctest::Approx(o.delta).epsilon(0.01));
      CHECK(norm(r.w[static_cast<std::size_t>(N)] - o.w0) < 0.01 * o.delta);
      CHECK(r.delta <= shadowing_constant(L) * r.xi);
      CHECK(recompute_delta(L, po, r.x) == doctest::Approx(r.delta).epsilon(1e-6));
    }
}

TEST_CASE("random pseudo-orbits have the requested defect") {
  const auto m = model_at(1.0);
  const auto po = random_pseudo_orbit(m.map.L(), 8, 3e-5, 2);
  CHECK(po.points.size() == 17);
  CHECK(po.defect == doctest::Approx(3e-5).epsilon(1e-9));
  CHECK(pseudo_orbit_defect(step_of(m.map.L()), po.points) == po.defect);
}

TEST_CASE("tangent pseudo-orbits along the vertical vector at R") {
  const auto m = model_at(1.0);
  const auto R = m.frame.r_point;
  const Vec2 es = m.map.L().eig().e_s;
  const auto v = tangent_sequence(m.map, R, es, 30);
  REQUIRE(v.size() == 61);
  for (const Vec2& w : v) CHECK(norm(w) <= 1.0 + 1e-9);
  double prev = 0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto t = make_tangent_pseudo_orbit(m.map, R, es, eps, 30);
    CHECK(t.delta / eps == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(t.c_tilde > 0);
    CHECK(t.c_tilde < 50);
    if (prev > 0) CHECK(t.orbit.defect < prev / 50);  // ~ eps^2
    prev = t.orbit.defect;
  }
  // the vertical vector grows at t = 0
  CHECK_THROWS_AS(tangent_sequence(m.map.with_t(0.0), R, es, 10), DomainError);
}

TEST_CASE("quasi-Anosov probe") {
  const auto m = model_at(1.0);
  const auto R = m.frame.r_point;
  const auto& e = m.map.L().eig();
  const auto b = quasi_anosov_probe(m.map, R, e.e_s, 40);
  CHECK(b.bounded);
  CHECK(b.max_norm == doctest::Approx(1.0));
  const auto u = quasi_anosov_probe(m.map.with_t(0.0), R, e.e_u, 20);
  CHECK_FALSE(u.bounded);
  CHECK(u.max_norm == doctest::Approx(std::pow(e.lambda, 20)).epsilon(1e-9));
  CHECK(u.first_exceed == 1);
}

TEST_CASE("Fisher experiment: identity and conjugacy modes") {
  const auto m = model_at(1.0);
  const auto R = m.frame.r_point;
  const Vec2 es = m.map.L().eig().e_s;
  const std::vector<double> eps{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  const auto id = fisher_experiment(m.map, R, es, eps, 40, FisherMode::Identity);
  CHECK(id.defect_exponent == doctest::Approx(2.0).epsilon(0.1));
  CHECK(id.kappa == doctest::Approx(0.5).epsilon(0.1));
  CHECK(id.min_ratio > 0.5);
  CHECK(id.max_ratio < 2.0);
  const auto cj = fisher_experiment(m.map, R, es, eps, 40, FisherMode::Conjugacy);
  CHECK(cj.kappa >= 0.9);
  CHECK(cj.bound_holds);
  for (const auto& r : cj.rows) CHECK(r.delta_series == doctest::Approx(r.delta).epsilon(0.01));
}

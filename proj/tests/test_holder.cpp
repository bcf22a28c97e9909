#include <cmath>

#include "anosov/holder.hpp"
#include "anosov/model.hpp"
#include "doctest.h"

using namespace anosov;

TEST_CASE("scale ladder halves") {
  const auto s = scale_ladder(0.1, 4);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == 0.1);
  CHECK(s[3] == doctest::Approx(0.0125));
}

TEST_CASE("envelope fit recovers a synthetic power law") {
  std::vector<ScaleRow> rows;
  for (double s : scale_ladder(0.1, 8)) rows.push_back({s, 3.0 * std::pow(s, 0.7), 10, 0});
  const auto f = fit_envelope(rows, "synthetic");
  CHECK(f.exponent == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.constant == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.residual < 1e-12);
  CHECK(f.monotone_breaks == 0);
}

TEST_CASE("calibration maps recover their exponents") {
  HolderOptions ho;
  ho.pairs_per_scale = 300;
  const auto sc = scale_ladder(0.025, 12);
  for (double beta : {0.25, 0.5, 1.0}) {
    const auto f = estimate_exponent(power_map(beta, 5), calibration_pairs(5), sc, ho, "calibration");
    CHECK(f.exponent == doctest::Approx(beta).epsilon(0.02 / beta));
  }
}

TEST_CASE("exponent estimate: parallel equals serial") {
  const auto m = build_model({});
  HolderOptions ho;
  ho.pairs_per_scale = 50;
  const auto sc = scale_ladder(0.025, 6);
  const auto H = h_map(m.map, 22);
  const auto a = estimate_exponent(H, uniform_pairs(5), sc, ho, "u", Exec::Serial);
  const auto b = estimate_exponent(H, uniform_pairs(5), sc, ho, "u", Exec::Parallel);
  CHECK(a.exponent == b.exponent);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].worst == b.rows[i].worst);
}

TEST_CASE("estimate_exponent input validation") {
  HolderOptions ho;
  ho.pairs_per_scale = 10;
  CHECK_THROWS_AS(estimate_exponent(power_map(1, 5), calibration_pairs(5), scale_ladder(0.1, 4), ho, "x"), DomainError);
  const PointMap broken = [](const TorusPoint&) -> std::optional<TorusPoint> { return std::nullopt; };
  CHECK_THROWS_AS(estimate_exponent(broken, uniform_pairs(5), scale_ladder(0.1, 6), ho, "x"), DomainError);
}

TEST_CASE("h is close to Lipschitz away from the tangency orbit") {
  const auto m = build_model({});
  RegionAtlas atlas(m.map, m.frame);
  HolderOptions ho;
  ho.pairs_per_scale = 150;
  const auto f = estimate_exponent(h_map(m.map, 22), outside_u_pairs(atlas), scale_ladder(0.025, 8), ho, "out");
  CHECK(f.exponent >= 0.85);
}

TEST_CASE("samplers produce pairs at the requested distance") {
  const auto m = build_model({});
  RegionAtlas atlas(m.map, m.frame);
  auto g = rng_stream(3, 0);
  for (const auto& sampler : {uniform_pairs(5), near_orbit_pairs(atlas), outside_u_pairs(atlas),
                              linear_leaf_pairs(m.map.L(), Orientation::Stable)}) {
    int got = 0;
    for (int i = 0; i < 200 && got < 20; ++i) {
      const auto p = sampler(g, 1e-3);
      if (!p) continue;
      ++got;
      CHECK(distance(p->a, p->b) == doctest::Approx(1e-3).epsilon(1e-6));
    }
    CHECK(got == 20);
  }
  for (int i = 0; i < 50; ++i)
    if (const auto p = outside_u_pairs(atlas)(g, 1e-2)) {
      CHECK_FALSE(atlas.in_U(p->a));
      CHECK_FALSE(atlas.in_U(p->b));
    }
}

TEST_CASE("beak inequality on a small sample") {
  const auto m = build_model({});
  RegionAtlas atlas(m.map, m.frame);
  BeakOptions bo;
  bo.samples = 20;
  const auto rep = beak_probe(m.map, atlas, bo);
  CHECK(rep.case_a + rep.case_b > 20);
  CHECK(rep.case_a_fail == 0);
  CHECK(rep.case_b_fail == 0);
  for (const auto& r : rep.rows)
    if (r.kind == 'A' && r.holds) CHECK(std::fabs(r.y1 - r.y3) <= 1.0 * std::sqrt(std::fabs(r.x1 - r.x2)));
}

#include <cmath>
#include <numbers>

#include "anosov/model.hpp"
#include "doctest.h"

using namespace anosov;

namespace {
Model model_at(double t, ProfileKind kind = ProfileKind::Quadratic, double alpha = 1.0) {
  ModelParams p;
  p.t = t;
  p.profile = kind;
  p.alpha = alpha;
  return build_model(p);
}
}  // namespace

TEST_CASE("bump profiles: endpoints, monotonicity, derivative") {
  for (auto [kind, alpha] : {std::pair{ProfileKind::Quadratic, 1.0}, std::pair{ProfileKind::Power, 1.0},
                             std::pair{ProfileKind::Power, 0.5}, std::pair{ProfileKind::Power, 2.0}}) {
    BumpProfile b{kind, 0.25, alpha};
    CHECK(b.eval(0).first == doctest::Approx(std::numbers::pi / 2));
    CHECK(b.eval(0.25).first == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(b.eval(0.3).first == 0.0);
    double prev = b.eval(0).first;
    for (int i = 1; i <= 1000; ++i) {
      const double rho = 0.25 * i / 1000;
      const double g = b.eval(rho).first;
      CHECK(g <= prev + 1e-15);
      prev = g;
      if (i % 50 == 7) {  // away from the knot at r/2 and from 0
        const double h = 1e-6;
        const double fd = (b.eval(rho + h).first - b.eval(rho - h).first) / (2 * h);
        CHECK(b.eval(rho).second == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
  CHECK(parse_profile("power") == ProfileKind::Power);
  CHECK_THROWS_AS(parse_profile("cubic"), DomainError);
}

TEST_CASE("map invariants across t and profiles") {
  for (double t : {0.0, 0.25, 1.0}) {
    const auto m = model_at(t);
    const auto rep = map_check(m.map, 20000, 3);
    CHECK(rep.max_fd_rel < 1e-5);
    CHECK(rep.max_det < 1e-12);
    CHECK(rep.max_shear < 1e-8);
    CHECK(rep.max_roundtrip < 1e-10);
    CHECK(rep.max_identity == 0.0);
  }
  const auto p2 = model_at(1.0, ProfileKind::Power, 2.0);
  CHECK(map_check(p2.map, 20000, 4).max_fd_rel < 1e-5);
}

TEST_CASE("map_check: parallel kernel equals the serial reference") {
  const auto m = model_at(1.0);
  const auto a = map_check(m.map, 4000, 9, 1e-6, Exec::Serial);
  const auto b = map_check(m.map, 4000, 9, 1e-6, Exec::Parallel);
  CHECK(a.max_fd_rel == b.max_fd_rel);
  CHECK(a.max_shear == b.max_shear);
  CHECK(a.max_roundtrip == b.max_roundtrip);
}

TEST_CASE("t = 0 is the linear map") {
  const auto m = model_at(0.0);
  auto g = rng_stream(5, 1);
  for (int i = 0; i < 500; ++i) {
    const auto p = TorusPoint::make(uniform(g, 0, 5), uniform(g, 0, 5), 5);
    CHECK(m.map.f(p) == m.map.L().apply(p));
    const Mat2 d = m.map.df(p) - m.map.L().real();
    CHECK(op_norm(d) == 0.0);
  }
}

TEST_CASE("theta is a rotation about R preserving distance to R") {
  const auto m = model_at(1.0);
  const auto R = m.frame.r_point;
  auto g = rng_stream(5, 2);
  for (int i = 0; i < 500; ++i) {
    const double rho = uniform(g, 0, 0.3), phi = uniform(g, 0, 6.283);
    const auto p = translate(R, {rho * std::cos(phi), rho * std::sin(phi)});
    const auto q = m.map.theta(p);
    CHECK(distance(q, R) == doctest::Approx(rho).epsilon(1e-12));
    // clockwise by gamma(rho)
    const Vec2 a = lift_delta(R, p), b = lift_delta(R, q);
    if (rho > 1e-3 && rho < 0.25) {
      const double turned = std::atan2(cross(b, a), dot(a, b));
      CHECK(turned == doctest::Approx(m.map.profile().eval(rho).first).epsilon(1e-10));
    }
  }
  // at R the derivative is the rotation by pi/2
  const Mat2 d = m.map.d_theta(R);
  CHECK(op_norm(d - Mat2::rotation_cw(std::numbers::pi / 2)) < 1e-15);
}

TEST_CASE("vertical vector at R decays like lambda^-|n| at t = 1") {
  const auto m = model_at(1.0);
  const double lam = m.map.L().lambda();
  const auto d = vertical_vector_decay(m.map, 15);
  CHECK_FALSE(d.warning);
  for (std::size_t i = 0; i < d.n.size(); ++i)
    CHECK(d.norms[i] == doctest::Approx(std::pow(lam, -std::abs(d.n[i]))).epsilon(1e-9));
  CHECK(vertical_vector_decay(model_at(0.5).map, 3).warning);
}

TEST_CASE("invalid parameters raise DomainError") {
  ModelParams p;
  p.t = 1.5;
  CHECK_THROWS_AS(build_model(p), DomainError);
  p.t = 1;
  p.r = 3.0;
  CHECK_THROWS_AS(build_model(p), DomainError);
  p.r = -1;
  p.profile = ProfileKind::Power;
  p.alpha = 2.5;
  CHECK_THROWS_AS(build_model(p), DomainError);
  ModelParams q;
  q.m = {1, 1, 0, 1};
  CHECK_THROWS_AS(build_model(q), DomainError);
}

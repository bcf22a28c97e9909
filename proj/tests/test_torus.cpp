#include <cmath>

#include "anosov/torus.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace anosov;

namespace {
const IntMat2 kMinusCat{-2, -1, -1, -1};
const IntMat2 kCat{2, 1, 1, 1};
}  // namespace

TEST_CASE("eigendata matches the characteristic polynomial") {
  for (const IntMat2& m : {kMinusCat, kCat, IntMat2{3, 1, 2, 1}, IntMat2{2, 1, 3, 2}}) {
    const auto e = eigen_data(m);
    // roots of x^2 - tr x + det
    const double tr = double(m.trace()), det = double(m.det());
    const double disc = std::sqrt(tr * tr - 4 * det);
    const double r1 = (tr + disc) / 2, r2 = (tr - disc) / 2;
    const double big = std::fabs(r1) > std::fabs(r2) ? r1 : r2, small = std::fabs(r1) > std::fabs(r2) ? r2 : r1;
    CHECK(e.mu_u == doctest::Approx(big).epsilon(1e-14));
    CHECK(e.mu_s == doctest::Approx(small).epsilon(1e-14));
    CHECK(e.lambda == doctest::Approx(std::fabs(big)).epsilon(1e-14));
    const Mat2 M = m.to_real();
    CHECK(norm(M * e.e_u - e.e_u * e.mu_u) < 1e-13);
    CHECK(norm(M * e.e_s - e.e_s * e.mu_s) < 1e-13);
    CHECK(norm(e.e_u) == doctest::Approx(1.0));
  }
  CHECK(eigen_data(kMinusCat).lambda == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-15));
  CHECK(eigen_data(kMinusCat).mu_u < 0);
}

TEST_CASE("non-hyperbolic or non-unimodular matrices are rejected") {
  CHECK_THROWS_AS(eigen_data(IntMat2{1, 1, 0, 1}), DomainError);
  CHECK_THROWS_AS(eigen_data(IntMat2{2, 0, 0, 1}), DomainError);
  CHECK_THROWS_AS(eigen_data(IntMat2{0, -1, 1, 0}), DomainError);
  CHECK_THROWS_AS(ToralAutomorphism(kCat, 0), DomainError);
}

TEST_CASE("torus arithmetic") {
  CHECK(wrap_coord(5.25, 5) == doctest::Approx(0.25));
  CHECK(wrap_coord(-0.25, 5) == doctest::Approx(4.75));
  CHECK(wrap_coord(-1e-18, 5) < 5.0);
  const auto a = TorusPoint::make(4.9, 0.1, 5), b = TorusPoint::make(0.1, 4.9, 5);
  const Vec2 d = lift_delta(a, b);
  CHECK(d.x == doctest::Approx(0.2));
  CHECK(d.y == doctest::Approx(-0.2));
  CHECK(distance(a, b) == doctest::Approx(std::sqrt(0.08)));
  CHECK(distance(translate(a, d), b) < 1e-14);
}

TEST_CASE("automorphism is a bijection with exact inverse") {
  ToralAutomorphism L(kMinusCat, 5);
  auto g = rng_stream(7, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto p = TorusPoint::make(uniform(g, 0, 5), uniform(g, 0, 5), 5);
    CHECK(distance(L.apply_inv(L.apply(p)), p) < 1e-13);
    CHECK(distance(L.apply_pow(p, 3), L.apply(L.apply(L.apply(p)))) < 1e-12);
    const Vec2 v{uniform(g, -1, 1), uniform(g, -1, 1)};
    CHECK(norm(L.from_eigen_coords(L.eigen_coords(v)) - v) < 1e-14);
  }
}

TEST_CASE("periodic point counts agree with lattice enumeration") {
  for (const IntMat2& m : {kMinusCat, kCat}) {
    for (int p = 1; p <= 4; ++p) {
      const auto brute = oracle::linear_periodic_points(m, 5, p);
      CHECK(periodic_point_count(m, p) == static_cast<std::int64_t>(brute.size()));
      ToralAutomorphism L(m, 5);
      const auto pts = periodic_points_linear(L, p);
      REQUIRE(pts.size() == brute.size());
      for (const auto& x : pts) {
        CHECK(distance(L.apply_pow(x, p), x) < 1e-11);
        CHECK(std::any_of(brute.begin(), brute.end(), [&](const TorusPoint& y) { return distance(x, y) < 1e-12; }));
      }
    }
  }
  // the count does not depend on the cover
  CHECK(oracle::linear_periodic_points(kMinusCat, 3, 2).size() == oracle::linear_periodic_points(kMinusCat, 7, 2).size());
  CHECK(periodic_point_count(kMinusCat, 1) == 5);
  CHECK(periodic_point_count(kCat, 1) == 1);
  CHECK_THROWS_AS(periodic_points_linear(ToralAutomorphism(kMinusCat, 5), 11), DomainError);
}

TEST_CASE("fixed points of minus the cat map on the 5-cover include P and Q") {
  ToralAutomorphism L(kMinusCat, 5);
  const auto fp = fixed_points(L);
  CHECK(fp.size() == 5);
  auto has = [&](double x, double y) {
    const auto q = TorusPoint::make(x, y, 5);
    return std::any_of(fp.begin(), fp.end(), [&](const TorusPoint& p) { return distance(p, q) < 1e-12; });
  };
  CHECK(has(0, 0));
  CHECK(has(1, 2));
}

TEST_CASE("heteroclinic frame lies on both invariant lines") {
  ToralAutomorphism L(kMinusCat, 5);
  const auto P = TorusPoint::make(0, 0, 5), Q = TorusPoint::make(1, 2, 5);
  for (FrameRule rule : {FrameRule::Compact, FrameRule::EqualDistance}) {
    const auto fr = build_heteroclinic_frame(L, P, Q, rule);
    CHECK(fr.residual_s < 1e-12);
    CHECK(fr.residual_u < 1e-12);
    // independent reconstruction from the lifted parameters
    CHECK(distance(translate(P, L.eig().e_s * fr.s_r), fr.r_point) < 1e-12);
    CHECK(distance(translate(Q, L.eig().e_u * fr.t_r), fr.r_point) < 1e-12);
    CHECK(std::fabs(fr.s_r) == doctest::Approx(fr.dist_pr));
    CHECK(std::fabs(fr.t_r) == doctest::Approx(fr.dist_qr));
    if (rule == FrameRule::EqualDistance)
      CHECK(std::fabs(fr.dist_pr - fr.dist_qr) / std::max(fr.dist_pr, fr.dist_qr) < 0.05);
  }
  const auto fr = build_heteroclinic_frame(L, P, Q, FrameRule::Compact);
  CHECK(fr.r_point.x == doctest::Approx(4.381966).epsilon(1e-6));
  CHECK(fr.r_point.y == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(parse_frame_rule(to_string(FrameRule::EqualDistance)) == FrameRule::EqualDistance);
}

TEST_CASE("segment distance") {
  const auto base = TorusPoint::make(1, 1, 5);
  CHECK(distance_to_segment(TorusPoint::make(1.5, 2, 5), base, {1, 0}, 0, 1) == doctest::Approx(1.0));
  CHECK(distance_to_segment(TorusPoint::make(3, 1, 5), base, {1, 0}, 0, 1) == doctest::Approx(1.0));
  // wraps: the segment near x = 4.9 is close to x = 0.1
  CHECK(distance_to_segment(TorusPoint::make(0.1, 1, 5), TorusPoint::make(4.5, 1, 5), {1, 0}, 0, 0.4) ==
        doctest::Approx(0.2));
}

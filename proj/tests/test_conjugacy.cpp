#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "anosov/model.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace anosov;

namespace {
Model model_at(double t) {
  ModelParams p;
  p.t = t;
  return build_model(p);
}

// u from the cohomological equation u(f x) = L u(x) - p(x), p(x) = f(x) - L(x), solved in eigen coordinates:
// a(x) = sum_{n>=0} mu_u^{-(n+1)} p_u(f^n x),  b(x) = -sum_{n>=1} mu_s^{n-1} p_s(f^{-n} x).
Vec2 u_oracle(const PerturbedMap& f, const TorusPoint& x, int depth) {
  const auto& L = f.L();
  const auto& e = L.eig();
  auto p = [&](const TorusPoint& y) { return L.eigen_coords(lift_delta(L.apply(y), f.f(y))); };
  double a = 0, b = 0;
  TorusPoint y = x;
  for (int n = 0; n < depth; ++n) {
    a += std::pow(e.mu_u, -(n + 1)) * p(y).x;
    y = f.f(y);
  }
  y = x;
  for (int n = 1; n <= depth; ++n) {
    y = f.f_inv(y);
    b -= std::pow(e.mu_s, n - 1) * p(y).y;
  }
  return L.from_eigen_coords({a, b});
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("anosov_test_" + name);
}
}  // namespace

TEST_CASE("series depth follows the geometric tail bound") {
  const auto m = model_at(1.0);
  const double lam = m.map.L().lambda(), r = m.map.r();
  for (double tol : {1e-6, 1e-9, 1e-12}) {
    const int want = static_cast<int>(std::ceil(std::log(tol * (1 - 1 / lam) / (2 * r)) / std::log(1 / lam)));
    CHECK(series_depth(m.map, tol) == want);
  }
  CHECK(series_depth(m.map, 1e-9) == 22);
  CHECK_THROWS_AS(series_depth(m.map, 1e-300), DomainError);
}

TEST_CASE("h is the identity at t = 0") {
  const auto m = model_at(0.0);
  auto g = rng_stream(21, 0);
  for (int i = 0; i < 100; ++i) {
    const auto x = TorusPoint::make(uniform(g, 0, 5), uniform(g, 0, 5), 5);
    CHECK(norm(displacement(m.map, x, 22)) == 0.0);
  }
}

TEST_CASE("displacement agrees with an independent solution of the cohomological equation") {
  const auto m = model_at(1.0);
  auto g = rng_stream(21, 1);
  for (int i = 0; i < 300; ++i) {
    const auto x = TorusPoint::make(uniform(g, 0, 5), uniform(g, 0, 5), 5);
    CHECK(norm(displacement(m.map, x, 40) - u_oracle(m.map, x, 40)) < 1e-12);
  }
}

TEST_CASE("conjugacy equation holds to 1e-9 at the default depth") {
  const auto m = model_at(1.0);
  const int N = series_depth(m.map, 1e-9);
  auto g = rng_stream(21, 2);
  double worst = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto x = TorusPoint::make(uniform(g, 0, 5), uniform(g, 0, 5), 5);
    worst = std::max(worst, conjugacy_residual(m.map, x, N));
  }
  CHECK(worst < 1e-9);
  // fixed points of L away from B stay fixed
  CHECK(distance(conjugacy_eval(m.map, m.frame.p, N), m.frame.p) < 1e-15);
  CHECK(distance(conjugacy_eval(m.map, m.frame.q, N), m.frame.q) < 1e-15);
}

TEST_CASE("grid build, save, load and cache validation") {
  const auto m = model_at(1.0);
  const auto g1 = build_grid(m.map, 320, 1e-9, Exec::Serial);
  const auto g2 = build_grid(m.map, 320, 1e-9, Exec::Parallel);
  CHECK(g1.ux == g2.ux);
  CHECK(g1.uy == g2.uy);
  CHECK(norm(g1.node_u(3, 7) - displacement(m.map, g1.node(3, 7), g1.meta.truncation)) < 1e-15);
  CHECK(norm(g1.interpolate(g1.node(5, 9)) - g1.node_u(5, 9)) < 1e-15);

  const auto path = temp_file("grid.bin");
  save_grid(g1, path.string());
  const auto want = grid_meta_for(m.map, 320, 1e-9, g1.meta.truncation);
  const auto back = load_grid(path.string(), &want);
  CHECK(back.ux == g1.ux);
  CHECK(back.uy == g1.uy);

  const auto other = grid_meta_for(m.map.with_t(0.5), 320, 1e-9, g1.meta.truncation);
  CHECK_THROWS_AS(load_grid(path.string(), &other), GridFormatError);

  // flip one payload byte
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-9, std::ios::end);
    char c;
    f.read(&c, 1);
    c ^= 0x40;
    f.seekp(-9, std::ios::end);
    f.write(&c, 1);
  }
  try {
    load_grid(path.string());
    FAIL("corrupted grid loaded");
  } catch (const GridFormatError& e) {
    CHECK(e.field() == "checksum");
  }
  std::filesystem::remove(path);
}

TEST_CASE("inverse conjugacy") {
  const auto m = model_at(1.0);
  const int N = series_depth(m.map, 1e-9);
  const auto grid = build_grid(m.map, 320, 1e-9);
  auto g = rng_stream(21, 3);
  for (int i = 0; i < 100; ++i) {
    const auto y = TorusPoint::make(uniform(g, 0, 5), uniform(g, 0, 5), 5);
    const auto r = conjugacy_inverse(m.map, y, N, 1e-9, i % 2 ? &grid : nullptr);
    CHECK(r.converged);
    CHECK(distance(conjugacy_eval(m.map, r.x, N), y) < 1e-9);
  }
  // near the image of R, where Dh is singular
  const auto hR = conjugacy_eval(m.map, m.frame.r_point, N);
  for (double d : {1e-3, 1e-5}) {
    const auto r = conjugacy_inverse(m.map, translate(hR, {d, -d}), N, 1e-9, &grid);
    CHECK(r.converged);
  }
}

TEST_CASE("h does not collapse grid pairs") {
  const auto m = model_at(1.0);
  const auto grid = build_grid(m.map, 320, 1e-9);
  const auto rep = injectivity_probe(grid, 0.05, 2000, 4);
  CHECK(rep.pairs == 2000);
  CHECK(rep.collapses == 0);
  CHECK(rep.min_ratio > 0);
}

TEST_CASE("grid checksum is the byte sum") {
  const unsigned char a[] = {1, 2, 3, 255}, b[] = {1, 2, 3, 254};
  CHECK(byte_checksum(a, 4) == 261);
  CHECK(byte_checksum(b, 4) == 260);
  CHECK(byte_checksum(a, 0) == 0);
}

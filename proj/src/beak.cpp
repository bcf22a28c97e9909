#include <algorithm>
#include <cmath>
#include <numbers>

#include "anosov/holder.hpp"

namespace anosov {

namespace {

struct Crossing {
  std::size_t ia = 0;  // polyline index on the unstable leaf (segment ia-1 .. ia)
  Vec2 at;             // offset from the unstable leaf's base
};

// Crossings of the unstable polyline with the stable one. The stable leaf is a graph over the e_s
// coordinate (it lies in the vertical cone), so each unstable vertex gets a signed horizontal gap.
std::vector<Crossing> crossings(const LeafSegment& u, const LeafSegment& s, const ToralAutomorphism& L) {
  const Vec2 shift = lift_delta(u.base, s.base);
  std::vector<Vec2> sc;
  for (const auto& o : s.offsets) sc.push_back(L.eigen_coords(o + shift));
  std::sort(sc.begin(), sc.end(), [](Vec2 a, Vec2 b) { return a.y < b.y; });
  auto gap = [&](Vec2 p, bool& ok) {
    const Vec2 q = L.eigen_coords(p);
    if (sc.size() < 2 || q.y < sc.front().y || q.y > sc.back().y) {
      ok = false;
      return 0.0;
    }
    ok = true;
    auto it = std::lower_bound(sc.begin(), sc.end(), q.y, [](Vec2 a, double y) { return a.y < y; });
    if (it == sc.begin()) ++it;
    const Vec2 a = *(it - 1), b = *it;
    const double w = b.y > a.y ? (q.y - a.y) / (b.y - a.y) : 0.0;
    return q.x - (a.x + (b.x - a.x) * w);
  };
  std::vector<Crossing> out;
  bool ok0 = false;
  double g0 = gap(u.offsets[0], ok0);
  for (std::size_t i = 1; i < u.offsets.size(); ++i) {
    bool ok1 = false;
    const double g1 = gap(u.offsets[i], ok1);
    if (ok0 && ok1 && ((g0 <= 0.0 && g1 > 0.0) || (g0 >= 0.0 && g1 < 0.0))) {
      const double w = g0 / (g0 - g1);
      out.push_back({i, u.offsets[i - 1] + (u.offsets[i] - u.offsets[i - 1]) * w});
    }
    g0 = g1;
    ok0 = ok1;
  }
  return out;
}

double seg_dist(Vec2 q, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  const double t = l2 > 0.0 ? std::clamp(dot(q - a, ab) / l2, 0.0, 1.0) : 0.0;
  return norm(q - (a + ab * t));
}

bool inside(const std::vector<Vec2>& poly, Vec2 q) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    if ((poly[i].y > q.y) != (poly[j].y > q.y) &&
        q.x < (poly[j].x - poly[i].x) * (q.y - poly[i].y) / (poly[j].y - poly[i].y) + poly[i].x)
      in = !in;
  }
  return in;
}

struct CaseAResult {
  bool found = false;
  BeakSample s;
};

CaseAResult case_a(const PerturbedMap& map, const RegionAtlas& atlas, int n, std::mt19937_64& g, const BeakOptions& opt) {
  CaseAResult res;
  const auto& L = map.L();
  const TorusPoint c = atlas.orbit(n);
  // distance to f^n(R) log-uniform so that the tip scale sqrt|x1 - x2| is resolved at every separation
  const double rmax = atlas.rtilde() * std::pow(atlas.lambda(), -3 * n);
  const double rad = rmax * std::pow(1e-5, uniform01(g));
  const double ang = uniform(g, 0, 2 * std::numbers::pi);
  const double x1 = rad * std::cos(ang), y1 = rad * std::sin(ang);
  double dx = opt.dx_min * std::pow(opt.dx_max / opt.dx_min, uniform01(g));
  const TorusPoint a = translate(c, L.from_eigen_coords({x1, y1}));
  // grow the window until W^u(a) meets W^s(b); tolerance scaled so the integration error stays below dx/100
  std::vector<Crossing> xs;
  LeafSegment wu;
  bool sided = false;
  double x2 = x1 + dx;
  for (double half = 0.5 * std::sqrt(dx); xs.empty() && half <= map.r() / 10; half *= 2.0) {
    LeafOptions lo;
    lo.tol = std::max(1e-13, 0.01 * dx / half);
    lo.h0 = half / 64;
    lo.h_max = half / 8;
    lo.max_steps = 3000;
    wu = local_leaf(map, a, Orientation::Unstable, half, lo);
    if (wu.truncated) return res;
    if (!sided) {
      // put b on the side W^u(a) bends towards, otherwise the leaves do not bound a beak
      const double bend = L.eigen_coords(wu.offsets.front()).x + L.eigen_coords(wu.offsets.back()).x;
      if (bend < 0.0) dx = -dx;
      x2 = x1 + dx;
      sided = true;
    }
    const TorusPoint b = translate(c, L.from_eigen_coords({x2, y1}));
    const LeafSegment ws = local_leaf(map, b, Orientation::Stable, half, lo);
    if (ws.truncated) return res;
    xs = crossings(wu, ws, L);
  }
  if (xs.empty()) return res;
  // base index of a in the concatenated polyline
  std::size_t ia = 0;
  for (std::size_t i = 0; i < wu.offsets.size(); ++i)
    if (wu.offsets[i].x == 0.0 && wu.offsets[i].y == 0.0) ia = i;
  const Crossing* best = &xs[0];
  for (const auto& x : xs) {
    const auto dist_idx = [&](const Crossing& q) {
      return q.ia > ia ? q.ia - ia : ia - q.ia + 1;
    };
    if (dist_idx(x) < dist_idx(*best)) best = &x;
  }
  // beak polygon in local coordinates at f^n(R): a -> e along W^u, e -> b along W^s, b -> a
  const Vec2 base = lift_delta(c, a);
  std::vector<Vec2> poly;
  if (best->ia > ia)
    for (std::size_t i = ia; i < best->ia; ++i) poly.push_back(L.eigen_coords(base + wu.offsets[i]));
  else
    for (std::size_t i = ia + 1; i-- > best->ia;) poly.push_back(L.eigen_coords(base + wu.offsets[i]));
  const Vec2 ev = L.eigen_coords(base + best->at);
  poly.push_back(ev);
  // stable arc from e back to b, straight enough to be represented by its chord
  poly.push_back({x2, y1});
  double D = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    D = std::fmin(D, seg_dist({0, 0}, poly[i], poly[(i + 1) % poly.size()]));
  if (poly.size() >= 3 && inside(poly, {0, 0})) D = 0.0;
  res.found = true;
  res.s.n = n;
  res.s.kind = 'A';
  res.s.x1 = x1;
  res.s.y1 = y1;
  res.s.x2 = x2;
  res.s.x3 = ev.x;
  res.s.y3 = ev.y;
  res.s.D = D;
  const double dy = std::fabs(y1 - ev.y), ddx = std::fabs(dx);
  res.s.holds = ddx >= dy * (D - D * D) && (D > 0.5 || ddx >= 0.5 * dy * dy);
  return res;
}

std::optional<BeakSample> case_b(const PerturbedMap& map, const RegionAtlas& atlas, int n, std::mt19937_64& g) {
  const auto& L = map.L();
  const auto& e = L.eig();
  const TorusPoint c = atlas.orbit(n);
  const double ymax = atlas.rtilde() * std::pow(atlas.lambda(), -3 * n);
  const double y3 = ymax * std::pow(1e-4, uniform01(g));
  const TorusPoint ep = translate(c, e.e_s * y3);
  // follow W^u(e) towards growing y
  const Vec2 v = unstable_direction(map, ep).dir.unit();
  const Vec2 vu = dot(v, e.e_u) >= 0 ? v : v * -1.0;
  const double len = 5.0 * y3;
  LeafOptions lo;
  lo.tol = std::max(1e-13, 0.002 * y3);
  lo.h0 = len / 64;
  lo.h_max = len / 8;
  lo.max_steps = 3000;
  const LeafSegment wu = integrate_leaf(map, ep, Orientation::Unstable, dot(vu, e.e_s) >= 0 ? len : -len, lo);
  if (wu.truncated || wu.offsets.size() < 2) return std::nullopt;
  const std::size_t i = 1 + static_cast<std::size_t>(uniform01(g) * static_cast<double>(wu.offsets.size() - 1));
  const Vec2 q = L.eigen_coords(lift_delta(c, wu.points[std::min(i, wu.offsets.size() - 1)]));
  if (q.y <= y3) return std::nullopt;
  BeakSample s;
  s.n = n;
  s.kind = 'B';
  s.x1 = q.x;
  s.y1 = q.y;
  s.x2 = 0.0;
  s.x3 = 0.0;
  s.y3 = y3;
  s.holds = std::fabs(s.x1 - s.x3) >= std::pow(s.y1 - s.y3, 2) / 3.0;
  return s;
}

}  // namespace

BeakReport beak_probe(const PerturbedMap& map, const RegionAtlas& atlas, const BeakOptions& opt, Exec exec) {
  BeakReport rep;
  const int nmax = std::min(opt.n_max, atlas.params().depth);
  const std::size_t attempts = 4 * opt.samples;
  std::vector<CaseAResult> ra(attempts);
  for_each_index(attempts, exec, [&](std::size_t i) {
    auto g = rng_stream(opt.seed, i);
    const int n = static_cast<int>(uniform01(g) * (nmax + 1));
    ra[i] = case_a(map, atlas, n, g, opt);
  });
  std::vector<std::optional<BeakSample>> rb(opt.samples);
  for_each_index(opt.samples, exec, [&](std::size_t i) {
    auto g = rng_stream(opt.seed ^ 0x5bd1e995ULL, i);
    const int n = static_cast<int>(uniform01(g) * (nmax + 1));
    for (int tries = 0; tries < 8 && !rb[i]; ++tries) rb[i] = case_b(map, atlas, n, g);
  });

  const double lo = std::floor(std::log10(opt.dx_min));
  const int decades = static_cast<int>(std::ceil(std::log10(opt.dx_max)) - lo);
  std::vector<double> cmax(static_cast<std::size_t>(std::max(decades, 1)), 0.0);
  for (const auto& r : ra) {
    if (!r.found) {
      ++rep.skipped;
      continue;
    }
    const double dx = std::fabs(r.s.x2 - r.s.x1), dy = std::fabs(r.s.y1 - r.s.y3);
    const int d = std::clamp(static_cast<int>(std::floor(std::log10(dx) - lo)), 0, static_cast<int>(cmax.size()) - 1);
    cmax[static_cast<std::size_t>(d)] = std::fmax(cmax[static_cast<std::size_t>(d)], dy / std::sqrt(dx));
    if (r.s.D >= dy && rep.case_a < opt.samples) {
      ++rep.case_a;
      if (!r.s.holds) ++rep.case_a_fail;
      rep.rows.push_back(r.s);
    }
  }
  for (const auto& b : rb) {
    if (!b) {
      ++rep.skipped;
      continue;
    }
    ++rep.case_b;
    if (!b->holds) ++rep.case_b_fail;
    rep.rows.push_back(*b);
  }
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (std::size_t d = 0; d < cmax.size(); ++d) {
    rep.decade_lo.push_back(std::pow(10.0, lo + static_cast<double>(d)));
    rep.decade_c.push_back(cmax[d]);
    if (cmax[d] > 0.0) {
      mn = std::fmin(mn, cmax[d]);
      mx = std::fmax(mx, cmax[d]);
    }
  }
  rep.c_spread = mx > 0.0 ? mx / mn : 0.0;
  return rep;
}

}  // namespace anosov

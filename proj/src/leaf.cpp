#include "anosov/leaf.hpp"

#include <algorithm>
#include <cmath>

namespace anosov {

namespace {

struct FieldEval {
  Vec2 v;
  bool ok;
};

FieldEval field(const PerturbedMap& map, const TorusPoint& x, Orientation o, Vec2 ref, const DirectionOptions& dopt) {
  const DirectionResult d = o == Orientation::Unstable ? unstable_direction(map, x, dopt) : stable_direction(map, x, dopt);
  Vec2 v = d.dir.unit();
  if (dot(v, ref) < 0.0) v = v * -1.0;
  return {v, d.converged};
}

}  // namespace

LeafSegment integrate_leaf(const PerturbedMap& map, const TorusPoint& p, Orientation o, double length,
                           const LeafOptions& opt) {
  LeafSegment seg;
  seg.base = p;
  seg.orientation = o;
  seg.points.push_back(p);
  seg.offsets.push_back({0.0, 0.0});
  const Vec2 e = o == Orientation::Unstable ? map.L().eig().e_u : map.L().eig().e_s;
  Vec2 ref = length >= 0.0 ? e : e * -1.0;
  const double total = std::fabs(length);
  double h = std::min(opt.h0, total);
  Vec2 x{0.0, 0.0};
  std::size_t steps = 0;
  while (seg.arclength < total) {
    if (++steps > opt.max_steps) {
      seg.truncated = true;
      break;
    }
    h = std::min(h, total - seg.arclength);
    const TorusPoint X = translate(p, x);
    const FieldEval v0 = field(map, X, o, ref, opt.dir);
    const FieldEval vm = field(map, translate(p, x + v0.v * (0.5 * h)), o, v0.v, opt.dir);
    const Vec2 full = x + vm.v * h;
    const FieldEval vq = field(map, translate(p, x + v0.v * (0.25 * h)), o, v0.v, opt.dir);
    const Vec2 half = x + vq.v * (0.5 * h);
    const FieldEval vh = field(map, translate(p, half), o, v0.v, opt.dir);
    const FieldEval vq2 = field(map, translate(p, half + vh.v * (0.25 * h)), o, v0.v, opt.dir);
    const Vec2 two = half + vq2.v * (0.5 * h);
    if (!(v0.ok && vm.ok && vq.ok && vh.ok && vq2.ok)) {
      seg.truncated = true;
      break;
    }
    const double err = norm(full - two);
    if (err > opt.tol * h && h > opt.h_min) {
      ++seg.steps_rejected;
      h *= 0.5;
      continue;
    }
    // Richardson: the two half steps are the better estimate
    const double step = norm(two - x);
    seg.arclength += step;
    x = two;
    ref = vq2.v;
    seg.offsets.push_back(x);
    seg.points.push_back(translate(p, x));
    if (err < 0.1 * opt.tol * h) h = std::min(2.0 * h, opt.h_max);
  }
  return seg;
}

LeafSegment local_leaf(const PerturbedMap& map, const TorusPoint& p, Orientation o, double half,
                       const LeafOptions& opt) {
  const LeafSegment neg = integrate_leaf(map, p, o, -half, opt);
  const LeafSegment pos = integrate_leaf(map, p, o, half, opt);
  LeafSegment out;
  out.base = p;
  out.orientation = o;
  out.truncated = neg.truncated || pos.truncated;
  out.steps_rejected = neg.steps_rejected + pos.steps_rejected;
  out.arclength = neg.arclength + pos.arclength;
  for (std::size_t i = neg.points.size(); i-- > 1;) {
    out.points.push_back(neg.points[i]);
    out.offsets.push_back(neg.offsets[i]);
  }
  out.points.insert(out.points.end(), pos.points.begin(), pos.points.end());
  out.offsets.insert(out.offsets.end(), pos.offsets.begin(), pos.offsets.end());
  return out;
}

namespace {

double point_segment_distance(Vec2 q, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  const double s = l2 > 0.0 ? std::clamp(dot(q - a, ab) / l2, 0.0, 1.0) : 0.0;
  return norm(q - (a + ab * s));
}

double polyline_length(const std::vector<TorusPoint>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += norm(lift_delta(pts[i - 1], pts[i]));
  return len;
}

}  // namespace

double distance_to_polyline(const LeafSegment& seg, const TorusPoint& q) {
  const Vec2 d = lift_delta(seg.base, q);
  double best = std::numeric_limits<double>::infinity();
  if (seg.offsets.size() == 1) return norm(d - seg.offsets[0]);
  for (std::size_t i = 1; i < seg.offsets.size(); ++i)
    best = std::fmin(best, point_segment_distance(d, seg.offsets[i - 1], seg.offsets[i]));
  return best;
}

double leaf_invariance_error(const PerturbedMap& map, const LeafSegment& seg, const LeafOptions& opt) {
  std::vector<TorusPoint> img;
  img.reserve(seg.points.size());
  for (const auto& q : seg.points) img.push_back(map.f(q));
  const TorusPoint fb = map.f(seg.base);
  double reach = 0.0;
  for (const auto& q : img) reach = std::fmax(reach, distance(fb, q));
  // the image leaf is at most as long as the image polyline; integrate a bit beyond it on both sides
  const double half = std::fmin(polyline_length(img), 2.0 * reach) * 1.05 + 10.0 * opt.h_min;
  const LeafSegment ref = local_leaf(map, fb, seg.orientation, half, opt);
  double worst = 0.0;
  for (const auto& q : img) worst = std::fmax(worst, distance_to_polyline(ref, q));
  return worst;
}

std::optional<TorusPoint> intersect_leaves(const LeafSegment& a, const LeafSegment& b) {
  const Vec2 shift = lift_delta(a.base, b.base);
  for (std::size_t i = 1; i < a.offsets.size(); ++i) {
    const Vec2 p0 = a.offsets[i - 1], p1 = a.offsets[i];
    const Vec2 r = p1 - p0;
    for (std::size_t j = 1; j < b.offsets.size(); ++j) {
      const Vec2 q0 = b.offsets[j - 1] + shift, q1 = b.offsets[j] + shift;
      const Vec2 s = q1 - q0;
      const double den = cross(r, s);
      if (den == 0.0) continue;
      const double u = cross(q0 - p0, s) / den;
      const double v = cross(q0 - p0, r) / den;
      if (u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0) return translate(a.base, p0 + r * u);
    }
  }
  return std::nullopt;
}

bool CycleReport::all_hold() const {
  return n1_check &&
         std::all_of(cycles.begin(), cycles.end(), [](const CycleRecord& c) { return !c.complete || c.holds; });
}

CycleReport cycle_expansion_check(const PerturbedMap& map, const RegionAtlas& atlas, const TorusPoint& a,
                                  const TorusPoint& b, const CycleOptions& opt) {
  CycleReport rep;
  // leaf arc from a to b
  const double dab = distance(a, b);
  const LeafSegment leaf = local_leaf(map, a, Orientation::Unstable, 1.5 * dab + 1e-9);
  const Vec2 db = lift_delta(a, b);
  std::size_t jb = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < leaf.offsets.size(); ++j) {
    const double dd = norm(leaf.offsets[j] - db);
    if (dd < best) best = dd, jb = j;
  }
  std::size_t ja = 0;
  for (std::size_t j = 0; j < leaf.offsets.size(); ++j)
    if (norm(leaf.offsets[j]) == 0.0) ja = j;
  std::vector<Vec2> arc;
  for (std::size_t j = std::min(ja, jb); j <= std::max(ja, jb); ++j) arc.push_back(leaf.offsets[j]);
  arc.back() = ja < jb ? db : arc.back();
  if (ja > jb) arc.front() = db;
  // resample uniformly in arclength
  std::vector<double> cum(arc.size(), 0.0);
  for (std::size_t j = 1; j < arc.size(); ++j) cum[j] = cum[j - 1] + norm(arc[j] - arc[j - 1]);
  const std::size_t R = std::max<std::size_t>(opt.resolution, 2);
  std::vector<TorusPoint> pts(R);
  std::size_t seg = 1;
  for (std::size_t i = 0; i < R; ++i) {
    const double s = cum.back() * static_cast<double>(i) / static_cast<double>(R - 1);
    while (seg + 1 < arc.size() && cum[seg] < s) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double w = len > 0.0 ? (s - cum[seg - 1]) / len : 0.0;
    pts[i] = translate(a, arc[seg - 1] + (arc[seg] - arc[seg - 1]) * std::clamp(w, 0.0, 1.0));
  }

  const double target = atlas.r() / 10.0;
  const int depth = atlas.params().depth;
  std::vector<bool> meets_B;
  int i = 0;
  while (true) {
    rep.du.push_back(polyline_length(pts));
    bool inB = false;
    int comps = 0;
    for (int q = 0; q <= depth; ++q)
      for (const auto& x : pts)
        if (atlas.in_bar_forward(x, q)) {
          ++comps;
          break;
        }
    for (int q = 1; q <= depth; ++q)
      for (const auto& x : pts)
        if (atlas.in_bar_backward(x, q)) {
          ++comps;
          break;
        }
    for (const auto& x : pts)
      if (atlas.in_B(x)) {
        inB = true;
        break;
      }
    rep.max_components_per_iterate = std::max(rep.max_components_per_iterate, comps);
    meets_B.push_back(inB);
    if (rep.du.back() >= target) break;
    if (i == opt.cap) {
      rep.window_capped = true;
      break;
    }
    for (auto& x : pts) x = map.f(x);
    ++i;
  }
  rep.N = i;

  const double lam = map.L().lambda(), mu = opt.mu_factor * lam;
  int s = 0;
  while (s <= rep.N) {
    if (!meets_B[static_cast<std::size_t>(s)]) {
      ++s;
      continue;
    }
    CycleRecord c;
    c.start = s;
    // n: first step at which the segment stops contracting faster than 1/mu
    while (s + c.n + 1 <= rep.N &&
           rep.du[static_cast<std::size_t>(s + c.n + 1)] / rep.du[static_cast<std::size_t>(s + c.n)] < 1.0 / mu)
      ++c.n;
    c.length = c.n + 4 * opt.m + 4;
    c.complete = s + c.length <= rep.N && !(s == 0);
    c.bound = std::pow(lam, -(c.n + opt.m + 1)) * std::pow(mu, 3 * c.n + 3 * opt.m + 3);
    if (s + c.length <= rep.N) {
      c.growth = rep.du[static_cast<std::size_t>(s + c.length)] / rep.du[static_cast<std::size_t>(s)];
      c.holds = c.growth >= c.bound;
    }
    if (s == 0) {
      rep.first_incomplete = true;
      rep.n1_check = rep.N - c.n >= 3 * c.n;
    }
    rep.cycles.push_back(c);
    s += c.length;
  }
  return rep;
}

}  // namespace anosov

#include "batchswap/ordering.hpp"

#include <array>

namespace batchswap {

namespace {

// An outcome projected onto the type's prime asset: `a` is the prime-asset
// gain, `b` the other asset, `goal` the signed demand, `rate` the limit in
// units of b per unit of a.
struct Frame {
  Rational goal;
  Rational rate;
  bool swapped = false;
};

struct Point {
  Rational a;
  Rational b;
};

Frame frame_for(const UserType& t) {
  Frame f;
  switch (t.side) {
    case Side::BuyX: f.goal = t.demand; break;
    case Side::SellX: f.goal = -t.demand; break;
    case Side::BuyY: f.goal = t.demand; break;
    case Side::SellY: f.goal = -t.demand; break;
  }
  f.swapped = y_denominated(t.side);
  f.rate = f.swapped ? t.rate.reciprocal() : t.rate;
  return f;
}

Point project(const Frame& f, const Outcome& o) { return f.swapped ? Point{o.dy, o.dx} : Point{o.dx, o.dy}; }

// a lies between 0 and the goal (inclusive).
bool within_demand(const Frame& f, const Rational& a) { return (a * (a - f.goal)).sign() <= 0; }

bool same_side(const Frame& f, const Rational& a0, const Rational& a1) {
  return ((a0 - f.goal) * (a1 - f.goal)).sign() >= 0;
}

bool at_least_as_close(const Frame& f, const Rational& a0, const Rational& a1) {
  return (a0 - f.goal).abs() <= (a1 - f.goal).abs();
}

Rational utility(const Frame& f, const Point& p) { return f.rate * p.a + p.b; }

bool direct(const Frame& f, const Point& p0, const Point& p1) {
  if (p0.a >= p1.a && p0.b >= p1.b) return true;
  if (within_demand(f, p0.a) && within_demand(f, p1.a) && utility(f, p0) >= utility(f, p1)) return true;
  return same_side(f, p0.a, p1.a) && at_least_as_close(f, p0.a, p1.a) && p1.b - p0.b <= f.rate * (p0.a - p1.a);
}

// Largest b such that p0 directly dominates (c, b); false when no rule applies at c.
bool best_dominated_at(const Frame& f, const Point& p0, const Rational& c, Rational& best) {
  bool any = false;
  auto offer = [&](Rational candidate) {
    if (!any || candidate > best) best = std::move(candidate);
    any = true;
  };
  if (c <= p0.a) offer(p0.b);
  if (within_demand(f, p0.a) && within_demand(f, c)) offer(utility(f, p0) - f.rate * c);
  if (same_side(f, p0.a, c) && at_least_as_close(f, p0.a, c)) offer(p0.b + f.rate * (p0.a - c));
  return any;
}

Rational clamp_to_demand(const Frame& f, const Rational& a) {
  const Rational zero(0);
  const Rational lo = min(zero, f.goal);
  const Rational hi = max(zero, f.goal);
  if (a < lo) return lo;
  if (a > hi) return hi;
  return a;
}

bool dominates(const Frame& f, const Point& p0, const Point& p1) {
  if (direct(f, p0, p1)) return true;
  const std::array<Rational, 6> candidates{Rational(0),          f.goal, p0.a, p1.a, clamp_to_demand(f, p0.a),
                                           clamp_to_demand(f, p1.a)};
  Rational b;
  for (const auto& c : candidates) {
    if (best_dominated_at(f, p0, c, b) && direct(f, Point{c, b}, p1)) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(Comparison c) {
  switch (c) {
    case Comparison::Better: return "better";
    case Comparison::Worse: return "worse";
    case Comparison::Equal: return "equal";
    case Comparison::Incomparable: return "incomparable";
  }
  return "?";
}

bool base_dominates(const UserType& type, const Outcome& o0, const Outcome& o1) {
  const Frame f = frame_for(type);
  return dominates(f, project(f, o0), project(f, o1));
}

Comparison compare(const UserType& type, const Outcome& o0, const Outcome& o1) {
  if (o0 == o1) return Comparison::Equal;
  const bool forward = base_dominates(type, o0, o1);
  const bool backward = base_dominates(type, o1, o0);
  if (forward && backward) return Comparison::Equal;
  if (forward) return Comparison::Better;
  if (backward) return Comparison::Worse;
  return Comparison::Incomparable;
}

bool refutes_dominance(const UserType& type, const Outcome& honest, const Outcome& strategic) {
  const Frame f = frame_for(type);
  const Point h = project(f, honest);
  const Point s = project(f, strategic);

  const bool same = same_side(f, h.a, s.a);
  // R1
  if (same && at_least_as_close(f, h.a, s.a) && ((h.a - s.a) * (h.b - s.b)).sign() < 0 &&
      utility(f, h) > utility(f, s)) {
    return true;
  }
  // R2
  if (same && (s.a - f.goal).abs() < (h.a - f.goal).abs() && h.b - s.b > f.rate * (s.a - h.a)) return true;
  // R3
  return !same && h.b - s.b > f.rate * (s.a - h.a);
}

Rational total_value(const Rational& belief_rate, const Outcome& o) { return belief_rate * o.dx + o.dy; }

}  // namespace batchswap

#pragma once

#include "batchswap/types.hpp"

#include <string_view>

namespace batchswap {

enum class Comparison { Better, Worse, Equal, Incomparable };
std::string_view to_string(Comparison c);

/// o0 is at least as good as o1 for a user of type T under the natural partial
/// ordering: dominance in both assets, the limit-rate utility while inside the
/// demand, or progress toward the goal at a marginal rate no worse than the
/// limit. Transitivity is closed through one intermediate drawn from a fixed
/// candidate set (0, the goal, both outcomes' X positions and their clamps into
/// [0, goal]). Y-side types swap the axes and invert the rate.
bool base_dominates(const UserType& type, const Outcome& o0, const Outcome& o1);

/// Better/Worse from one-sided dominance, Equal when each dominates the other
/// (identical outcomes, or indifference at equal limit-rate utility), else Incomparable.
Comparison compare(const UserType& type, const Outcome& o0, const Outcome& o1);

/// Certifies that `strategic` is NOT at least as good as `honest`, using the
/// proof-layer rules:
///  - R1: same side of the goal, honest at least as close, the two trade off
///    against each other, and honest has strictly higher limit-rate utility;
///  - R2: same side, strategic strictly closer, but the extra progress cost more
///    than the limit rate at the margin;
///  - R3: opposite sides of the goal and the crossing cost more than the limit rate.
/// Never claims dominance; a false return proves nothing.
bool refutes_dominance(const UserType& type, const Outcome& honest, const Outcome& strategic);

/// Value of an outcome at a believed rate: belief * dx + dy.
Rational total_value(const Rational& belief_rate, const Outcome& o);

}  // namespace batchswap

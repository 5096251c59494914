#include "batchswap/types.hpp"

#include <stdexcept>

namespace batchswap {

std::string_view to_string(Side s) {
  switch (s) {
    case Side::BuyX: return "BuyX";
    case Side::SellX: return "SellX";
    case Side::BuyY: return "BuyY";
    case Side::SellY: return "SellY";
  }
  return "?";
}

Side side_from_string(std::string_view text) {
  if (text == "BuyX") return Side::BuyX;
  if (text == "SellX") return Side::SellX;
  if (text == "BuyY") return Side::BuyY;
  if (text == "SellY") return Side::SellY;
  throw std::invalid_argument("unknown order side \"" + std::string(text) + "\"");
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::One: return "one";
    case Phase::Two: return "two";
    case Phase::Skipped: return "skipped";
  }
  return "?";
}

std::string_view to_string(Dominance d) {
  return d == Dominance::BuyXDominant ? "BuyXDominant" : "BuyYDominant";
}

void Order::validate() const {
  if (amount.sign() < 0) {
    throw std::invalid_argument("order " + std::to_string(id) + ": amount must be >= 0, got " + amount.str());
  }
  if (limit_rate.sign() <= 0) {
    throw std::invalid_argument("order " + std::to_string(id) + ": rate must be > 0, got " + limit_rate.str());
  }
}

const OrderFill* BatchOutcome::fill_for(OrderId id) const {
  for (const auto& f : fills) {
    if (f.order_id == id) return &f;
  }
  return nullptr;
}

Outcome BatchOutcome::user_outcome(const std::string& user) const {
  const auto it = per_user.find(user);
  return it == per_user.end() ? Outcome{} : it->second;
}

}  // namespace batchswap

#pragma once

#include "batchswap/adversary.hpp"
#include "batchswap/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace batchswap {

/// Malformed scenario input. The message starts with the offending field path.
class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(const std::string& field, const std::string& what);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SandwichSpec {
  OrderId victim = 0;
  std::vector<Rational> front_amounts;
};

/// Everything a scenario file can carry. Orders land in scenario.honest_orders.
struct ScenarioFile {
  Scenario scenario;
  std::string potential = "constant_product";
  std::optional<Rational> eps;
  std::optional<Ledger> ledger;
  std::optional<Rational> belief;
  std::optional<StrategyGrid> grid;
  std::optional<SandwichSpec> sandwich;
  bool seed_given = false;  ///< tiebreak.seed present in the file
};

/// Rationals may be JSON integers, "p/q" strings or decimal strings.
Rational rational_from_json(const nlohmann::json& j, const std::string& field);
ScenarioFile parse_scenario(const nlohmann::json& doc);
ScenarioFile load_scenario(const std::filesystem::path& path);

struct RenderOptions {
  bool decimal = false;
  int decimal_digits = 12;
};

/// Sets j[key] = "p/q" (or an integer string) plus j[key + "_decimal"] when asked.
void put_rational(nlohmann::json& j, const std::string& key, const Rational& r, const RenderOptions& opt);

nlohmann::json pool_to_json(const PoolState& p, const RenderOptions& opt);
nlohmann::json order_to_json(const Order& o, const RenderOptions& opt);
nlohmann::json outcome_to_json(const Outcome& o, const RenderOptions& opt);
nlohmann::json step_to_json(const TraceStep& s, const RenderOptions& opt);
nlohmann::json fill_to_json(const OrderFill& f, const RenderOptions& opt);
nlohmann::json grid_to_json(const StrategyGrid& g, const RenderOptions& opt);
nlohmann::json witness_to_json(const ArbWitness& w, const RenderOptions& opt);
nlohmann::json counterexample_to_json(const IcCounterexample& c, const RenderOptions& opt);
nlohmann::json scenario_to_json(const ScenarioFile& s, const RenderOptions& opt);

/// JSON lines: one "step" record per executed (sub)order, then a "summary" record.
std::string trace_to_jsonl(const BatchOutcome& outcome, std::string_view engine, const RenderOptions& opt,
                           const std::optional<Ledger>& final_ledger = std::nullopt);

}  // namespace batchswap

#include "batchswap/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace batchswap {

using nlohmann::json;

ScenarioError::ScenarioError(const std::string& field, const std::string& what)
    : std::invalid_argument(field + ": " + what), field_(field) {}

namespace {

void require_object(const json& j, const std::string& field) {
  if (!j.is_object()) throw ScenarioError(field, "expected an object");
}

void reject_unknown(const json& j, const std::string& field, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ScenarioError(field.empty() ? key : field + "." + key, "unknown field");
  }
}

const json& required(const json& j, const std::string& key, const std::string& field) {
  const auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(field.empty() ? key : field + "." + key, "missing");
  return *it;
}

std::string join(const std::string& field, const std::string& key) { return field.empty() ? key : field + "." + key; }

std::string string_field(const json& j, const std::string& field) {
  if (!j.is_string()) throw ScenarioError(field, "expected a string");
  return j.get<std::string>();
}

std::uint64_t u64_field(const json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) throw ScenarioError(field, "must be non-negative");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    std::size_t used = 0;
    try {
      if (!text.empty() && text.front() != '-') {
        const auto v = std::stoull(text, &used, 10);
        if (used == text.size()) return v;
      }
    } catch (const std::exception&) {
    }
    throw ScenarioError(field, "expected an unsigned 64-bit integer, got \"" + text + "\"");
  }
  throw ScenarioError(field, "expected an unsigned integer");
}

Side side_field(const json& j, const std::string& field) {
  const auto text = string_field(j, field);
  try {
    return side_from_string(text);
  } catch (const std::invalid_argument&) {
    throw ScenarioError(field, "unknown side \"" + text + "\" (BuyX, SellX, BuyY, SellY)");
  }
}

std::vector<Rational> rational_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw ScenarioError(field, "expected an array");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rational_from_json(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Order parse_order(const json& j, const std::string& field, std::uint64_t index) {
  require_object(j, field);
  reject_unknown(j, field, {"id", "user", "side", "amount", "rate", "arrival"});
  Order o;
  o.id = j.contains("id") ? u64_field(j["id"], join(field, "id")) : index;
  o.user = string_field(required(j, "user", field), join(field, "user"));
  o.side = side_field(required(j, "side", field), join(field, "side"));
  o.amount = rational_from_json(required(j, "amount", field), join(field, "amount"));
  o.limit_rate = rational_from_json(required(j, "rate", field), join(field, "rate"));
  o.arrival = j.contains("arrival") ? rational_from_json(j["arrival"], join(field, "arrival")) : Rational(0);
  o.submit_index = index;
  if (o.amount.sign() < 0) throw ScenarioError(join(field, "amount"), "must be non-negative");
  if (o.limit_rate.sign() <= 0) throw ScenarioError(join(field, "rate"), "must be positive");
  return o;
}

std::vector<Order> parse_orders(const json& j, const std::string& field) {
  if (!j.is_array()) throw ScenarioError(field, "expected an array");
  std::vector<Order> out;
  std::set<OrderId> ids;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    out.push_back(parse_order(j[i], f, i));
    if (!ids.insert(out.back().id).second) throw ScenarioError(join(f, "id"), "duplicate order id");
  }
  return out;
}

Position parse_position(const json& j, const std::string& field) {
  require_object(j, field);
  reject_unknown(j, field, {"x", "y"});
  Position p{rational_from_json(required(j, "x", field), join(field, "x")),
             rational_from_json(required(j, "y", field), join(field, "y"))};
  if (p.x.sign() < 0) throw ScenarioError(join(field, "x"), "must be non-negative");
  if (p.y.sign() < 0) throw ScenarioError(join(field, "y"), "must be non-negative");
  return p;
}

UserType parse_type(const json& j, const std::string& field) {
  require_object(j, field);
  reject_unknown(j, field, {"side", "demand", "rate", "arrival"});
  UserType t;
  t.side = side_field(required(j, "side", field), join(field, "side"));
  t.demand = rational_from_json(required(j, "demand", field), join(field, "demand"));
  t.rate = rational_from_json(required(j, "rate", field), join(field, "rate"));
  t.arrival = j.contains("arrival") ? rational_from_json(j["arrival"], join(field, "arrival")) : Rational(0);
  if (t.demand.sign() < 0) throw ScenarioError(join(field, "demand"), "must be non-negative");
  if (t.rate.sign() <= 0) throw ScenarioError(join(field, "rate"), "must be positive");
  return t;
}

StrategyGrid parse_grid(const json& j, const std::string& field) {
  require_object(j, field);
  reject_unknown(j, field, {"amounts", "rates", "sides", "max_orders", "arrival_offsets", "censor_limit"});
  StrategyGrid g = StrategyGrid::standard();
  if (j.contains("amounts")) g.amounts = rational_list(j["amounts"], join(field, "amounts"));
  if (j.contains("rates")) g.rates = rational_list(j["rates"], join(field, "rates"));
  if (j.contains("arrival_offsets")) g.arrival_offsets = rational_list(j["arrival_offsets"], join(field, "arrival_offsets"));
  if (j.contains("sides")) {
    const auto& s = j["sides"];
    if (!s.is_array()) throw ScenarioError(join(field, "sides"), "expected an array");
    g.sides.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      g.sides.push_back(side_field(s[i], join(field, "sides") + "[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("max_orders")) g.max_orders = u64_field(j["max_orders"], join(field, "max_orders"));
  if (j.contains("censor_limit")) g.censor_limit = u64_field(j["censor_limit"], join(field, "censor_limit"));
  for (std::size_t i = 0; i < g.rates.size(); ++i) {
    if (g.rates[i].sign() <= 0) throw ScenarioError(join(field, "rates") + "[" + std::to_string(i) + "]", "must be positive");
  }
  for (std::size_t i = 0; i < g.amounts.size(); ++i) {
    if (g.amounts[i].sign() < 0) throw ScenarioError(join(field, "amounts") + "[" + std::to_string(i) + "]", "must be non-negative");
  }
  for (std::size_t i = 0; i < g.arrival_offsets.size(); ++i) {
    if (g.arrival_offsets[i].sign() < 0) {
      throw ScenarioError(join(field, "arrival_offsets") + "[" + std::to_string(i) + "]", "must be non-negative");
    }
  }
  if (g.max_orders > 6) throw ScenarioError(join(field, "max_orders"), "at most 6 supported");
  return g;
}

}  // namespace

Rational rational_from_json(const json& j, const std::string& field) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Rational::parse(std::to_string(j.get<std::uint64_t>()));
    return Rational::parse(std::to_string(j.get<std::int64_t>()));
  }
  if (j.is_number_float()) throw ScenarioError(field, "floating-point numbers are not exact; use a \"p/q\" or decimal string");
  if (!j.is_string()) throw ScenarioError(field, "expected a rational (integer, \"p/q\" or decimal string)");
  const auto text = j.get<std::string>();
  try {
    return Rational::parse(text);
  } catch (const std::exception& e) {
    throw ScenarioError(field, "cannot parse \"" + text + "\" as a rational: " + e.what());
  }
}

ScenarioFile parse_scenario(const json& doc) {
  require_object(doc, "<root>");
  reject_unknown(doc, "", {"pool", "potential", "eps", "tiebreak", "orders", "ledger", "adversary", "grid", "sandwich"});
  ScenarioFile out;
  Scenario& s = out.scenario;

  const json& pool = required(doc, "pool", "");
  require_object(pool, "pool");
  reject_unknown(pool, "pool", {"x", "y"});
  const Rational px = rational_from_json(required(pool, "x", "pool"), "pool.x");
  const Rational py = rational_from_json(required(pool, "y", "pool"), "pool.y");
  if (px.sign() <= 0) throw ScenarioError("pool.x", "reserves must be strictly positive");
  if (py.sign() <= 0) throw ScenarioError("pool.y", "reserves must be strictly positive");
  s.pool = PoolState(px, py);

  if (doc.contains("potential")) {
    out.potential = string_field(doc["potential"], "potential");
    try {
      (void)potential_by_name(out.potential);
    } catch (const std::exception& e) {
      throw ScenarioError("potential", e.what());
    }
  }
  if (doc.contains("eps")) {
    out.eps = rational_from_json(doc["eps"], "eps");
    if (out.eps->sign() <= 0) throw ScenarioError("eps", "must be positive");
  }

  if (doc.contains("tiebreak")) {
    const json& tb = doc["tiebreak"];
    require_object(tb, "tiebreak");
    reject_unknown(tb, "tiebreak", {"mode", "seed"});
    const auto mode = tb.contains("mode") ? string_field(tb["mode"], "tiebreak.mode") : std::string("arrival_stable");
    if (mode == "arrival_stable") {
      s.tiebreak = TieBreak::arrival_stable();
      if (tb.contains("seed")) throw ScenarioError("tiebreak.seed", "only allowed with mode \"random\"");
    } else if (mode == "random") {
      s.tiebreak = TieBreak::random(tb.contains("seed") ? u64_field(tb["seed"], "tiebreak.seed") : 0);
      out.seed_given = tb.contains("seed");
    } else {
      throw ScenarioError("tiebreak.mode", "expected \"arrival_stable\" or \"random\", got \"" + mode + "\"");
    }
  }

  s.honest_orders = parse_orders(required(doc, "orders", ""), "orders");

  if (doc.contains("ledger")) {
    const json& l = doc["ledger"];
    require_object(l, "ledger");
    Ledger ledger;
    for (const auto& [user, pos] : l.items()) ledger[user] = parse_position(pos, "ledger." + user);
    out.ledger = std::move(ledger);
  }

  if (doc.contains("adversary")) {
    const json& a = doc["adversary"];
    require_object(a, "adversary");
    reject_unknown(a, "adversary", {"user", "model", "type", "belief", "deviations"});
    if (a.contains("user")) s.adversary_user = string_field(a["user"], "adversary.user");
    if (a.contains("model")) {
      const auto m = string_field(a["model"], "adversary.model");
      try {
        s.model = model_from_string(m);
      } catch (const std::invalid_argument&) {
        throw ScenarioError("adversary.model", "expected \"plain\" or \"weak_fair_sequencing\", got \"" + m + "\"");
      }
    }
    if (a.contains("type")) s.adversary_type = parse_type(a["type"], "adversary.type");
    if (a.contains("belief")) {
      out.belief = rational_from_json(a["belief"], "adversary.belief");
      if (out.belief->sign() <= 0) throw ScenarioError("adversary.belief", "must be positive");
    }
    if (a.contains("deviations")) {
      const json& d = a["deviations"];
      if (!d.is_array()) throw ScenarioError("adversary.deviations", "expected an array of order arrays");
      for (std::size_t i = 0; i < d.size(); ++i) {
        s.extra_deviations.push_back(parse_orders(d[i], "adversary.deviations[" + std::to_string(i) + "]"));
      }
    }
  }

  if (doc.contains("grid")) out.grid = parse_grid(doc["grid"], "grid");

  if (doc.contains("sandwich")) {
    const json& w = doc["sandwich"];
    require_object(w, "sandwich");
    reject_unknown(w, "sandwich", {"victim", "front_amounts"});
    SandwichSpec spec;
    spec.victim = u64_field(required(w, "victim", "sandwich"), "sandwich.victim");
    if (w.contains("front_amounts")) spec.front_amounts = rational_list(w["front_amounts"], "sandwich.front_amounts");
    out.sandwich = std::move(spec);
  }
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("--scenario", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

void put_rational(json& j, const std::string& key, const Rational& r, const RenderOptions& opt) {
  j[key] = r.str();
  if (opt.decimal) j[key + "_decimal"] = r.decimal(opt.decimal_digits);
}

json pool_to_json(const PoolState& p, const RenderOptions& opt) {
  json j = json::object();
  put_rational(j, "x", p.x, opt);
  put_rational(j, "y", p.y, opt);
  return j;
}

json order_to_json(const Order& o, const RenderOptions& opt) {
  json j = json::object();
  j["id"] = o.id;
  j["user"] = o.user;
  j["side"] = std::string(to_string(o.side));
  put_rational(j, "amount", o.amount, opt);
  put_rational(j, "rate", o.limit_rate, opt);
  put_rational(j, "arrival", o.arrival, opt);
  return j;
}

json outcome_to_json(const Outcome& o, const RenderOptions& opt) {
  json j = json::object();
  put_rational(j, "dx", o.dx, opt);
  put_rational(j, "dy", o.dy, opt);
  return j;
}

json step_to_json(const TraceStep& s, const RenderOptions& opt) {
  json j = json::object();
  j["record"] = "step";
  j["order_id"] = s.order_id;
  j["user"] = s.user;
  j["side"] = std::string(to_string(s.side));
  if (s.part >= 0) j["part"] = s.part;
  j["phase"] = std::string(to_string(s.phase));
  j["pool_before"] = pool_to_json(s.before, opt);
  j["pool_after"] = pool_to_json(s.after, opt);
  put_rational(j, "dx", s.dx, opt);
  put_rational(j, "dy", s.dy, opt);
  put_rational(j, "fulfilled", s.fulfilled, opt);
  if (s.position_after) {
    json p = json::object();
    put_rational(p, "x", s.position_after->x, opt);
    put_rational(p, "y", s.position_after->y, opt);
    j["position_after"] = p;
  }
  return j;
}

json fill_to_json(const OrderFill& f, const RenderOptions& opt) {
  json j = json::object();
  j["order_id"] = f.order_id;
  j["user"] = f.user;
  j["side"] = std::string(to_string(f.side));
  j["phase"] = std::string(to_string(f.phase));
  put_rational(j, "fulfilled", f.fulfilled, opt);
  put_rational(j, "avg_rate", f.avg_rate, opt);
  put_rational(j, "dx", f.dx, opt);
  put_rational(j, "dy", f.dy, opt);
  return j;
}

namespace {

json rationals_to_json(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back(r.str());
  return a;
}

json orders_to_json(const std::vector<Order>& v, const RenderOptions& opt) {
  json a = json::array();
  for (const auto& o : v) a.push_back(order_to_json(o, opt));
  return a;
}

}  // namespace

json grid_to_json(const StrategyGrid& g, const RenderOptions&) {
  json j = json::object();
  j["amounts"] = rationals_to_json(g.amounts);
  j["rates"] = rationals_to_json(g.rates);
  j["arrival_offsets"] = rationals_to_json(g.arrival_offsets);
  json sides = json::array();
  for (auto s : g.sides) sides.push_back(std::string(to_string(s)));
  j["sides"] = sides;
  j["max_orders"] = g.max_orders;
  j["censor_limit"] = g.censor_limit;
  j["single_orders"] = g.single_order_count();
  j["strategies"] = g.strategy_count();
  return j;
}

json witness_to_json(const ArbWitness& w, const RenderOptions& opt) {
  json j = json::object();
  j["user"] = w.user;
  j["batch_orders"] = orders_to_json(w.batch_orders, opt);
  j["strategic_orders"] = orders_to_json(w.strategic_orders, opt);
  j["subset"] = w.subset;
  j["censored"] = w.censored;
  j["gain"] = outcome_to_json(w.gain, opt);
  return j;
}

json counterexample_to_json(const IcCounterexample& c, const RenderOptions& opt) {
  json j = json::object();
  j["deviation"] = orders_to_json(c.deviation, opt);
  j["honest"] = outcome_to_json(c.honest, opt);
  j["deviant"] = outcome_to_json(c.deviant, opt);
  j["comparison"] = std::string(to_string(c.comparison));
  put_rational(j, "honest_value", c.honest_value, opt);
  put_rational(j, "deviant_value", c.deviant_value, opt);
  j["ties_honest_arrival"] = c.ties_honest_arrival;
  return j;
}

json scenario_to_json(const ScenarioFile& f, const RenderOptions& opt) {
  const Scenario& s = f.scenario;
  json j = json::object();
  j["pool"] = pool_to_json(s.pool, opt);
  j["potential"] = f.potential;
  if (f.eps) j["eps"] = f.eps->str();
  json tb = json::object();
  tb["mode"] = s.tiebreak.mode == TieBreak::Mode::Random ? "random" : "arrival_stable";
  if (s.tiebreak.mode == TieBreak::Mode::Random) tb["seed"] = s.tiebreak.seed;
  j["tiebreak"] = tb;
  j["orders"] = orders_to_json(s.honest_orders, opt);
  if (f.ledger) {
    json l = json::object();
    for (const auto& [user, pos] : *f.ledger) {
      json p = json::object();
      put_rational(p, "x", pos.x, opt);
      put_rational(p, "y", pos.y, opt);
      l[user] = p;
    }
    j["ledger"] = l;
  }
  json a = json::object();
  a["user"] = s.adversary_user;
  a["model"] = std::string(to_string(s.model));
  if (s.adversary_type) {
    json t = json::object();
    t["side"] = std::string(to_string(s.adversary_type->side));
    put_rational(t, "demand", s.adversary_type->demand, opt);
    put_rational(t, "rate", s.adversary_type->rate, opt);
    put_rational(t, "arrival", s.adversary_type->arrival, opt);
    a["type"] = t;
  }
  if (f.belief) a["belief"] = f.belief->str();
  if (!s.extra_deviations.empty()) {
    json d = json::array();
    for (const auto& dev : s.extra_deviations) d.push_back(orders_to_json(dev, opt));
    a["deviations"] = d;
  }
  j["adversary"] = a;
  if (f.grid) {
    json g = grid_to_json(*f.grid, opt);
    g.erase("single_orders");
    g.erase("strategies");
    j["grid"] = g;
  }
  return j;
}

std::string trace_to_jsonl(const BatchOutcome& outcome, std::string_view engine, const RenderOptions& opt,
                           const std::optional<Ledger>& final_ledger) {
  std::ostringstream out;
  for (const auto& step : outcome.trace) out << step_to_json(step, opt).dump() << '\n';

  json summary = json::object();
  summary["record"] = "summary";
  summary["engine"] = std::string(engine);
  summary["start_pool"] = pool_to_json(outcome.start_pool, opt);
  summary["end_pool"] = pool_to_json(outcome.end_pool, opt);
  if (engine != "legacy-sequential") {
    summary["dominance"] = std::string(to_string(outcome.dominance));
    if (outcome.split) {
      json sp = json::object();
      sp["order_id"] = outcome.split->order_id;
      put_rational(sp, "first", outcome.split->first, opt);
      put_rational(sp, "second", outcome.split->second, opt);
      summary["split"] = sp;
    }
  }
  json fills = json::array();
  for (const auto& f : outcome.fills) fills.push_back(fill_to_json(f, opt));
  summary["fills"] = fills;
  json users = json::object();
  for (const auto& [user, o] : outcome.per_user) users[user] = outcome_to_json(o, opt);
  summary["per_user"] = users;
  if (final_ledger) {
    json l = json::object();
    for (const auto& [user, pos] : *final_ledger) {
      json p = json::object();
      put_rational(p, "x", pos.x, opt);
      put_rational(p, "y", pos.y, opt);
      l[user] = p;
    }
    summary["ledger"] = l;
  }
  out << summary.dump() << '\n';
  return out.str();
}

}  // namespace batchswap

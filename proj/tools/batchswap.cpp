// batchswap: run the batch swap mechanism, the legacy baseline and the adversary searches.
#include "batchswap/adversary.hpp"
#include "batchswap/mechanism.hpp"
#include "batchswap/noshort.hpp"
#include "batchswap/scenario_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace bs = batchswap;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitFound = 2;
constexpr int kExitInternal = 3;

struct Config {
  std::string command;
  std::string scenario_path;
  std::string output_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> eps;
  std::optional<std::string> grid_amounts;
  std::optional<std::string> grid_rates;
  std::optional<std::size_t> max_orders;
  std::optional<std::string> engine;
  bool decimal = false;
};

std::vector<bs::Rational> parse_list(const std::string& text, const std::string& flag) {
  std::vector<bs::Rational> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(bs::Rational::parse(item));
    } catch (const std::exception& e) {
      throw bs::ScenarioError(flag, "cannot parse \"" + item + "\": " + e.what());
    }
  }
  if (out.empty()) throw bs::ScenarioError(flag, "empty list");
  return out;
}

void write_output(const Config& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output_path, std::ios::binary | std::ios::trunc);
  if (!out) throw bs::ScenarioError("--out", "cannot open " + cfg.output_path + " for writing");
  out << text;
}

struct Loaded {
  bs::ScenarioFile file;
  bs::Curve curve;
};

Loaded load(const Config& cfg) {
  bs::ScenarioFile file = bs::load_scenario(cfg.scenario_path);
  auto& tb = file.scenario.tiebreak;
  if (tb.mode == bs::TieBreak::Mode::Random) {
    if (cfg.seed) {
      tb.seed = *cfg.seed;
    } else if (!file.seed_given) {
      throw bs::ScenarioError("tiebreak.seed", "required for random tie-breaking (set it in the scenario or pass --seed)");
    }
  } else if (cfg.seed) {
    throw bs::ScenarioError("--seed", "only valid when tiebreak.mode is \"random\"");
  }

  bs::Rational eps = file.eps.value_or(bs::default_sqrt_eps());
  if (cfg.eps) {
    try {
      eps = bs::Rational::parse(*cfg.eps);
    } catch (const std::exception& e) {
      throw bs::ScenarioError("--eps", e.what());
    }
    if (eps.sign() <= 0) throw bs::ScenarioError("--eps", "must be positive");
    file.eps = eps;
  }

  if (cfg.grid_amounts || cfg.grid_rates || cfg.max_orders) {
    bs::StrategyGrid g = file.grid.value_or(bs::StrategyGrid::standard());
    if (cfg.grid_amounts) g.amounts = parse_list(*cfg.grid_amounts, "--grid-amounts");
    if (cfg.grid_rates) g.rates = parse_list(*cfg.grid_rates, "--grid-rates");
    if (cfg.max_orders) g.max_orders = *cfg.max_orders;
    file.grid = g;
  }
  bs::Curve curve(bs::potential_by_name(file.potential), eps);
  return {std::move(file), std::move(curve)};
}

bs::Engine choose_engine(const Config& cfg, const Loaded& in) {
  bs::Engine engine;
  engine.curve = in.curve;
  if (cfg.engine) {
    try {
      engine.kind = bs::engine_from_string(*cfg.engine);
    } catch (const std::invalid_argument& e) {
      throw bs::ScenarioError("--engine", e.what());
    }
  } else {
    engine.kind = in.file.ledger ? bs::EngineKind::BatchNoShort : bs::EngineKind::Batch;
  }
  if (engine.kind == bs::EngineKind::BatchNoShort) {
    if (!in.file.ledger) throw bs::ScenarioError("ledger", "required by the no-short engine");
    engine.ledger = *in.file.ledger;
  }
  return engine;
}

json report_header(const Config& cfg, const Loaded& in, const bs::Engine& engine, const bs::RenderOptions& opt) {
  json r = json::object();
  r["command"] = cfg.command;
  r["engine"] = std::string(bs::to_string(engine.kind));
  r["model"] = std::string(bs::to_string(in.file.scenario.model));
  json tb = json::object();
  tb["mode"] = in.file.scenario.tiebreak.mode == bs::TieBreak::Mode::Random ? "random" : "arrival_stable";
  if (in.file.scenario.tiebreak.mode == bs::TieBreak::Mode::Random) tb["seed"] = in.file.scenario.tiebreak.seed;
  r["tiebreak"] = tb;
  r["pool"] = bs::pool_to_json(in.file.scenario.pool, opt);
  r["eps"] = in.curve.eps().str();
  return r;
}

std::string dump_report(const json& r) { return r.dump(2) + "\n"; }

int cmd_run(const Config& cfg, bs::EngineKind kind) {
  const Loaded in = load(cfg);
  const bs::RenderOptions opt{cfg.decimal};
  const auto& s = in.file.scenario;
  switch (kind) {
    case bs::EngineKind::Batch: {
      const auto out = bs::run_batch(s.pool, s.honest_orders, s.tiebreak, in.curve);
      write_output(cfg, bs::trace_to_jsonl(out, bs::to_string(kind), opt));
      break;
    }
    case bs::EngineKind::BatchNoShort: {
      if (!in.file.ledger) throw bs::ScenarioError("ledger", "required by run-noshort");
      const auto out = bs::run_batch_noshort(s.pool, *in.file.ledger, s.honest_orders, s.tiebreak, in.curve);
      write_output(cfg, bs::trace_to_jsonl(out.batch, bs::to_string(kind), opt, out.ledger));
      break;
    }
    case bs::EngineKind::LegacySequential: {
      bs::Engine engine;
      engine.kind = kind;
      engine.curve = in.curve;
      const auto out = bs::run_engine(engine, s.pool, s.honest_orders, s.tiebreak, true);
      write_output(cfg, bs::trace_to_jsonl(out, bs::to_string(kind), opt));
      break;
    }
  }
  return kExitOk;
}

int cmd_sandwich(const Config& cfg) {
  const Loaded in = load(cfg);
  const bs::RenderOptions opt{cfg.decimal};
  const auto& s = in.file.scenario;

  const bs::Order* victim = nullptr;
  if (in.file.sandwich) {
    for (const auto& o : s.honest_orders) {
      if (o.id == in.file.sandwich->victim) victim = &o;
    }
    if (!victim) throw bs::ScenarioError("sandwich.victim", "no order with id " + std::to_string(in.file.sandwich->victim));
  } else {
    for (const auto& o : s.honest_orders) {
      if (o.side == bs::Side::BuyX) {
        victim = &o;
        break;
      }
    }
    if (!victim) throw bs::ScenarioError("orders", "demo-sandwich needs a BuyX victim order");
  }
  if (victim->side != bs::Side::BuyX) throw bs::ScenarioError("sandwich.victim", "victim must be a BuyX order");

  std::vector<bs::Rational> amounts;
  if (cfg.grid_amounts) {
    amounts = in.file.grid->amounts;
  } else if (in.file.sandwich && !in.file.sandwich->front_amounts.empty()) {
    amounts = in.file.sandwich->front_amounts;
  } else {
    for (long a = 1; a <= 100 && bs::Rational(a) < s.pool.x; ++a) amounts.emplace_back(a);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto result = bs::sandwich_attack(s.pool, *victim, amounts, in.curve);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bs::Engine engine;
  engine.kind = bs::EngineKind::LegacySequential;
  json r = report_header(cfg, in, engine, opt);
  r["victim"] = bs::order_to_json(*victim, opt);
  bs::put_rational(r, "best_front_amount", result.best_front_amount, opt);
  bs::put_rational(r, "best_profit", result.best_profit, opt);
  json points = json::array();
  for (const auto& p : result.points) {
    json j = json::object();
    bs::put_rational(j, "front_amount", p.front_amount, opt);
    bs::put_rational(j, "profit", p.profit, opt);
    points.push_back(j);
  }
  r["points"] = points;
  json steps = json::array();
  for (const auto& st : result.best_run.trace) steps.push_back(bs::step_to_json(st, opt));
  r["best_run"] = steps;
  r["wall_clock_seconds"] = secs;
  write_output(cfg, dump_report(r));
  return kExitOk;
}

int cmd_search_arb(const Config& cfg) {
  const Loaded in = load(cfg);
  const bs::RenderOptions opt{cfg.decimal};
  const bs::Engine engine = choose_engine(cfg, in);
  const bs::StrategyGrid grid = in.file.grid.value_or(bs::StrategyGrid::standard());

  const auto t0 = std::chrono::steady_clock::now();
  const auto witnesses = bs::search_arbitrage(in.file.scenario, grid, engine);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json r = report_header(cfg, in, engine, opt);
  r["grid"] = bs::grid_to_json(grid, opt);
  json list = json::array();
  for (const auto& w : witnesses) list.push_back(bs::witness_to_json(w, opt));
  r["witnesses"] = list;
  r["wall_clock_seconds"] = secs;
  write_output(cfg, dump_report(r));
  return !witnesses.empty() && engine.is_batch_mechanism() ? kExitFound : kExitOk;
}

int cmd_search_ic(const Config& cfg) {
  const Loaded in = load(cfg);
  const bs::RenderOptions opt{cfg.decimal};
  const bs::Engine engine = choose_engine(cfg, in);
  const bs::StrategyGrid grid = in.file.grid.value_or(bs::StrategyGrid::standard());
  const auto& s = in.file.scenario;
  if (!s.adversary_type) throw bs::ScenarioError("adversary.type", "required by search-ic");

  const auto t0 = std::chrono::steady_clock::now();
  bs::IcReport report;
  std::string ordering;
  if (engine.kind == bs::EngineKind::BatchNoShort) {
    if (!in.file.belief) throw bs::ScenarioError("adversary.belief", "required by search-ic on the no-short engine");
    if (!engine.ledger.contains(s.adversary_user)) {
      throw bs::ScenarioError("ledger." + s.adversary_user, "the strategic user needs a ledger position");
    }
    report = bs::search_ic_total_order(s, *in.file.belief, grid, engine);
    ordering = "total";
  } else {
    report = bs::search_ic_deviations(s, *s.adversary_type, grid, engine);
    ordering = "partial";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json r = report_header(cfg, in, engine, opt);
  r["ordering"] = ordering;
  r["grid"] = bs::grid_to_json(grid, opt);
  r["deviations_checked"] = report.deviations_checked;
  r["refuted"] = report.refuted;
  r["honest"] = bs::outcome_to_json(report.honest, opt);
  json list = json::array();
  for (const auto& c : report.counterexamples) list.push_back(bs::counterexample_to_json(c, opt));
  r["counterexamples"] = list;
  r["wall_clock_seconds"] = secs;
  write_output(cfg, dump_report(r));
  return !report.counterexamples.empty() && engine.is_batch_mechanism() ? kExitFound : kExitOk;
}

void add_common(CLI::App* sub, Config& cfg, bool search) {
  sub->add_option("--scenario", cfg.scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", cfg.output_path, "Output file (default: stdout)");
  sub->add_option("--seed", cfg.seed, "Seed for random tie-breaking");
  sub->add_option("--eps", cfg.eps, "Square-root tolerance, e.g. 1/1000000");
  sub->add_flag("--decimal", cfg.decimal, "Add display-only decimal columns");
  sub->add_option("--grid-amounts", cfg.grid_amounts, "Comma-separated rational amounts");
  sub->add_option("--grid-rates", cfg.grid_rates, "Comma-separated rational limit rates");
  sub->add_option("--max-orders", cfg.max_orders, "Largest strategic order multiset");
  if (search) sub->add_option("--engine", cfg.engine, "batch, batch-noshort or legacy-sequential");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-phase batch swap AMM simulator and adversary oracles"};
  app.require_subcommand(1);
  Config cfg;

  struct Command {
    const char* name;
    const char* help;
    bool search;
  };
  const Command commands[] = {
      {"run", "Run the batch mechanism and write a JSON-lines trace", false},
      {"run-noshort", "Run the no-short-selling batch mechanism against the scenario ledger", false},
      {"legacy-run", "Run the first-come-first-served baseline in arrival order", false},
      {"demo-sandwich", "Grid-search a sandwich attack on the legacy baseline", false},
      {"search-arb", "Exhaustive arbitrage search over the strategy grid", true},
      {"search-ic", "Exhaustive incentive-compatibility deviation search", true},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, cfg, c.search);
    sub->callback([&cfg, name = std::string(c.name)] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (cfg.command == "run") return cmd_run(cfg, bs::EngineKind::Batch);
    if (cfg.command == "run-noshort") return cmd_run(cfg, bs::EngineKind::BatchNoShort);
    if (cfg.command == "legacy-run") return cmd_run(cfg, bs::EngineKind::LegacySequential);
    if (cfg.command == "demo-sandwich") return cmd_sandwich(cfg);
    if (cfg.command == "search-arb") return cmd_search_arb(cfg);
    if (cfg.command == "search-ic") return cmd_search_ic(cfg);
  } catch (const bs::InvariantViolation& e) {
    std::cerr << "internal invariant violated: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const bs::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

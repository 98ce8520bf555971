// Command-line front end: enforcement checks, collusion scans, parameter
// region maps, payoff clouds, and learning runs, with CSV/JSON output.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "pgg/enforcement.hpp"
#include "pgg/experiment.hpp"
#include "pgg/game.hpp"
#include "pgg/learning.hpp"
#include "pgg/markov.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitUsage = 2;

std::string fmt(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_text(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out);
  f << text;
}

// Loads --config <path> (JSON) before CLI11 applies flag overrides.
pgg::ExperimentConfig preload_config(int argc, char** argv) {
  pgg::ExperimentConfig cfg;
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      path = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      path = arg.substr(9);
    }
  }
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    json j = json::parse(f);
    cfg = j.get<pgg::ExperimentConfig>();
  }
  return cfg;
}

std::string verdict_csv(const pgg::EnforcementVerdict& verdict) {
  std::string s = "name,bound,value,satisfied\n";
  for (const auto& c : verdict.constraints) {
    s += '"' + c.name + "\"," + fmt(c.bound) + ',' + fmt(c.value) + ',' +
         (c.satisfied ? "true" : "false") + '\n';
  }
  return s;
}

int cmd_check(const pgg::ExperimentConfig& cfg) {
  const pgg::PublicGoodsGame game(cfg.n, cfg.r);
  const auto strategy = pgg::parse_strategy(cfg.strategy, cfg.n);
  const auto verdict = pgg::check_enforcing(game, strategy);
  if (cfg.format == "csv") {
    write_text(cfg.out, verdict_csv(verdict));
  } else {
    write_text(cfg.out, json(verdict).dump(2) + "\n");
  }
  return verdict.overall ? kExitOk : kExitViolated;
}

int cmd_collusion(const pgg::ExperimentConfig& cfg) {
  const pgg::PublicGoodsGame game(cfg.n, cfg.r);
  const auto reports = pgg::collusion_scan(game);
  bool all_nonpositive = true;
  for (const auto& rep : reports) all_nonpositive &= rep.gain <= 0.0;
  if (cfg.format != "csv") {
    write_text(cfg.out, json(reports).dump(2) + "\n");
  } else {
    std::string s = "m,k,collusive_avg,gain\n";
    for (const auto& rep : reports) {
      s += std::to_string(rep.m) + ',' + std::to_string(rep.k) + ',' +
           fmt(rep.collusive_avg) + ',' + fmt(rep.gain) + '\n';
    }
    write_text(cfg.out, s);
  }
  return all_nonpositive ? kExitOk : kExitViolated;
}

int cmd_region_map(const pgg::ExperimentConfig& cfg) {
  const auto points = pgg::region_map(cfg.n_min, cfg.n_max, cfg.r_step);
  if (cfg.format == "json") {
    json j = json::array();
    for (const auto& pt : points) {
      j.push_back({{"n", pt.n},
                   {"r", pt.r},
                   {"regime", pt.regime},
                   {"min_profitable_alliance", pt.min_profitable_alliance}});
    }
    write_text(cfg.out, j.dump(2) + "\n");
  } else {
    std::string s = "n,r,regime,min_profitable_alliance\n";
    for (const auto& pt : points) {
      s += std::to_string(pt.n) + ',' + fmt(pt.r) + ',' + pt.regime + ',' +
           std::to_string(pt.min_profitable_alliance) + '\n';
    }
    write_text(cfg.out, s);
  }
  return kExitOk;
}

int cmd_payoff_cloud(const pgg::ExperimentConfig& cfg) {
  const pgg::PublicGoodsGame game(cfg.n, cfg.r);
  const auto focal = pgg::parse_strategy(cfg.strategy, cfg.n);
  const auto verdict = pgg::check_enforcing(game, focal);
  if (!verdict.overall) {
    std::cerr << "payoff-cloud: focal strategy fails check_enforcing:\n"
              << json(verdict).dump(2) << "\n";
    return kExitUsage;
  }
  const auto result = pgg::payoff_cloud(game, focal, cfg.samples, cfg.seed,
                                        cfg.horizon, 0, cfg.perturb);

  const int n = cfg.n;
  std::string s = "sample";
  for (int opp = 1; opp < n; ++opp) {
    for (int k = 0; k < n; ++k) s += ",opp" + std::to_string(opp) + "_pc" + std::to_string(k);
    for (int k = 0; k < n; ++k) s += ",opp" + std::to_string(opp) + "_pd" + std::to_string(k);
    s += ",opp" + std::to_string(opp) + "_first";
  }
  for (int i = 0; i < n; ++i) s += ",payoff" + std::to_string(i);
  s += ",cesaro_gap\n";
  for (std::size_t idx = 0; idx < result.records.size(); ++idx) {
    const auto& rec = result.records[idx];
    s += std::to_string(idx);
    for (const auto& opp : rec.opponents) {
      for (int k = 0; k < n; ++k) s += ',' + fmt(opp.if_cooperated(k));
      for (int k = 0; k < n; ++k) s += ',' + fmt(opp.if_defected(k));
      s += ',' + fmt(opp.first_move);
    }
    for (int i = 0; i < n; ++i) s += ',' + fmt(rec.payoffs(i));
    s += ',' + fmt(rec.diagnostic) + '\n';
  }
  write_text(cfg.out, s);

  if (!result.bound_holds) {
    std::cerr << "payoff-cloud: opponent payoff " << fmt(result.max_opponent_payoff)
              << " exceeds the mutual-cooperation bound\n";
    return kExitViolated;
  }
  return kExitOk;
}

int cmd_learn(const pgg::ExperimentConfig& cfg) {
  const pgg::PublicGoodsGame game(cfg.n, cfg.r);
  const auto scenario = pgg::scenario_from_string(cfg.scenario);
  const auto leader = pgg::parse_strategy(cfg.leader, cfg.n);
  const auto result = pgg::learn_batch(scenario, game, leader, cfg);

  const std::filesystem::path dir = cfg.out.empty() ? "learn_out" : cfg.out;
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
    const auto& traj = result.trajectories[i];
    std::string s = "stage,outcome";
    for (int p = 0; p < cfg.n; ++p) s += ",payoff" + std::to_string(p);
    for (int p = 0; p < cfg.n; ++p) s += ",avg" + std::to_string(p);
    s += '\n';
    for (Eigen::Index t = 0; t < traj.stage_payoffs.rows(); ++t) {
      s += std::to_string(t + 1) + ',' +
           std::to_string(traj.outcomes[static_cast<std::size_t>(t)]);
      for (int p = 0; p < cfg.n; ++p) s += ',' + fmt(traj.stage_payoffs(t, p));
      for (int p = 0; p < cfg.n; ++p) s += ',' + fmt(traj.running_avg(t, p));
      s += '\n';
    }
    std::ofstream f(dir / ("trajectory_seed" + std::to_string(result.summaries[i].seed) +
                           ".csv"),
                    std::ios::binary);
    f << s;
  }

  json summary;
  summary["scenario"] = cfg.scenario;
  summary["n"] = cfg.n;
  summary["r"] = cfg.r;
  summary["leader"] = cfg.leader;
  summary["stages"] = cfg.stages;
  summary["threshold"] = result.threshold;
  summary["target"] = game.mutual_cooperation_payoff();
  summary["converged_count"] = result.converged_count;
  json runs = json::array();
  for (const auto& s : result.summaries) {
    std::vector<double> avg(s.final_avg.data(), s.final_avg.data() + s.final_avg.size());
    runs.push_back({{"seed", s.seed}, {"final_avg", avg}, {"converged", s.converged}});
  }
  summary["runs"] = runs;
  std::ofstream f(dir / "summary.json", std::ios::binary);
  f << summary.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  pgg::ExperimentConfig cfg;
  try {
    cfg = preload_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"repeated public goods game toolkit"};
  app.require_subcommand(1);
  std::string config_path;  // consumed by preload_config; registered so CLI11 accepts it

  auto add_common = [&](CLI::App* cmd, bool with_game = true) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
    cmd->add_option("--seed", cfg.seed, "root random seed");
    cmd->add_option("--out", cfg.out, "output path (stdout when omitted)");
    cmd->add_option("--format", cfg.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    if (with_game) {
      cmd->add_option("--n", cfg.n, "player count");
      cmd->add_option("--r", cfg.r, "pot multiplication factor");
    }
  };

  auto* check = app.add_subcommand("check", "decide whether a strategy is cooperation enforcing");
  add_common(check);
  check->add_option("--strategy", cfg.strategy,
                    "classic name or 2n+1 comma-separated probabilities");
  check->parse_complete_callback([&] { cfg.kind = "check"; });

  auto* collusion = app.add_subcommand("collusion", "alliance gains for every (m, k)");
  add_common(collusion);
  collusion->parse_complete_callback([&] { cfg.kind = "collusion"; });

  auto* region = app.add_subcommand("region-map", "classify (n, r) parameter regions");
  add_common(region, false);
  region->add_option("--n-min", cfg.n_min, "smallest player count");
  region->add_option("--n-max", cfg.n_max, "largest player count");
  region->add_option("--r-step", cfg.r_step, "grid resolution in r");
  region->parse_complete_callback([&] { cfg.kind = "region-map"; });

  auto* cloud = app.add_subcommand(
      "payoff-cloud", "payoffs of sampled opponents against an enforcing focal strategy");
  add_common(cloud);
  cloud->add_option("--strategy", cfg.strategy, "focal strategy (seat 0)");
  cloud->add_option("--samples", cfg.samples, "number of sampled opponent tuples");
  cloud->add_option("--horizon", cfg.horizon, "Cesaro averaging horizon");
  cloud->add_option("--perturb", cfg.perturb,
                    "clamp strategies into [d, 1-d] to make the chain ergodic");
  cloud->parse_complete_callback([&] { cfg.kind = "payoff-cloud"; });

  auto* learn = app.add_subcommand("learn", "reinforcement learning scenarios");
  add_common(learn);
  learn->add_option("--scenario", cfg.scenario, "A, B, or C");
  learn->add_option("--leader", cfg.leader, "leader strategy (must pass check)");
  learn->add_option("--seeds", cfg.seeds, "number of runs; run i uses seed+i");
  learn->add_option("--stages", cfg.stages, "stages per run");
  learn->add_option("--alpha", cfg.alpha, "Q-value step size");
  learn->add_option("--beta", cfg.beta, "average-reward step size");
  learn->add_option("--eps-init", cfg.eps_init, "initial exploration rate");
  learn->add_option("--eps-decay", cfg.eps_decay, "per-stage exploration decay");
  learn->add_option("--eps-floor", cfg.eps_floor, "exploration floor");
  learn->add_flag("--mixed-avg", cfg.mixed_avg,
                  "use the frozen mixed average-reward estimator");
  learn->parse_complete_callback([&] { cfg.kind = "learn"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(cfg);
    if (collusion->parsed()) return cmd_collusion(cfg);
    if (region->parsed()) return cmd_region_map(cfg);
    if (cloud->parsed()) return cmd_payoff_cloud(cfg);
    if (learn->parsed()) return cmd_learn(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

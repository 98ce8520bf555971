#include "pgg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pgg/enforcement.hpp"

namespace pgg {

namespace {

const char* const kConfigKeys[] = {
    "kind",     "n",       "r",         "strategy", "leader",    "scenario",
    "samples",  "horizon", "stages",    "seeds",    "seed",      "alpha",
    "beta",     "eps_init", "eps_decay", "eps_floor", "mixed_avg", "n_min",
    "n_max",    "r_step",  "perturb",   "out",       "format"};

MemoryOneStrategy sample_opponent(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd pc(n);
  Eigen::VectorXd pd(n);
  for (int k = 0; k < n; ++k) pc(k) = unit(rng);
  for (int k = 0; k < n; ++k) pd(k) = unit(rng);
  return MemoryOneStrategy(std::move(pc), std::move(pd), 0.5);
}

}  // namespace

LearnerConfig ExperimentConfig::learner_config(std::uint64_t run_seed) const {
  LearnerConfig lc;
  lc.alpha = alpha;
  lc.beta = beta;
  lc.epsilon = EpsilonSchedule{eps_init, eps_decay, eps_floor};
  lc.seed = run_seed;
  lc.mixed_average_update = mixed_avg;
  return lc;
}

void to_json(nlohmann::json& j, const ExperimentConfig& cfg) {
  j = nlohmann::json{{"kind", cfg.kind},
                     {"n", cfg.n},
                     {"r", cfg.r},
                     {"strategy", cfg.strategy},
                     {"leader", cfg.leader},
                     {"scenario", cfg.scenario},
                     {"samples", cfg.samples},
                     {"horizon", cfg.horizon},
                     {"stages", cfg.stages},
                     {"seeds", cfg.seeds},
                     {"seed", cfg.seed},
                     {"alpha", cfg.alpha},
                     {"beta", cfg.beta},
                     {"eps_init", cfg.eps_init},
                     {"eps_decay", cfg.eps_decay},
                     {"eps_floor", cfg.eps_floor},
                     {"mixed_avg", cfg.mixed_avg},
                     {"n_min", cfg.n_min},
                     {"n_max", cfg.n_max},
                     {"r_step", cfg.r_step},
                     {"perturb", cfg.perturb},
                     {"out", cfg.out},
                     {"format", cfg.format}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& cfg) {
  for (const auto& item : j.items()) {
    const bool known = std::any_of(std::begin(kConfigKeys), std::end(kConfigKeys),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) {
      throw std::invalid_argument("config: unknown field '" + item.key() + "'");
    }
  }
  cfg.kind = j.value("kind", cfg.kind);
  cfg.n = j.value("n", cfg.n);
  cfg.r = j.value("r", cfg.r);
  cfg.strategy = j.value("strategy", cfg.strategy);
  cfg.leader = j.value("leader", cfg.leader);
  cfg.scenario = j.value("scenario", cfg.scenario);
  cfg.samples = j.value("samples", cfg.samples);
  cfg.horizon = j.value("horizon", cfg.horizon);
  cfg.stages = j.value("stages", cfg.stages);
  cfg.seeds = j.value("seeds", cfg.seeds);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.beta = j.value("beta", cfg.beta);
  cfg.eps_init = j.value("eps_init", cfg.eps_init);
  cfg.eps_decay = j.value("eps_decay", cfg.eps_decay);
  cfg.eps_floor = j.value("eps_floor", cfg.eps_floor);
  cfg.mixed_avg = j.value("mixed_avg", cfg.mixed_avg);
  cfg.n_min = j.value("n_min", cfg.n_min);
  cfg.n_max = j.value("n_max", cfg.n_max);
  cfg.r_step = j.value("r_step", cfg.r_step);
  cfg.perturb = j.value("perturb", cfg.perturb);
  cfg.out = j.value("out", cfg.out);
  cfg.format = j.value("format", cfg.format);
  if (!cfg.format.empty() && cfg.format != "csv" && cfg.format != "json") {
    throw std::invalid_argument("config: format must be csv or json");
  }
}

MemoryOneStrategy parse_strategy(const std::string& spec, int n) {
  if (spec.find(',') == std::string::npos) {
    return classic_strategy(spec, n);
  }
  std::vector<double> values;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    values.push_back(std::stod(token));
  }
  if (static_cast<int>(values.size()) != 2 * n + 1) {
    throw std::invalid_argument(
        "strategy: explicit spec needs 2n+1 values "
        "(if_cooperated[0..n-1], if_defected[0..n-1], first_move)");
  }
  Eigen::VectorXd pc(n);
  Eigen::VectorXd pd(n);
  for (int k = 0; k < n; ++k) pc(k) = values[static_cast<std::size_t>(k)];
  for (int k = 0; k < n; ++k) pd(k) = values[static_cast<std::size_t>(n + k)];
  return MemoryOneStrategy(std::move(pc), std::move(pd), values.back());
}

PayoffCloudResult payoff_cloud(const PublicGoodsGame& game, const MemoryOneStrategy& focal,
                               long long samples, std::uint64_t seed, long long horizon,
                               unsigned workers, double perturb) {
  if (samples < 1) throw std::invalid_argument("payoff_cloud: need at least one sample");
  if (perturb < 0.0 || perturb >= 0.5) {
    throw std::invalid_argument("payoff_cloud: perturb must lie in [0, 0.5)");
  }
  const auto verdict = check_enforcing(game, focal);
  if (!verdict.overall) {
    throw std::invalid_argument("payoff_cloud: focal strategy fails check_enforcing");
  }
  const int n = game.n;
  const long long total = samples + 1;  // record 0 is the injected wsls pair

  auto evaluate = [&](long long index) {
    PayoffCloudRecord rec;
    if (index == 0) {
      rec.opponents.assign(static_cast<std::size_t>(n - 1),
                           classic_strategy(Classic::WinStayLoseShift, n));
    } else {
      std::seed_seq seq{static_cast<std::uint64_t>(seed),
                        static_cast<std::uint64_t>(index)};
      std::mt19937_64 rng(seq);
      for (int i = 0; i < n - 1; ++i) rec.opponents.push_back(sample_opponent(n, rng));
    }
    std::vector<MemoryOneStrategy> seats{focal};
    seats.insert(seats.end(), rec.opponents.begin(), rec.opponents.end());
    if (perturb > 0.0) {
      for (auto& seat : seats) seat = perturbed(seat, perturb);
    }
    const StrategyProfile profile(std::move(seats));
    const Eigen::MatrixXd P = transition_matrix(profile);
    const LimitDistribution v = limit_cesaro(P, first_stage_distribution(profile), horizon);
    rec.payoffs = expected_payoffs(game, v);
    rec.diagnostic = v.diagnostic;
    return rec;
  };

  PayoffCloudResult result;
  result.records.resize(static_cast<std::size_t>(total));
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, 64u);
  std::vector<std::future<void>> futures;
  std::atomic<long long> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&]() {
      for (long long i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
        result.records[static_cast<std::size_t>(i)] = evaluate(i);
      }
    }));
  }
  for (auto& f : futures) f.get();

  const double limit = game.mutual_cooperation_payoff() + 1e-6;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& rec : result.records) {
    worst = std::max(worst, rec.payoffs.tail(n - 1).maxCoeff());
  }
  result.max_opponent_payoff = worst;
  result.bound_holds = worst <= limit;
  return result;
}

std::vector<RegionPoint> region_map(int n_min, int n_max, double r_step) {
  if (n_min < 2 || n_max < n_min) {
    throw std::invalid_argument("region_map: need 2 <= n_min <= n_max");
  }
  if (!(r_step > 0.0)) throw std::invalid_argument("region_map: r_step must be positive");
  std::vector<RegionPoint> points;
  for (int n = n_min; n <= n_max; ++n) {
    for (int j = 1;; ++j) {
      const double r = r_step * j;
      if (r > n + 1.0) break;
      RegionPoint pt;
      pt.n = n;
      pt.r = r;
      if (r <= 1.0 || r >= static_cast<double>(n)) {
        pt.regime = "no-dilemma";
      } else if (r <= n / 2.0) {
        pt.regime = "enforcing-impossible";
      } else {
        pt.regime = "enforcing-exists";
      }
      pt.min_profitable_alliance = 0;
      for (int m = 2; m <= n; ++m) {
        if (r < static_cast<double>(n) / m) {
          pt.min_profitable_alliance = m;
          break;
        }
      }
      points.push_back(std::move(pt));
    }
  }
  return points;
}

LearnBatchResult learn_batch(Scenario scenario, const PublicGoodsGame& game,
                             const MemoryOneStrategy& leader, const ExperimentConfig& cfg) {
  if (cfg.seeds < 1) throw std::invalid_argument("learn_batch: need at least one seed");
  LearnBatchResult result;
  const double target = game.mutual_cooperation_payoff();
  for (int i = 0; i < cfg.seeds; ++i) {
    const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(i);
    Trajectory traj =
        run_scenario(scenario, game, leader, cfg.learner_config(run_seed), cfg.stages);
    LearnRunSummary summary;
    summary.seed = run_seed;
    summary.final_avg = traj.final_avg();
    summary.converged =
        (summary.final_avg.array() - target).abs().maxCoeff() <= result.threshold;
    if (summary.converged) ++result.converged_count;
    result.summaries.push_back(std::move(summary));
    result.trajectories.push_back(std::move(traj));
  }
  return result;
}

}  // namespace pgg

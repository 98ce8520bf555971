#ifndef PGG_EXPERIMENT_HPP
#define PGG_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "pgg/game.hpp"
#include "pgg/learning.hpp"
#include "pgg/markov.hpp"

namespace pgg {

// Shared knob set for all experiment commands; each command reads the subset
// it needs. Unknown fields in a config file are rejected.
struct ExperimentConfig {
  std::string kind = "check";
  int n = 3;
  double r = 2.0;
  std::string strategy = "wsls";  // focal / checked strategy spec
  std::string leader = "pavlov";  // learning scenarios need a leader that can
                                  // recover cooperation after exploration
  std::string scenario = "A";
  long long samples = 100000;
  long long horizon = 200000;  // Cesaro horizon
  long long stages = 100000;   // learning stages per run
  int seeds = 10;              // learning batch size
  std::uint64_t seed = 0;
  double alpha = 0.1;
  double beta = 0.01;
  double eps_init = 0.3;
  double eps_decay = 0.9999;
  double eps_floor = 0.001;
  bool mixed_avg = false;  // use the frozen mixed average-reward estimator
  int n_min = 2;
  int n_max = 6;
  double r_step = 0.1;
  double perturb = 0.0;  // payoff-cloud: clamp strategies into [d, 1-d] first
  std::string out;
  std::string format;  // empty: the command's natural format (csv or json)

  LearnerConfig learner_config(std::uint64_t run_seed) const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);  // rejects unknown keys

// Classic name ("wsls", "grim", ...) or 2n+1 comma-separated probabilities:
// if_cooperated[0..n-1], if_defected[0..n-1], first_move.
MemoryOneStrategy parse_strategy(const std::string& spec, int n);

struct PayoffCloudRecord {
  std::vector<MemoryOneStrategy> opponents;  // n-1 sampled opponents, seats 1..n-1
  Eigen::VectorXd payoffs;                   // per seat
  double diagnostic = 0.0;                   // Cesaro convergence gap
};

struct PayoffCloudResult {
  std::vector<PayoffCloudRecord> records;  // record 0 is the injected wsls pair
  double max_opponent_payoff = 0.0;
  bool bound_holds = false;  // every opponent payoff <= R_{c,n-1} + 1e-6
};

// Focal strategy at seat 0 against opponents sampled uniformly from [0,1]^2n
// with first move 1/2; payoffs via limit_cesaro over `horizon` stages from
// the profile's first-stage distribution. Sample i draws from a generator
// split as (seed, i), so the worker count never changes the records.
// perturb > 0 clamps every seat's conditional probabilities into
// [perturb, 1-perturb], a cross-check that makes the joint chain ergodic.
PayoffCloudResult payoff_cloud(const PublicGoodsGame& game, const MemoryOneStrategy& focal,
                               long long samples, std::uint64_t seed, long long horizon,
                               unsigned workers = 0, double perturb = 0.0);

struct RegionPoint {
  int n = 0;
  double r = 0.0;
  std::string regime;              // no-dilemma | enforcing-impossible | enforcing-exists
  int min_profitable_alliance = 0; // smallest m with r < n/m, 0 if none
};

std::vector<RegionPoint> region_map(int n_min, int n_max, double r_step);

struct LearnRunSummary {
  std::uint64_t seed = 0;
  Eigen::VectorXd final_avg;
  bool converged = false;  // every player within 0.05 of R_{c,n-1}
};

struct LearnBatchResult {
  std::vector<Trajectory> trajectories;
  std::vector<LearnRunSummary> summaries;
  int converged_count = 0;
  double threshold = 0.05;
};

LearnBatchResult learn_batch(Scenario scenario, const PublicGoodsGame& game,
                             const MemoryOneStrategy& leader, const ExperimentConfig& cfg);

}  // namespace pgg

#endif  // PGG_EXPERIMENT_HPP

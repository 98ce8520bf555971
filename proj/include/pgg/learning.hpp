#ifndef PGG_LEARNING_HPP
#define PGG_LEARNING_HPP

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pgg/game.hpp"

namespace pgg {

struct EpsilonSchedule {
  double initial = 0.3;
  double decay = 0.9999;  // multiplicative, per stage
  double floor = 0.001;

  // Exploration rate at stage t >= 1.
  double at(long long t) const;
};

struct LearnerConfig {
  double alpha = 0.1;  // Q-value step size
  double beta = 0.01;  // average-reward step size, used only by the mixed update
  EpsilonSchedule epsilon;
  std::uint64_t seed = 0;
  // Average-reward estimator for the gated update. The default keeps the
  // plain running average [(t-1) Rbar + R] / t. The mixed variant
  // (1 - beta) Rbar + beta [(t-1) Rbar + R] / t is kept for sensitivity
  // analysis; its effective step size shrinks like beta/t, so the estimate
  // freezes early and long runs can lock into suboptimal cycles.
  bool mixed_average_update = false;
};

// Tabular action values over the 2^n outcome space plus the running estimate
// of the optimal average reward. Starts at all zeros.
struct QTable {
  Eigen::MatrixXd q;  // 2^n rows, one column per action
  double avg_reward = 0.0;

  static QTable zeros(int n, int num_actions);
  int num_actions() const { return static_cast<int>(q.cols()); }
};

// Epsilon-greedy action selection on row o.bits: with probability 1-epsilon
// the argmax (ties broken uniformly at random), otherwise a uniform action.
int select_action(const QTable& q, const Outcome& o, double epsilon, std::mt19937_64& rng);

// Average-reward Q-learning update:
//   delta = R - Rbar + max_a' Q(o', a') - Q(o, a);  Q(o, a) += alpha * delta;
// then, only if the updated Q(o, a) equals the row maximum, Rbar moves to
// [(t-1) Rbar + R] / t (or the mixed variant when configured). The row
// maximum in the gate is taken after the update.
void learner_update(QTable& q, const Outcome& prev_o, int action, const Outcome& new_o,
                    double reward, long long t, const LearnerConfig& cfg);

// A: all seats but the last play the leader strategy; the last seat learns.
// B: seat 0 plays the leader strategy; every other seat learns independently.
// C: seat 0 plays the leader strategy; the remaining seats form one learning
//    alliance over their joint action space, rewarded with the members' mean
//    stage payoff.
enum class Scenario { A, B, C };

Scenario scenario_from_string(std::string_view s);

struct Trajectory {
  std::vector<std::uint32_t> outcomes;  // outcome bits per stage, length T
  Eigen::MatrixXd stage_payoffs;        // T x n
  Eigen::MatrixXd running_avg;          // T x n prefix means

  Eigen::VectorXd final_avg() const;
};

// Runs T stages from the initial outcome c^n (both the learners' state and
// the leaders' conditioning start there). The leader must pass
// check_enforcing. Deterministic given cfg.seed.
Trajectory run_scenario(Scenario scenario, const PublicGoodsGame& game,
                        const MemoryOneStrategy& leader, const LearnerConfig& cfg,
                        long long T);

}  // namespace pgg

#endif  // PGG_LEARNING_HPP

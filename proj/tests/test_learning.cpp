#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "pgg/enforcement.hpp"
#include "pgg/learning.hpp"
#include "pgg/markov.hpp"

using namespace pgg;

TEST_CASE("epsilon schedule") {
  const EpsilonSchedule eps{0.3, 0.9999, 0.001};
  CHECK(eps.at(1) == 0.3);
  CHECK(eps.at(2) == doctest::Approx(0.3 * 0.9999));
  CHECK(eps.at(1000000) == 0.001);
  CHECK_THROWS_AS(eps.at(0), std::invalid_argument);
}

TEST_CASE("action selection") {
  const int n = 3;
  std::mt19937_64 rng(1);
  QTable q = QTable::zeros(n, 2);
  const Outcome o = Outcome::all_cooperate(n);
  q.q(o.bits, static_cast<int>(Action::Cooperate)) = 1.0;

  // Pure greedy always picks the distinct maximizer.
  for (int i = 0; i < 100; ++i) {
    CHECK(select_action(q, o, 0.0, rng) == static_cast<int>(Action::Cooperate));
  }

  // Pure exploration is a fair coin over the two actions.
  int coop = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    coop += select_action(q, o, 1.0, rng) == static_cast<int>(Action::Cooperate);
  }
  CHECK(std::abs(coop / double(draws) - 0.5) < 0.01);

  // Greedy frequency under epsilon = 0.1 is 1 - eps + eps/2 = 0.95.
  int greedy = 0;
  for (int i = 0; i < draws; ++i) {
    greedy += select_action(q, o, 0.1, rng) == static_cast<int>(Action::Cooperate);
  }
  CHECK(std::abs(greedy / double(draws) - 0.95) < 0.01);

  // Zero-initialized rows tie-break uniformly.
  QTable fresh = QTable::zeros(n, 2);
  int first = 0;
  for (int i = 0; i < draws; ++i) {
    first += select_action(fresh, o, 0.0, rng) == 0;
  }
  CHECK(std::abs(first / double(draws) - 0.5) < 0.01);
}

TEST_CASE("learner update hand trace") {
  const int n = 3;
  LearnerConfig cfg;
  cfg.alpha = 0.1;
  cfg.beta = 0.05;
  const Outcome ccc = Outcome::all_cooperate(n);

  // The printed mixed estimator: Rbar = (1-b)*0 + b*[(0)*0 + 1]/1.
  QTable q = QTable::zeros(n, 2);
  cfg.mixed_average_update = true;
  learner_update(q, ccc, static_cast<int>(Action::Cooperate), ccc, 1.0, 1, cfg);
  CHECK(q.q(ccc.bits, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(q.avg_reward == doctest::Approx(0.05).epsilon(1e-15));

  // Default mode: Rbar jumps straight to the running mean of rewards.
  QTable q2 = QTable::zeros(n, 2);
  cfg.mixed_average_update = false;
  learner_update(q2, ccc, static_cast<int>(Action::Cooperate), ccc, 1.0, 1, cfg);
  CHECK(q2.q(ccc.bits, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(q2.avg_reward == 1.0);
}

TEST_CASE("learner update fixed point and gate") {
  const int n = 2;
  LearnerConfig cfg;
  const Outcome cc = Outcome::all_cooperate(n);
  const Outcome dd = Outcome::all_defect(n);

  // reward = Rbar and matching action values: delta = 0, nothing moves.
  QTable q = QTable::zeros(n, 2);
  q.avg_reward = 0.5;
  q.q.setConstant(2.0);
  learner_update(q, cc, 0, dd, 0.5, 10, cfg);
  CHECK(q.q(cc.bits, 0) == 2.0);

  // A strongly negative reward drags the updated cell below the row max, so
  // the average-reward estimate must not move.
  QTable q2 = QTable::zeros(n, 2);
  q2.avg_reward = 0.75;
  learner_update(q2, cc, 0, dd, -5.0, 3, cfg);
  CHECK(q2.q(cc.bits, 0) < q2.q.row(cc.bits).maxCoeff());
  CHECK(q2.avg_reward == 0.75);
}

TEST_CASE("scenario runs are deterministic and internally consistent") {
  const PublicGoodsGame game(3, 2.0);
  const auto leader = classic_strategy(Classic::Pavlov, 3);
  LearnerConfig cfg;
  cfg.seed = 12345;

  const Trajectory a = run_scenario(Scenario::A, game, leader, cfg, 20000);
  const Trajectory b = run_scenario(Scenario::A, game, leader, cfg, 20000);
  CHECK(a.outcomes == b.outcomes);
  CHECK(a.stage_payoffs == b.stage_payoffs);
  CHECK(a.running_avg == b.running_avg);

  // Stage rewards equal the game's outcome payoffs, and running averages are
  // the prefix means.
  Eigen::VectorXd prefix = Eigen::VectorXd::Zero(3);
  for (Eigen::Index t = 0; t < a.stage_payoffs.rows(); ++t) {
    const Outcome o(a.outcomes[static_cast<std::size_t>(t)], 3);
    CHECK(a.stage_payoffs.row(t).transpose() == outcome_payoffs(game, o));
    prefix += a.stage_payoffs.row(t).transpose();
    const Eigen::VectorXd mean = prefix / static_cast<double>(t + 1);
    CHECK((a.running_avg.row(t).transpose() - mean).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("scenario preconditions") {
  const PublicGoodsGame game(3, 2.0);
  LearnerConfig cfg;
  CHECK_THROWS_AS(
      run_scenario(Scenario::A, game, classic_strategy(Classic::AllC, 3), cfg, 100),
      std::invalid_argument);
  CHECK_THROWS_AS(
      run_scenario(Scenario::A, game, classic_strategy(Classic::Pavlov, 3), cfg, 0),
      std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_string("D"), std::invalid_argument);
  CHECK(scenario_from_string("b") == Scenario::B);
}

TEST_CASE("single learner against recovering leaders finds cooperation") {
  const PublicGoodsGame game(3, 2.0);
  const auto leader = classic_strategy(Classic::Pavlov, 3);
  LearnerConfig cfg;
  cfg.seed = 0;
  const Trajectory traj = run_scenario(Scenario::A, game, leader, cfg, 100000);
  const Eigen::VectorXd fin = traj.final_avg();
  CHECK((fin.array() - 1.0).abs().maxCoeff() <= 0.05);
  // Achievable payoff against two enforcing seats never beats mutual
  // cooperation.
  CHECK(fin(2) <= game.mutual_cooperation_payoff() + 1e-6);
}

TEST_CASE("learner payoff stays below the enforcement cap in every run") {
  const PublicGoodsGame game(3, 2.0);
  const auto leader = classic_strategy(Classic::Pavlov, 3);
  const double cap = game.mutual_cooperation_payoff() + 1e-6;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    LearnerConfig cfg;
    cfg.seed = seed;
    const Trajectory traj = run_scenario(Scenario::A, game, leader, cfg, 30000);
    CHECK(traj.final_avg()(2) <= cap);
  }
}

TEST_CASE("two win-stay leaders cannot restore cooperation once it breaks") {
  // With two seats playing the printed win-stay lose-shift vector, both
  // leaders cooperate next stage only if the previous outcome was full
  // cooperation, so a single learner defection removes the cooperative state
  // for good. The chain from the post-defection outcome carries no mass back
  // to it.
  const auto wsls = classic_strategy(Classic::WinStayLoseShift, 3);
  const StrategyProfile profile({wsls, wsls, classic_strategy(Classic::AllC, 3)});
  Eigen::VectorXd start = Eigen::VectorXd::Zero(8);
  start(Outcome::from_string("ccd").bits) = 1.0;
  const auto limit = limit_cesaro(transition_matrix(profile), start, 20000);
  CHECK(limit.v(Outcome::all_cooperate(3).bits) == 0.0);

  // The learning run completes and records the collapse; no convergence is
  // asserted for this leader.
  const PublicGoodsGame game(3, 2.0);
  LearnerConfig cfg;
  cfg.seed = 1;
  const Trajectory traj = run_scenario(Scenario::A, game, wsls, cfg, 20000);
  CHECK(traj.outcomes.size() == 20000);
}

TEST_CASE("alliance scenario runs and converges for a smoke seed") {
  const PublicGoodsGame game(3, 2.0);
  const auto leader = classic_strategy(Classic::Pavlov, 3);
  LearnerConfig cfg;
  cfg.seed = 3;
  const Trajectory traj = run_scenario(Scenario::C, game, leader, cfg, 100000);
  CHECK((traj.final_avg().array() - 1.0).abs().maxCoeff() <= 0.05);
}

TEST_CASE("independent learners scenario records its trajectory") {
  const PublicGoodsGame game(3, 2.0);
  LearnerConfig cfg;
  cfg.seed = 5;
  const Trajectory traj =
      run_scenario(Scenario::B, game, classic_strategy(Classic::Pavlov, 3), cfg, 20000);
  CHECK(traj.outcomes.size() == 20000);
  CHECK(traj.final_avg().size() == 3);
}

TEST_CASE("q table stays finite under a million noisy updates") {
  const PublicGoodsGame game(3, 2.0);
  LearnerConfig cfg;
  cfg.alpha = 0.5;
  QTable q = QTable::zeros(3, 2);
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> state(0, 7);
  std::uniform_int_distribution<int> action(0, 1);
  std::uniform_real_distribution<double> reward(stage_payoff(game, Action::Defect, 0),
                                                stage_payoff(game, Action::Defect, 2));
  Outcome prev(static_cast<std::uint32_t>(state(rng)), 3);
  for (long long t = 1; t <= 1'000'000; ++t) {
    const Outcome next(static_cast<std::uint32_t>(state(rng)), 3);
    learner_update(q, prev, action(rng), next, reward(rng), t, cfg);
    prev = next;
  }
  CHECK(q.q.allFinite());
  CHECK(std::isfinite(q.avg_reward));
  CHECK(q.q.cwiseAbs().maxCoeff() < 1e6);
}

TEST_CASE("q values stay bounded over long runs") {
  const PublicGoodsGame game(3, 2.0);
  const auto leader = classic_strategy(Classic::Pavlov, 3);
  LearnerConfig cfg;
  cfg.alpha = 0.5;
  cfg.seed = 8;
  const Trajectory traj = run_scenario(Scenario::A, game, leader, cfg, 1000000);
  CHECK(traj.stage_payoffs.allFinite());
  CHECK(traj.running_avg.allFinite());
  const double lo = stage_payoff(game, Action::Cooperate, 0);
  const double hi = stage_payoff(game, Action::Defect, game.n - 1);
  CHECK(traj.running_avg.minCoeff() >= lo - 1e-9);
  CHECK(traj.running_avg.maxCoeff() <= hi + 1e-9);
}

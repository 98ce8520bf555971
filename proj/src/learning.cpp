#include "pgg/learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pgg/enforcement.hpp"

namespace pgg {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

int argmax_with_ties(const Eigen::MatrixXd& q, Eigen::Index row, std::mt19937_64& rng) {
  const Eigen::Index cols = q.cols();
  const double best = q.row(row).maxCoeff();
  int count = 0;
  for (Eigen::Index a = 0; a < cols; ++a) {
    if (q(row, a) == best) ++count;
  }
  if (count == 1) {
    for (Eigen::Index a = 0; a < cols; ++a) {
      if (q(row, a) == best) return static_cast<int>(a);
    }
  }
  std::uniform_int_distribution<int> pick(0, count - 1);
  int target = pick(rng);
  for (Eigen::Index a = 0; a < cols; ++a) {
    if (q(row, a) == best && target-- == 0) return static_cast<int>(a);
  }
  throw std::logic_error("argmax_with_ties: unreachable");
}

}  // namespace

double EpsilonSchedule::at(long long t) const {
  require(t >= 1, "EpsilonSchedule: stage index starts at 1");
  return std::max(floor, initial * std::pow(decay, static_cast<double>(t - 1)));
}

QTable QTable::zeros(int n, int num_actions) {
  require(n >= 1 && n <= 31, "QTable: player count out of range");
  require(num_actions >= 2, "QTable: need at least two actions");
  return QTable{Eigen::MatrixXd::Zero(Eigen::Index{1} << n, num_actions), 0.0};
}

int select_action(const QTable& q, const Outcome& o, double epsilon, std::mt19937_64& rng) {
  require(epsilon >= 0.0 && epsilon <= 1.0, "select_action: epsilon must lie in [0,1]");
  require(o.bits < static_cast<std::uint32_t>(q.q.rows()), "select_action: outcome out of range");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, q.num_actions() - 1);
    return pick(rng);
  }
  return argmax_with_ties(q.q, o.bits, rng);
}

void learner_update(QTable& q, const Outcome& prev_o, int action, const Outcome& new_o,
                    double reward, long long t, const LearnerConfig& cfg) {
  require(t >= 1, "learner_update: stage index starts at 1");
  require(action >= 0 && action < q.num_actions(), "learner_update: action out of range");
  const Eigen::Index prev = prev_o.bits;
  const double delta =
      reward - q.avg_reward + q.q.row(new_o.bits).maxCoeff() - q.q(prev, action);
  q.q(prev, action) += cfg.alpha * delta;
  if (q.q(prev, action) == q.q.row(prev).maxCoeff()) {
    const double running =
        (static_cast<double>(t - 1) * q.avg_reward + reward) / static_cast<double>(t);
    q.avg_reward = cfg.mixed_average_update
                       ? (1.0 - cfg.beta) * q.avg_reward + cfg.beta * running
                       : running;
  }
}

Scenario scenario_from_string(std::string_view s) {
  if (s == "A" || s == "a") return Scenario::A;
  if (s == "B" || s == "b") return Scenario::B;
  if (s == "C" || s == "c") return Scenario::C;
  throw std::invalid_argument("scenario must be one of A, B, C");
}

Eigen::VectorXd Trajectory::final_avg() const {
  if (running_avg.rows() == 0) throw std::logic_error("Trajectory: empty");
  return running_avg.row(running_avg.rows() - 1).transpose();
}

Trajectory run_scenario(Scenario scenario, const PublicGoodsGame& game,
                        const MemoryOneStrategy& leader, const LearnerConfig& cfg,
                        long long T) {
  require(T >= 1, "run_scenario: horizon must be positive");
  require(leader.n == game.n, "run_scenario: leader/game size mismatch");
  if (!check_enforcing(game, leader).overall) {
    throw std::invalid_argument("run_scenario: leader must pass check_enforcing");
  }
  const int n = game.n;

  // Learner bookkeeping. Scenario C uses one table over the alliance's joint
  // action space; member seat 1+t cooperates iff bit t of the joint action.
  std::vector<int> learner_seats;
  std::vector<QTable> tables;
  switch (scenario) {
    case Scenario::A:
      learner_seats = {n - 1};
      tables.push_back(QTable::zeros(n, 2));
      break;
    case Scenario::B:
      for (int i = 1; i < n; ++i) learner_seats.push_back(i);
      for (int i = 1; i < n; ++i) tables.push_back(QTable::zeros(n, 2));
      break;
    case Scenario::C:
      for (int i = 1; i < n; ++i) learner_seats.push_back(i);
      tables.push_back(QTable::zeros(n, 1 << (n - 1)));
      break;
  }
  std::vector<char> is_learner(static_cast<std::size_t>(n), 0);
  for (int seat : learner_seats) is_learner[static_cast<std::size_t>(seat)] = 1;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Trajectory traj;
  traj.outcomes.resize(static_cast<std::size_t>(T));
  traj.stage_payoffs.resize(T, n);
  traj.running_avg.resize(T, n);
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(n);

  Outcome prev = Outcome::all_cooperate(n);
  for (long long t = 1; t <= T; ++t) {
    const double eps = cfg.epsilon.at(t);
    std::uint32_t bits = 0;
    std::vector<int> chosen(tables.size(), 0);

    // Leaders draw in seat order, then learners select in seat order.
    for (int i = 0; i < n; ++i) {
      if (is_learner[static_cast<std::size_t>(i)]) continue;
      const double prob = leader.prob(prev.action_of(i), opponent_cooperators(prev, i));
      if (unit(rng) < prob) bits |= std::uint32_t{1} << i;
    }
    if (scenario == Scenario::C) {
      const int joint = select_action(tables[0], prev, eps, rng);
      chosen[0] = joint;
      for (int member = 0; member < n - 1; ++member) {
        if ((joint >> member) & 1) bits |= std::uint32_t{1} << (member + 1);
      }
    } else {
      for (std::size_t li = 0; li < tables.size(); ++li) {
        const int a = select_action(tables[li], prev, eps, rng);
        chosen[li] = a;
        if (a == static_cast<int>(Action::Cooperate)) {
          bits |= std::uint32_t{1} << learner_seats[li];
        }
      }
    }

    const Outcome outcome(bits, n);
    const Eigen::VectorXd pay = outcome_payoffs(game, outcome);

    if (scenario == Scenario::C) {
      double reward = 0.0;
      for (int seat : learner_seats) reward += pay(seat);
      reward /= static_cast<double>(learner_seats.size());
      learner_update(tables[0], prev, chosen[0], outcome, reward, t, cfg);
    } else {
      for (std::size_t li = 0; li < tables.size(); ++li) {
        learner_update(tables[li], prev, chosen[li], outcome, pay(learner_seats[li]), t, cfg);
      }
    }

    avg += (pay - avg) / static_cast<double>(t);
    traj.outcomes[static_cast<std::size_t>(t - 1)] = bits;
    traj.stage_payoffs.row(t - 1) = pay.transpose();
    traj.running_avg.row(t - 1) = avg.transpose();
    prev = outcome;
  }
  return traj;
}

}  // namespace pgg

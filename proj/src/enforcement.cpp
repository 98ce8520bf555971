#include "pgg/enforcement.hpp"

#include <algorithm>
#include <random>

namespace pgg {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool applicable(const PublicGoodsGame& game) { return game.mpcr() > 0.5; }

}  // namespace

std::vector<std::pair<std::string, bool>> necessary_conditions(const PublicGoodsGame& game,
                                                               const MemoryOneStrategy& p) {
  require(p.n == game.n, "necessary_conditions: strategy/game size mismatch");
  return {
      {"if_cooperated[n-2] < 1", p.if_cooperated(game.n - 2) < 1.0},
      {"mpcr > 1/2", applicable(game)},
  };
}

Eigen::VectorXd enforcement_bounds(const PublicGoodsGame& game,
                                   double coop_after_penultimate) {
  require(coop_after_penultimate >= 0.0 && coop_after_penultimate < 1.0,
          "enforcement_bounds: need 0 <= if_cooperated[n-2] < 1");
  if (!applicable(game)) {
    throw InapplicableError("enforcement_bounds: requires r > n/2");
  }
  const int n = game.n;
  const double r_star = stage_payoff(game, Action::Cooperate, n - 1);
  const double denom = stage_payoff(game, Action::Defect, n - 1) - r_star;  // 1 - r/n > 0
  const double scale = (1.0 - coop_after_penultimate) / denom;
  Eigen::VectorXd bounds(n);
  for (int k = 0; k <= n - 2; ++k) {
    bounds(k) = scale * (r_star - stage_payoff(game, Action::Defect, k));
  }
  bounds(n - 1) = scale * (r_star - stage_payoff(game, Action::Cooperate, n - 2));
  return bounds;
}

EnforcementVerdict check_enforcing(const PublicGoodsGame& game, const MemoryOneStrategy& p) {
  require(p.n == game.n, "check_enforcing: strategy/game size mismatch");
  EnforcementVerdict verdict;
  verdict.applicable = applicable(game);
  const int n = game.n;

  verdict.constraints.push_back(
      {"first_move = 1", 1.0, p.first_move, p.first_move == 1.0});
  verdict.constraints.push_back({"if_cooperated[n-1] = 1", 1.0, p.if_cooperated(n - 1),
                                 p.if_cooperated(n - 1) == 1.0});
  const double pen = p.if_cooperated(n - 2);
  verdict.constraints.push_back(
      {"if_cooperated[n-2] < 1", 1.0, pen, pen < 1.0 - kStrictSlack});
  for (int k = 0; k <= n - 3; ++k) {
    // Unconstrained entries, recorded as vacuously satisfied.
    const std::string name = "if_cooperated[" + std::to_string(k) + "] unconstrained";
    verdict.constraints.push_back({name, 1.0, p.if_cooperated(k), true});
  }

  if (verdict.applicable && pen < 1.0) {
    const Eigen::VectorXd bounds = enforcement_bounds(game, pen);
    for (int k = 0; k < n; ++k) {
      const std::string name = "if_defected[" + std::to_string(k) + "] < bound";
      const double value = p.if_defected(k);
      verdict.constraints.push_back(
          {name, bounds(k), value, value < bounds(k) - kStrictSlack});
    }
  } else {
    for (int k = 0; k < n; ++k) {
      const std::string name = "if_defected[" + std::to_string(k) + "] < bound";
      verdict.constraints.push_back({name, 0.0, p.if_defected(k), false});
    }
  }

  verdict.overall = verdict.applicable &&
                    std::all_of(verdict.constraints.begin(), verdict.constraints.end(),
                                [](const ConstraintCheck& c) { return c.satisfied; });
  return verdict;
}

MemoryOneStrategy sample_enforcing(const PublicGoodsGame& game, std::uint64_t seed) {
  if (!applicable(game)) {
    throw InapplicableError("sample_enforcing: requires r > n/2");
  }
  constexpr double kMargin = 1e-9;
  const int n = game.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::VectorXd pc(n);
  Eigen::VectorXd pd(n);
  pc(n - 1) = 1.0;
  pc(n - 2) = unit(rng) * (1.0 - kMargin);
  for (int k = 0; k <= n - 3; ++k) pc(k) = unit(rng);
  const Eigen::VectorXd bounds = enforcement_bounds(game, pc(n - 2));
  for (int k = 0; k < n; ++k) {
    const double upper = std::max(0.0, std::min(1.0, bounds(k)) - kMargin);
    pd(k) = unit(rng) * upper;
  }
  return MemoryOneStrategy(std::move(pc), std::move(pd), 1.0);
}

CollusionReport collusion_gain(const PublicGoodsGame& game, int alliance_size,
                               int cooperators_inside) {
  const int n = game.n;
  const int m = alliance_size;
  const int k = cooperators_inside;
  require(m >= 2 && m <= n, "collusion_gain: alliance size must lie in [2, n]");
  require(k >= 0 && k <= m, "collusion_gain: cooperator count must lie in [0, m]");

  // k alliance cooperators + (n-m) cooperating outsiders.
  const int total_coop = k + n - m;
  double avg = 0.0;
  if (k > 0) avg += k * stage_payoff(game, Action::Cooperate, total_coop - 1);
  if (m - k > 0) avg += (m - k) * stage_payoff(game, Action::Defect, total_coop);
  avg /= m;

  const double gain =
      (m - k) * (n - m * game.r) / (static_cast<double>(m) * static_cast<double>(n));
  return CollusionReport{m, k, avg, gain};
}

std::vector<CollusionReport> collusion_scan(const PublicGoodsGame& game) {
  std::vector<CollusionReport> reports;
  for (int m = 2; m <= game.n; ++m) {
    for (int k = 0; k < m; ++k) {
      reports.push_back(collusion_gain(game, m, k));
    }
  }
  return reports;
}

int min_profitable_alliance(const PublicGoodsGame& game) {
  for (int m = 2; m <= game.n; ++m) {
    if (game.r < static_cast<double>(game.n) / m) return m;
  }
  return 0;
}

void to_json(nlohmann::json& j, const ConstraintCheck& c) {
  j = nlohmann::json{
      {"name", c.name}, {"bound", c.bound}, {"value", c.value}, {"satisfied", c.satisfied}};
}

void to_json(nlohmann::json& j, const EnforcementVerdict& v) {
  j = nlohmann::json{
      {"applicable", v.applicable}, {"constraints", v.constraints}, {"overall", v.overall}};
}

void to_json(nlohmann::json& j, const CollusionReport& rep) {
  j = nlohmann::json{{"m", rep.m},
                     {"k", rep.k},
                     {"collusive_avg", rep.collusive_avg},
                     {"gain", rep.gain}};
}

}  // namespace pgg

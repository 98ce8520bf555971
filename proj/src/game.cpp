#include "pgg/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pgg {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Outcome::Outcome(std::uint32_t bits_, int n_) : bits(bits_), n(n_) {
  require(n >= 1 && n <= 31, "Outcome: player count out of range");
  require(bits < (std::uint32_t{1} << n), "Outcome: bits exceed 2^n");
}

Action Outcome::action_of(int player) const {
  require(player >= 0 && player < n, "Outcome: player index out of range");
  return (bits >> player) & 1u ? Action::Cooperate : Action::Defect;
}

Outcome Outcome::all_cooperate(int n) {
  return Outcome((std::uint32_t{1} << n) - 1u, n);
}

Outcome Outcome::all_defect(int n) { return Outcome(0u, n); }

Outcome Outcome::from_string(std::string_view s) {
  require(!s.empty() && s.size() <= 31, "Outcome: bad string length");
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 'c') {
      bits |= std::uint32_t{1} << i;
    } else {
      require(s[i] == 'd', "Outcome: expected 'c' or 'd'");
    }
  }
  return Outcome(bits, static_cast<int>(s.size()));
}

std::string Outcome::str() const {
  std::string s(static_cast<std::size_t>(n), 'd');
  for (int i = 0; i < n; ++i) {
    if ((bits >> i) & 1u) s[static_cast<std::size_t>(i)] = 'c';
  }
  return s;
}

int opponent_cooperators(const Outcome& o, int player) {
  require(player >= 0 && player < o.n, "opponent_cooperators: player index out of range");
  const int own = (o.bits >> player) & 1u ? 1 : 0;
  return o.cooperator_count() - own;
}

PublicGoodsGame::PublicGoodsGame(int n_, double r_) : n(n_), r(r_) {
  require(n >= 2, "PublicGoodsGame: need at least two players");
  require(r > 1.0 && r < static_cast<double>(n),
          "PublicGoodsGame: social dilemma requires 1 < r < n");
}

double stage_payoff(const PublicGoodsGame& game, Action a, int k) {
  require(k >= 0 && k <= game.n - 1, "stage_payoff: opponent count out of range");
  const double n = static_cast<double>(game.n);
  if (a == Action::Cooperate) return game.r * (k + 1) / n - 1.0;
  return game.r * k / n;
}

Eigen::VectorXd outcome_payoffs(const PublicGoodsGame& game, const Outcome& o) {
  require(o.n == game.n, "outcome_payoffs: outcome/game size mismatch");
  Eigen::VectorXd pay(game.n);
  for (int i = 0; i < game.n; ++i) {
    pay(i) = stage_payoff(game, o.action_of(i), opponent_cooperators(o, i));
  }
  return pay;
}

MemoryOneStrategy::MemoryOneStrategy(Eigen::VectorXd if_cooperated_,
                                     Eigen::VectorXd if_defected_, double first_move_)
    : n(static_cast<int>(if_cooperated_.size())),
      if_cooperated(std::move(if_cooperated_)),
      if_defected(std::move(if_defected_)),
      first_move(first_move_) {
  require(n >= 2, "MemoryOneStrategy: need at least two players");
  require(if_defected.size() == n, "MemoryOneStrategy: vector lengths differ");
  auto in_unit = [](const Eigen::VectorXd& v) {
    return (v.array() >= 0.0).all() && (v.array() <= 1.0).all();
  };
  require(in_unit(if_cooperated) && in_unit(if_defected),
          "MemoryOneStrategy: probabilities must lie in [0,1]");
  require(first_move >= 0.0 && first_move <= 1.0,
          "MemoryOneStrategy: first move must lie in [0,1]");
}

double MemoryOneStrategy::prob(Action own_previous, int k) const {
  require(k >= 0 && k < n, "MemoryOneStrategy: opponent count out of range");
  return own_previous == Action::Cooperate ? if_cooperated(k) : if_defected(k);
}

bool MemoryOneStrategy::fully_mixed() const {
  return (if_cooperated.array() > 0.0).all() && (if_cooperated.array() < 1.0).all() &&
         (if_defected.array() > 0.0).all() && (if_defected.array() < 1.0).all();
}

MemoryOneStrategy perturbed(const MemoryOneStrategy& p, double delta) {
  require(delta > 0.0 && delta < 0.5, "perturbed: delta must lie in (0, 0.5)");
  MemoryOneStrategy q = p;
  q.if_cooperated = q.if_cooperated.cwiseMax(delta).cwiseMin(1.0 - delta);
  q.if_defected = q.if_defected.cwiseMax(delta).cwiseMin(1.0 - delta);
  return q;
}

MemoryOneStrategy classic_strategy(Classic which, int n) {
  require(n >= 2, "classic_strategy: need at least two players");
  Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd pd = Eigen::VectorXd::Zero(n);
  switch (which) {
    case Classic::AllC:
      return MemoryOneStrategy(Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(n), 1.0);
    case Classic::AllD:
      return MemoryOneStrategy(pc, pd, 0.0);
    case Classic::Repeat:
      return MemoryOneStrategy(Eigen::VectorXd::Ones(n), pd, 0.5);
    case Classic::GrimTrigger:
      pc(n - 1) = 1.0;
      return MemoryOneStrategy(pc, pd, 1.0);
    case Classic::WinStayLoseShift:
      pc(n - 1) = 1.0;
      pd(n - 1) = 1.0;
      return MemoryOneStrategy(pc, pd, 1.0);
    case Classic::Pavlov:
      pc(n - 1) = 1.0;
      pd(0) = 1.0;
      return MemoryOneStrategy(pc, pd, 1.0);
  }
  throw std::invalid_argument("classic_strategy: unknown strategy");
}

MemoryOneStrategy classic_strategy(std::string_view name, int n) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "allc") return classic_strategy(Classic::AllC, n);
  if (lower == "alld") return classic_strategy(Classic::AllD, n);
  if (lower == "repeat") return classic_strategy(Classic::Repeat, n);
  if (lower == "grim" || lower == "grimtrigger") {
    return classic_strategy(Classic::GrimTrigger, n);
  }
  if (lower == "wsls") return classic_strategy(Classic::WinStayLoseShift, n);
  if (lower == "pavlov") return classic_strategy(Classic::Pavlov, n);
  throw std::invalid_argument("classic_strategy: unknown strategy name '" +
                              std::string(name) + "'");
}

StrategyProfile::StrategyProfile(std::vector<MemoryOneStrategy> strategies_)
    : strategies(std::move(strategies_)) {
  require(!strategies.empty(), "StrategyProfile: empty profile");
  const int n_players = static_cast<int>(strategies.size());
  for (const auto& s : strategies) {
    require(s.n == n_players, "StrategyProfile: strategy size must equal player count");
  }
}

StrategyProfile StrategyProfile::uniform(const MemoryOneStrategy& p, int n) {
  return StrategyProfile(std::vector<MemoryOneStrategy>(static_cast<std::size_t>(n), p));
}

}  // namespace pgg

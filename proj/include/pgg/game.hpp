#ifndef PGG_GAME_HPP
#define PGG_GAME_HPP

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pgg {

enum class Action : int { Defect = 0, Cooperate = 1 };

// One stage's joint action profile, bit-encoded: bit i set means player i
// cooperated, player 0 occupies the least significant bit.
struct Outcome {
  std::uint32_t bits = 0;
  int n = 0;

  Outcome() = default;
  Outcome(std::uint32_t bits, int n);

  Action action_of(int player) const;
  int cooperator_count() const { return std::popcount(bits); }

  static Outcome all_cooperate(int n);
  static Outcome all_defect(int n);
  static Outcome from_string(std::string_view s);  // "ccd" style, player 0 first
  std::string str() const;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// Number of cooperators among player `player`'s opponents.
int opponent_cooperators(const Outcome& o, int player);

// n players each either contribute their unit endowment to a pot or keep it;
// the pot is multiplied by r and split equally. 1 < r < n keeps the dilemma.
struct PublicGoodsGame {
  int n;
  double r;

  PublicGoodsGame(int n, double r);

  double mpcr() const { return r / n; }
  // Per-player payoff when everyone contributes: r - 1.
  double mutual_cooperation_payoff() const { return r - 1.0; }
};

// Stage payoff against k cooperating opponents:
//   cooperate: r(k+1)/n - 1,   defect: rk/n.
double stage_payoff(const PublicGoodsGame& game, Action a, int k);

// Entry i: stage payoff of player i under outcome o.
Eigen::VectorXd outcome_payoffs(const PublicGoodsGame& game, const Outcome& o);

// Conditional cooperation probabilities indexed by own previous action and
// the number of cooperating opponents, plus the stage-1 cooperation
// probability. 2n free components instead of 2^n.
struct MemoryOneStrategy {
  int n = 0;
  Eigen::VectorXd if_cooperated;  // entry k: P(c | own previous c, k opponents cooperated)
  Eigen::VectorXd if_defected;
  double first_move = 0.5;

  MemoryOneStrategy() = default;
  MemoryOneStrategy(Eigen::VectorXd if_cooperated, Eigen::VectorXd if_defected,
                    double first_move);

  double prob(Action own_previous, int k) const;
  bool fully_mixed() const;  // every conditional entry strictly inside (0,1)
};

// Copy with all conditional probabilities clamped into [delta, 1-delta].
// Makes deterministic strategies ergodic for cross-checks.
MemoryOneStrategy perturbed(const MemoryOneStrategy& p, double delta);

// AllC / AllD: unconditional. Repeat: copies own previous action.
// GrimTrigger: cooperates only while every opponent cooperated.
// WinStayLoseShift: cooperates exactly when every opponent cooperated,
// regardless of own action.
// Pavlov: cooperates exactly after unanimous outcomes (everyone cooperated
// or everyone defected); unlike WinStayLoseShift it recovers from mutual
// defection.
enum class Classic { AllC, AllD, Repeat, GrimTrigger, WinStayLoseShift, Pavlov };

MemoryOneStrategy classic_strategy(Classic which, int n);
// Accepts "allc", "alld", "repeat", "grim", "wsls", "pavlov".
MemoryOneStrategy classic_strategy(std::string_view name, int n);

struct StrategyProfile {
  std::vector<MemoryOneStrategy> strategies;

  explicit StrategyProfile(std::vector<MemoryOneStrategy> strategies);
  static StrategyProfile uniform(const MemoryOneStrategy& p, int n);

  int n() const { return static_cast<int>(strategies.size()); }
  const MemoryOneStrategy& operator[](int i) const {
    return strategies[static_cast<std::size_t>(i)];
  }
};

}  // namespace pgg

#endif  // PGG_GAME_HPP

#ifndef PGG_MARKOV_HPP
#define PGG_MARKOV_HPP

#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

#include "pgg/game.hpp"

namespace pgg {

// Dense 2^n x 2^n matrices; beyond this the state space stops being desk-scale.
inline constexpr int kMaxDensePlayers = 20;

struct ErgodicityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strategy probabilities mapped onto the full outcome space: component o is
// P(cooperate | own action in o, cooperating opponents in o) for the given seat.
Eigen::VectorXd lift_strategy(const MemoryOneStrategy& p, int seat, int n);

// Indicator vector "seat cooperated in o": the lift of the Repeat strategy.
Eigen::VectorXd lift_repeat(int seat, int n);

// Joint chain of the profile over the 2^n outcomes. Entry (o, o') is the
// probability that o' follows o; rows sum to one.
Eigen::MatrixXd transition_matrix(const StrategyProfile& profile);

enum class LimitKind { StationaryExact, Cesaro, Empirical };

struct LimitDistribution {
  int n = 0;
  Eigen::VectorXd v;
  LimitKind kind = LimitKind::Cesaro;
  // StationaryExact: ||v^T P - v^T||_inf.  Cesaro: L1 gap between the full
  // and half-horizon averages.  Empirical: 0.
  double diagnostic = 0.0;
};

// Strong connectivity of the positive-entry digraph of P.
bool strongly_connected(const Eigen::MatrixXd& P);

// Unique stationary distribution via a direct linear solve of v^T P = v^T with
// a normalization row, with power iteration as fallback. Requires the
// positive-entry digraph to be strongly connected; otherwise throws
// ErgodicityError (use limit_cesaro for reducible chains).
LimitDistribution stationary_exact(const Eigen::MatrixXd& P, double tol = 1e-12);

// (1/T) sum_{t=1..T} initial^T P^t. The diagnostic reports the L1 distance to
// the half-horizon average, which decays as O(1/T).
LimitDistribution limit_cesaro(const Eigen::MatrixXd& P, const Eigen::VectorXd& initial,
                               long long T);

// Product measure of independent first-move coin flips, one per player.
Eigen::VectorXd first_stage_distribution(const StrategyProfile& profile);

// Outcome frequencies over T simulated stages; stage 1 is drawn from each
// strategy's first move. Deterministic given the seed.
LimitDistribution simulate_empirical(const StrategyProfile& profile, long long T,
                                     std::uint64_t seed);

// Entry i: sum_o v_o * payoff of player i under o.
Eigen::VectorXd expected_payoffs(const PublicGoodsGame& game, const LimitDistribution& v);

enum class PairAction : int { CC = 0, CD = 1, DC = 2, DD = 3 };

// Joint view of players i and j: row = pair action (i's action first),
// column k = number of cooperators among the remaining n-2 players.
struct MarginalDistribution {
  int n = 0;
  int i = 0;
  int j = 1;
  Eigen::Matrix<double, 4, Eigen::Dynamic> u;
};

MarginalDistribution marginalize(const LimitDistribution& v, int i, int j);

// (p - p_repeat) . v for the given seat. Zero (to numerical precision) for
// any limit distribution of a profile holding p at that seat; the identity is
// known as Akin's lemma.
double akin_residual(const MemoryOneStrategy& p, int seat, const LimitDistribution& v);

// pi_j - R_{c,n-1} assembled from the marginal with grouped
// payoff-difference coefficients.
double payoff_gap(const PublicGoodsGame& game, const MarginalDistribution& u);

// Direct route for cross-checks: pi_j recovered from the marginal alone.
double expected_payoff_from_marginal(const PublicGoodsGame& game,
                                     const MarginalDistribution& u);

// Akin's identity rewritten in marginal coordinates, as
//   (1 - p_c[n-2]) u_{cd,n-2} = (p_c[n-1]-1) u_{cc,n-2} + ...
//     + (p_c[k]-1)(u_{cc,k-1}+u_{cd,k}) + p_d[k](u_{dc,k-1}+u_{dd,k}) + ...
// Returns rhs - lhs; zero for genuine limit distributions.
double akin_marginal_residual(const MemoryOneStrategy& p, const MarginalDistribution& u);

}  // namespace pgg

#endif  // PGG_MARKOV_HPP

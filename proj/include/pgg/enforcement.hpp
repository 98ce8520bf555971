#ifndef PGG_ENFORCEMENT_HPP
#define PGG_ENFORCEMENT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "pgg/game.hpp"

namespace pgg {

// Cooperation enforcement is impossible when the per-capita return r/n is
// at most 1/2.
struct InapplicableError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConstraintCheck {
  std::string name;
  double bound = 0.0;  // required bound (or equality target)
  double value = 0.0;  // observed value
  bool satisfied = false;
};

struct EnforcementVerdict {
  bool applicable = false;  // r/n > 1/2
  std::vector<ConstraintCheck> constraints;
  bool overall = false;  // applicable and every constraint satisfied
};

// The two independently checkable necessary conditions for a strategy to be
// cooperation enforcing: if_cooperated[n-2] < 1, and r/n > 1/2.
std::vector<std::pair<std::string, bool>> necessary_conditions(const PublicGoodsGame& game,
                                                               const MemoryOneStrategy& p);

// Strict upper bounds for the if_defected entries, given the cooperation
// probability after n-2 cooperating opponents. With D = R_{d,n-1} - R_{c,n-1}:
//   entry k <= n-2:  (1 - q) (R_{c,n-1} - R_{d,k})   / D
//   entry n-1:       (1 - q) (R_{c,n-1} - R_{c,n-2}) / D
// All entries are strictly positive when r > n/2; throws InapplicableError
// otherwise.
Eigen::VectorXd enforcement_bounds(const PublicGoodsGame& game,
                                   double coop_after_penultimate);

// Strict inequalities are tested with this slack; values exactly at a bound
// fail.
inline constexpr double kStrictSlack = 1e-12;

// Sufficient conditions for a cooperation enforcing strategy: first move 1,
// if_cooperated[n-1] = 1, if_cooperated[n-2] < 1, and every if_defected entry
// strictly below enforcement_bounds. Entries if_cooperated[0..n-3] are
// unconstrained and recorded as vacuously satisfied.
EnforcementVerdict check_enforcing(const PublicGoodsGame& game, const MemoryOneStrategy& p);

// Uniform draw from the region accepted by check_enforcing; deterministic
// given the seed. Throws InapplicableError when r <= n/2.
MemoryOneStrategy sample_enforcing(const PublicGoodsGame& game, std::uint64_t seed);

// An alliance of m players deviating against n-m cooperating outsiders,
// k of the m cooperating. gain = collusive_avg - R_{c,n-1} = (m-k)(n-mr)/(mn).
struct CollusionReport {
  int m = 0;
  int k = 0;
  double collusive_avg = 0.0;
  double gain = 0.0;
};

CollusionReport collusion_gain(const PublicGoodsGame& game, int alliance_size,
                               int cooperators_inside);

// Reports for every alliance size 2 <= m <= n and 0 <= k < m.
std::vector<CollusionReport> collusion_scan(const PublicGoodsGame& game);

// Smallest alliance size m in [2, n] with r < n/m (collusion can profit);
// 0 when no alliance profits.
int min_profitable_alliance(const PublicGoodsGame& game);

void to_json(nlohmann::json& j, const ConstraintCheck& c);
void to_json(nlohmann::json& j, const EnforcementVerdict& v);
void to_json(nlohmann::json& j, const CollusionReport& rep);

}  // namespace pgg

#endif  // PGG_ENFORCEMENT_HPP

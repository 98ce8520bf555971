#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "pgg/game.hpp"

using namespace pgg;

TEST_CASE("outcome encoding and string form") {
  const Outcome o = Outcome::from_string("ccdc");
  CHECK(o.n == 4);
  CHECK(o.bits == 0b1011u);
  CHECK(o.str() == "ccdc");
  CHECK(o.action_of(0) == Action::Cooperate);
  CHECK(o.action_of(2) == Action::Defect);
  CHECK(o.cooperator_count() == 3);
  CHECK(Outcome::all_cooperate(3).bits == 7u);
  CHECK(Outcome::all_defect(3).bits == 0u);
  CHECK_THROWS_AS(Outcome(8u, 3), std::invalid_argument);
  CHECK_THROWS_AS(Outcome::from_string("cxd"), std::invalid_argument);
}

TEST_CASE("opponent cooperators") {
  CHECK(opponent_cooperators(Outcome::from_string("ccdc"), 0) == 2);
  CHECK(opponent_cooperators(Outcome::from_string("ddd"), 1) == 0);
  CHECK(opponent_cooperators(Outcome::from_string("dcc"), 0) == 2);
  CHECK_THROWS_AS(opponent_cooperators(Outcome::from_string("ddd"), 3),
                  std::invalid_argument);
}

TEST_CASE("game construction guards the dilemma regime") {
  CHECK_THROWS_AS(PublicGoodsGame(1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(PublicGoodsGame(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PublicGoodsGame(3, 3.0), std::invalid_argument);
  const PublicGoodsGame g(3, 2.0);
  CHECK(g.mpcr() == doctest::Approx(2.0 / 3.0));
  CHECK(g.mutual_cooperation_payoff() == 1.0);
}

TEST_CASE("stage payoffs") {
  const PublicGoodsGame g(3, 2.0);
  CHECK(stage_payoff(g, Action::Cooperate, 2) == 1.0);
  CHECK(stage_payoff(g, Action::Defect, 0) == 0.0);
  CHECK(stage_payoff(g, Action::Defect, 2) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(stage_payoff(g, Action::Defect, 3), std::invalid_argument);
  CHECK_THROWS_AS(stage_payoff(g, Action::Cooperate, -1), std::invalid_argument);
}

TEST_CASE("mutual cooperation pays best among cooperative states") {
  for (int n = 2; n <= 6; ++n) {
    for (double r = 1.1; r < n; r += 0.1) {
      const PublicGoodsGame g(n, r);
      for (int k = 0; k < n - 1; ++k) {
        CHECK(stage_payoff(g, Action::Cooperate, n - 1) >
              stage_payoff(g, Action::Cooperate, k));
      }
    }
  }
}

TEST_CASE("outcome payoffs") {
  const PublicGoodsGame g(3, 2.0);
  const Eigen::VectorXd ccc = outcome_payoffs(g, Outcome::from_string("ccc"));
  CHECK(ccc.isApproxToConstant(1.0, 1e-15));
  CHECK(outcome_payoffs(g, Outcome::from_string("ddd")).isZero(0.0));
  const Eigen::VectorXd dcc = outcome_payoffs(g, Outcome::from_string("dcc"));
  CHECK(dcc(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(dcc(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(dcc(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(outcome_payoffs(g, Outcome::from_string("cc")), std::invalid_argument);
}

TEST_CASE("free-riding temptation and the enforcement boundary") {
  for (int n = 2; n <= 6; ++n) {
    for (double r = 1.05; r < n; r += 0.05) {
      const PublicGoodsGame g(n, r);
      for (int k = 0; k <= n - 1; ++k) {
        // Withholding the contribution while k opponents cooperate pays
        // R_{d,k} - R_{c,k} = 1 - r/n > 0.
        CHECK(stage_payoff(g, Action::Defect, k) - stage_payoff(g, Action::Cooperate, k) ==
              doctest::Approx(1.0 - r / n).epsilon(1e-12));
      }
      for (int k = 0; k <= n - 2; ++k) {
        // A defector alongside k+1 cooperators keeps the whole endowment edge.
        CHECK(stage_payoff(g, Action::Defect, k + 1) -
                  stage_payoff(g, Action::Cooperate, k) ==
              doctest::Approx(1.0).epsilon(1e-12));
      }
      const bool above = stage_payoff(g, Action::Cooperate, n - 1) >
                         stage_payoff(g, Action::Defect, n - 2);
      CHECK(above == (g.mpcr() > 0.5));
    }
  }
}

TEST_CASE("pot accounting conservation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const double r = 1.0 + (static_cast<double>(n) - 1.0) *
                               std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const PublicGoodsGame g(n, r);
    const std::uint32_t bits = static_cast<std::uint32_t>(rng() & ((1u << n) - 1u));
    const Outcome o(bits, n);
    const double total = outcome_payoffs(g, o).sum();
    const double coop = o.cooperator_count();
    CHECK(total == doctest::Approx(g.r * coop - coop).epsilon(1e-12));
  }
}

TEST_CASE("classic strategies") {
  const auto wsls = classic_strategy(Classic::WinStayLoseShift, 3);
  CHECK(wsls.if_cooperated.isApprox(Eigen::Vector3d(0, 0, 1)));
  CHECK(wsls.if_defected.isApprox(Eigen::Vector3d(0, 0, 1)));
  CHECK(wsls.first_move == 1.0);

  const auto alld = classic_strategy("alld", 4);
  CHECK(alld.if_cooperated.isZero(0.0));
  CHECK(alld.if_defected.isZero(0.0));
  CHECK(alld.first_move == 0.0);

  const auto repeat = classic_strategy(Classic::Repeat, 3);
  CHECK(repeat.if_cooperated.isApproxToConstant(1.0, 0.0));
  CHECK(repeat.if_defected.isZero(0.0));

  const auto grim = classic_strategy("grim", 3);
  CHECK(grim.if_cooperated.isApprox(Eigen::Vector3d(0, 0, 1)));
  CHECK(grim.if_defected.isZero(0.0));
  CHECK(grim.first_move == 1.0);

  const auto pavlov = classic_strategy(Classic::Pavlov, 3);
  CHECK(pavlov.if_cooperated.isApprox(Eigen::Vector3d(0, 0, 1)));
  CHECK(pavlov.if_defected.isApprox(Eigen::Vector3d(1, 0, 0)));
  CHECK(pavlov.first_move == 1.0);

  CHECK(classic_strategy("allc", 2).first_move == 1.0);
  CHECK_THROWS_AS(classic_strategy("tft", 3), std::invalid_argument);
  CHECK_THROWS_AS(classic_strategy(Classic::AllC, 1), std::invalid_argument);
}

TEST_CASE("strategy lookups and validation") {
  const auto wsls = classic_strategy(Classic::WinStayLoseShift, 3);
  CHECK(wsls.prob(Action::Cooperate, 2) == 1.0);
  CHECK(wsls.prob(Action::Cooperate, 0) == 0.0);
  CHECK(wsls.prob(Action::Defect, 2) == 1.0);
  CHECK_THROWS_AS(wsls.prob(Action::Defect, 3), std::invalid_argument);

  CHECK_THROWS_AS(MemoryOneStrategy(Eigen::Vector3d(0, 0, 2), Eigen::Vector3d(0, 0, 0), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(MemoryOneStrategy(Eigen::Vector3d(0, 0, 1), Eigen::Vector2d(0, 0), 1.0),
                  std::invalid_argument);

  CHECK_FALSE(wsls.fully_mixed());
  const auto mixed = perturbed(wsls, 0.05);
  CHECK(mixed.fully_mixed());
  CHECK(mixed.if_cooperated(2) == 0.95);
  CHECK(mixed.if_cooperated(0) == 0.05);
}

TEST_CASE("strategy profiles share the player count") {
  const auto wsls = classic_strategy(Classic::WinStayLoseShift, 3);
  const auto p = StrategyProfile::uniform(wsls, 3);
  CHECK(p.n() == 3);
  std::vector<MemoryOneStrategy> bad{wsls, wsls};
  CHECK_THROWS_AS(StrategyProfile{bad}, std::invalid_argument);
}

#include "pgg/markov.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace pgg {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Eigen::Index dim_of(int n) { return Eigen::Index{1} << n; }

int players_of(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) {
    throw std::invalid_argument("matrix dimension is not a power of two");
  }
  return n;
}

// S_T = sum_{t=1..T} P^t by binary decomposition of T:
//   S_{2a} = S_a + P^a S_a,  S_{2a+1} = S_{2a} + P^{2a+1}.
Eigen::MatrixXd power_sum(const Eigen::MatrixXd& P, long long T) {
  const Eigen::Index d = P.rows();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(d, d);  // P^a
  int highest = 63;
  while (highest > 0 && ((T >> highest) & 1) == 0) --highest;
  for (int b = highest; b >= 0; --b) {
    S += A * S;
    A = A * A;
    if ((T >> b) & 1) {
      A = A * P;
      S += A;
    }
  }
  return S;
}

Eigen::VectorXd cesaro_average_iterative(const Eigen::MatrixXd& P,
                                         const Eigen::VectorXd& initial, long long T,
                                         Eigen::VectorXd* half_out) {
  Eigen::RowVectorXd v = initial.transpose();
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(P.cols());
  const long long half = T / 2;
  for (long long t = 1; t <= T; ++t) {
    v = v * P;
    acc += v;
    if (half_out && t == half && half > 0) *half_out = (acc / static_cast<double>(half)).transpose();
  }
  return (acc / static_cast<double>(T)).transpose();
}

}  // namespace

Eigen::VectorXd lift_strategy(const MemoryOneStrategy& p, int seat, int n) {
  require(p.n == n, "lift_strategy: strategy size must equal player count");
  require(seat >= 0 && seat < n, "lift_strategy: seat out of range");
  const Eigen::Index d = dim_of(n);
  Eigen::VectorXd lifted(d);
  for (Eigen::Index o = 0; o < d; ++o) {
    const Outcome outcome(static_cast<std::uint32_t>(o), n);
    lifted(o) = p.prob(outcome.action_of(seat), opponent_cooperators(outcome, seat));
  }
  return lifted;
}

Eigen::VectorXd lift_repeat(int seat, int n) {
  require(seat >= 0 && seat < n, "lift_repeat: seat out of range");
  const Eigen::Index d = dim_of(n);
  Eigen::VectorXd lifted(d);
  for (Eigen::Index o = 0; o < d; ++o) {
    lifted(o) = (o >> seat) & 1 ? 1.0 : 0.0;
  }
  return lifted;
}

Eigen::MatrixXd transition_matrix(const StrategyProfile& profile) {
  const int n = profile.n();
  if (n > kMaxDensePlayers) {
    throw std::length_error("transition_matrix: 2^n state space exceeds the dense cap");
  }
  const Eigen::Index d = dim_of(n);
  // coop(i, o): probability that player i cooperates after outcome o.
  Eigen::MatrixXd coop(n, d);
  for (int i = 0; i < n; ++i) {
    coop.row(i) = lift_strategy(profile[i], i, n).transpose();
  }
  Eigen::MatrixXd P(d, d);
  for (Eigen::Index from = 0; from < d; ++from) {
    for (Eigen::Index to = 0; to < d; ++to) {
      double prob = 1.0;
      for (int i = 0; i < n; ++i) {
        const double q = coop(i, from);
        prob *= ((to >> i) & 1) ? q : 1.0 - q;
      }
      P(from, to) = prob;
    }
  }
  return P;
}

bool strongly_connected(const Eigen::MatrixXd& P) {
  const Eigen::Index d = P.rows();
  require(P.cols() == d && d >= 1, "strongly_connected: matrix must be square");
  auto reaches_all = [d](auto edge) {
    std::vector<char> seen(static_cast<std::size_t>(d), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index w = 0; w < d; ++w) {
        if (!seen[static_cast<std::size_t>(w)] && edge(u, w)) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == d;
  };
  return reaches_all([&P](Eigen::Index u, Eigen::Index w) { return P(u, w) > 0.0; }) &&
         reaches_all([&P](Eigen::Index u, Eigen::Index w) { return P(w, u) > 0.0; });
}

LimitDistribution stationary_exact(const Eigen::MatrixXd& P, double tol) {
  const Eigen::Index d = P.rows();
  const int n = players_of(d);
  if (!strongly_connected(P)) {
    throw ErgodicityError(
        "stationary_exact: chain is not ergodic (positive-entry digraph is not "
        "strongly connected); use limit_cesaro with an initial distribution");
  }

  // (P^T - I) v = 0 with the last equation replaced by sum(v) = 1.
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(d, d);
  A.row(d - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  b(d - 1) = 1.0;

  auto residual = [&P](const Eigen::VectorXd& v) {
    return (P.transpose() * v - v).cwiseAbs().maxCoeff();
  };
  auto cleanup = [](Eigen::VectorXd v) {
    v = v.cwiseMax(0.0);
    v /= v.sum();
    return v;
  };

  Eigen::VectorXd v = cleanup(A.partialPivLu().solve(b));
  if (!(residual(v) < tol)) {
    v = cleanup(A.colPivHouseholderQr().solve(b));
  }
  if (!(residual(v) < tol)) {
    // Fallback: power iteration from the best candidate so far.
    for (long long it = 0; it < 2'000'000; ++it) {
      v = cleanup(P.transpose() * v);
      if (residual(v) < tol) break;
    }
  }
  const double res = residual(v);
  if (!(res < tol)) {
    throw std::runtime_error("stationary_exact: solver failed to reach tolerance");
  }
  return LimitDistribution{n, std::move(v), LimitKind::StationaryExact, res};
}

LimitDistribution limit_cesaro(const Eigen::MatrixXd& P, const Eigen::VectorXd& initial,
                               long long T) {
  const Eigen::Index d = P.rows();
  const int n = players_of(d);
  require(T >= 1, "limit_cesaro: horizon must be positive");
  require(initial.size() == d, "limit_cesaro: initial distribution size mismatch");
  require((initial.array() >= -1e-12).all() && std::abs(initial.sum() - 1.0) < 1e-9,
          "limit_cesaro: initial must be a probability distribution");

  Eigen::VectorXd avg;
  Eigen::VectorXd half_avg;
  const long long half = T / 2;
  if (d <= 1024) {
    // Matrix power sums make the horizon cost logarithmic.
    const Eigen::MatrixXd S_half = half > 0 ? power_sum(P, half) : Eigen::MatrixXd();
    const Eigen::MatrixXd S_full = power_sum(P, T);
    avg = (initial.transpose() * S_full).transpose() / static_cast<double>(T);
    if (half > 0) {
      half_avg = (initial.transpose() * S_half).transpose() / static_cast<double>(half);
    }
  } else {
    Eigen::VectorXd half_tmp;
    avg = cesaro_average_iterative(P, initial, T, half > 0 ? &half_tmp : nullptr);
    half_avg = half_tmp;
  }
  const double diag = half > 0 ? (avg - half_avg).cwiseAbs().sum() : 0.0;
  return LimitDistribution{n, std::move(avg), LimitKind::Cesaro, diag};
}

Eigen::VectorXd first_stage_distribution(const StrategyProfile& profile) {
  const int n = profile.n();
  const Eigen::Index d = dim_of(n);
  Eigen::VectorXd dist(d);
  for (Eigen::Index o = 0; o < d; ++o) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      const double f = profile[i].first_move;
      prob *= ((o >> i) & 1) ? f : 1.0 - f;
    }
    dist(o) = prob;
  }
  return dist;
}

LimitDistribution simulate_empirical(const StrategyProfile& profile, long long T,
                                     std::uint64_t seed) {
  require(T >= 1, "simulate_empirical: horizon must be positive");
  const int n = profile.n();
  const Eigen::Index d = dim_of(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(d);
  std::uint32_t prev = 0;
  for (int i = 0; i < n; ++i) {
    if (unit(rng) < profile[i].first_move) prev |= std::uint32_t{1} << i;
  }
  counts(prev) += 1.0;
  for (long long t = 2; t <= T; ++t) {
    const Outcome prev_outcome(prev, n);
    std::uint32_t next = 0;
    for (int i = 0; i < n; ++i) {
      const double q =
          profile[i].prob(prev_outcome.action_of(i), opponent_cooperators(prev_outcome, i));
      if (unit(rng) < q) next |= std::uint32_t{1} << i;
    }
    counts(next) += 1.0;
    prev = next;
  }
  counts /= static_cast<double>(T);
  return LimitDistribution{n, std::move(counts), LimitKind::Empirical, 0.0};
}

Eigen::VectorXd expected_payoffs(const PublicGoodsGame& game, const LimitDistribution& v) {
  require(v.n == game.n, "expected_payoffs: distribution/game size mismatch");
  const Eigen::Index d = dim_of(game.n);
  require(v.v.size() == d, "expected_payoffs: distribution size mismatch");
  Eigen::VectorXd pay = Eigen::VectorXd::Zero(game.n);
  for (Eigen::Index o = 0; o < d; ++o) {
    if (v.v(o) == 0.0) continue;
    pay += v.v(o) * outcome_payoffs(game, Outcome(static_cast<std::uint32_t>(o), game.n));
  }
  return pay;
}

MarginalDistribution marginalize(const LimitDistribution& v, int i, int j) {
  const int n = v.n;
  require(i != j, "marginalize: players must be distinct");
  require(i >= 0 && i < n && j >= 0 && j < n, "marginalize: player index out of range");
  MarginalDistribution m{n, i, j, Eigen::Matrix<double, 4, Eigen::Dynamic>::Zero(4, n - 1)};
  const Eigen::Index d = dim_of(n);
  for (Eigen::Index o = 0; o < d; ++o) {
    const bool ci = (o >> i) & 1;
    const bool cj = (o >> j) & 1;
    const int row = ci ? (cj ? 0 : 1) : (cj ? 2 : 3);  // CC, CD, DC, DD
    const int others = std::popcount(static_cast<std::uint32_t>(o)) - int(ci) - int(cj);
    m.u(row, others) += v.v(o);
  }
  return m;
}

double akin_residual(const MemoryOneStrategy& p, int seat, const LimitDistribution& v) {
  require(p.n == v.n, "akin_residual: strategy/distribution size mismatch");
  return (lift_strategy(p, seat, v.n) - lift_repeat(seat, v.n)).dot(v.v);
}

double payoff_gap(const PublicGoodsGame& game, const MarginalDistribution& u) {
  require(u.n == game.n, "payoff_gap: marginal/game size mismatch");
  const int n = game.n;
  const double r_star = stage_payoff(game, Action::Cooperate, n - 1);
  auto cc = [&u, n](int k) { return k >= 0 && k <= n - 2 ? u.u(0, k) : 0.0; };
  auto cd = [&u, n](int k) { return k >= 0 && k <= n - 2 ? u.u(1, k) : 0.0; };
  auto dc = [&u, n](int k) { return k >= 0 && k <= n - 2 ? u.u(2, k) : 0.0; };
  auto dd = [&u, n](int k) { return k >= 0 && k <= n - 2 ? u.u(3, k) : 0.0; };
  double gap = 0.0;
  // j cooperates with m cooperating opponents: weight u_{cc,m-1} + u_{dc,m}.
  for (int m = 0; m <= n - 2; ++m) {
    gap += (stage_payoff(game, Action::Cooperate, m) - r_star) * (cc(m - 1) + dc(m));
  }
  // j defects with m cooperating opponents: weight u_{cd,m-1} + u_{dd,m}.
  for (int m = 0; m <= n - 1; ++m) {
    gap += (stage_payoff(game, Action::Defect, m) - r_star) * (cd(m - 1) + dd(m));
  }
  return gap;
}

double expected_payoff_from_marginal(const PublicGoodsGame& game,
                                     const MarginalDistribution& u) {
  require(u.n == game.n, "expected_payoff_from_marginal: marginal/game size mismatch");
  const int n = game.n;
  double pay = 0.0;
  for (int k = 0; k <= n - 2; ++k) {
    pay += u.u(0, k) * stage_payoff(game, Action::Cooperate, k + 1);  // cc: i also cooperates
    pay += u.u(1, k) * stage_payoff(game, Action::Defect, k + 1);     // cd
    pay += u.u(2, k) * stage_payoff(game, Action::Cooperate, k);      // dc
    pay += u.u(3, k) * stage_payoff(game, Action::Defect, k);         // dd
  }
  return pay;
}

double akin_marginal_residual(const MemoryOneStrategy& p, const MarginalDistribution& u) {
  require(p.n == u.n, "akin_marginal_residual: strategy/marginal size mismatch");
  const int n = p.n;
  const auto& pc = p.if_cooperated;
  const auto& pd = p.if_defected;
  const double lhs = (1.0 - pc(n - 2)) * u.u(1, n - 2);
  double rhs = (pc(n - 1) - 1.0) * u.u(0, n - 2);
  for (int k = 0; k <= n - 3; ++k) {
    rhs += (pc(k + 1) - 1.0) * u.u(0, k);
    rhs += (pc(k) - 1.0) * u.u(1, k);
  }
  for (int k = 0; k <= n - 2; ++k) {
    rhs += pd(k + 1) * u.u(2, k);
    rhs += pd(k) * u.u(3, k);
  }
  return rhs - lhs;
}

}  // namespace pgg

#include <gtest/gtest.h>

#include <random>

#include "nashseek/game.hpp"
#include "oracles.hpp"

using namespace nashseek;

namespace {

const Vector kExample2Nash{
    {-1.2304, -0.5, -0.5, -0.5, -0.5, -0.5, -0.5203, -0.5, -0.6217, -0.5}};

Game single_player(std::function<double(const Vector&)> f,
                   std::function<Vector(const Vector&)> grad, double m) {
  Game g;
  g.name = "toy";
  g.n_players = 1;
  g.dim = 1;
  g.objectives = {std::move(f)};
  g.partial_grads = {std::move(grad)};
  g.monotonicity = m;
  return g;
}

}  // namespace

TEST(PartialGrad, Example1) {
  const Game g = build_sensor_network_game();
  EXPECT_EQ(partial_grad(g, 0, Vector::Constant(10, -0.5)), Vector::Zero(2));
  EXPECT_EQ(partial_grad(g, 4, Vector::Zero(10)), (Vector{{5.0, 5.0}}));
}

TEST(PartialGrad, Example2AtReportedEquilibrium) {
  const Game g = build_nonquadratic_example();
  const double x11 = -1.2304;
  const double hand = 2 * x11 + 1 + 10 * std::exp(x11) + 2 * (x11 + 0.5);
  EXPECT_LT(std::abs(hand), 5e-4);
  EXPECT_NEAR(partial_grad(g, 0, kExample2Nash)(0), hand, 1e-12);
}

TEST(PartialGrad, RejectsBadInput) {
  const Game g = build_sensor_network_game();
  EXPECT_THROW(partial_grad(g, 5, Vector::Zero(10)), std::invalid_argument);
  EXPECT_THROW(partial_grad(g, -1, Vector::Zero(10)), std::invalid_argument);
  EXPECT_THROW(partial_grad(g, 0, Vector::Zero(9)), std::invalid_argument);
}

TEST(PseudoGradient, Examples) {
  const Game g1 = build_sensor_network_game();
  EXPECT_EQ(pseudo_gradient(g1, Vector::Constant(10, -0.5)), Vector::Zero(10));
  EXPECT_LT(pseudo_gradient(build_nonquadratic_example(), kExample2Nash).lpNorm<Eigen::Infinity>(),
            5e-4);
  std::mt19937 rng(3);
  const Vector v = oracle::random_point(10, -3, 3, rng);
  const Vector stacked = pseudo_gradient(g1, v);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(stacked.segment(2 * i, 2), partial_grad(g1, i, v));
}

TEST(Nonquadratic, OnlyPlayerOneChanges) {
  const Game q = build_sensor_network_game();
  const Game nq = build_nonquadratic_example();
  EXPECT_EQ(partial_grad(nq, 0, Vector::Zero(10))(0), 11.0);
  std::mt19937 rng(8);
  const Vector v = oracle::random_point(10, -2, 2, rng);
  for (int i = 1; i < 5; ++i) EXPECT_EQ(partial_grad(nq, i, v), partial_grad(q, i, v));
  EXPECT_NEAR(nq.objectives[0](v) - q.objectives[0](v), 10.0 * std::exp(v(0)), 1e-9);
  EXPECT_FALSE(nq.connectivity.has_value());
}

TEST(SolveNash, Example1) {
  const auto sol = solve_nash(build_sensor_network_game(), Vector::Zero(10));
  EXPECT_LE((sol.x - Vector::Constant(10, -0.5)).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(SolveNash, Example2MatchesReportedPoint) {
  const auto sol = solve_nash(build_nonquadratic_example(), Vector::Zero(10));
  EXPECT_LE((sol.x - kExample2Nash).lpNorm<Eigen::Infinity>(), 1e-3);
}

TEST(SolveNash, Example2MatchesNewtonOracle) {
  const Game g = build_nonquadratic_example();
  const Vector newton =
      oracle::newton([&](const Vector& x) { return pseudo_gradient(g, x); }, Vector::Zero(10));
  const auto sol = solve_nash(g, Vector::Zero(10));
  EXPECT_LE((sol.x - newton).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(SolveNash, SinglePlayerQuadratic) {
  const Game g = single_player([](const Vector& x) { return x(0) * x(0); },
                               [](const Vector& x) { return Vector{{2.0 * x(0)}}; }, 2.0);
  EXPECT_NEAR(solve_nash(g, Vector{{7.0}}).x(0), 0.0, 1e-10);
}

TEST(SolveNash, FixedPoint) {
  for (const Game& g : {build_sensor_network_game(), build_nonquadratic_example()}) {
    const auto sol = solve_nash(g, Vector::Constant(10, 3.0));
    const auto again = solve_nash(g, sol.x);
    EXPECT_EQ(again.x, sol.x);
    EXPECT_EQ(again.iterations, 0);
  }
}

TEST(SolveNash, ReportsNonConvergence) {
  const Game g = build_sensor_network_game();
  try {
    solve_nash(g, Vector::Constant(10, 5.0), 1e-10, 1);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 1e-10);
  }
}

TEST(BuildConnectivityGame, DecoupledGameSolvesEachPlayer) {
  ConnectivityGameSpec s = sensor_network_spec();
  s.coupling.setZero();
  const Game g = build_connectivity_game(s);
  const auto sol = solve_nash(g, Vector::Zero(10));
  for (int i = 0; i < 5; ++i) {
    const Vector expect = s.r_self[i].ldlt().solve(-0.5 * s.r_lin[i]);
    EXPECT_LE((sol.x.segment(2 * i, 2) - expect).lpNorm<Eigen::Infinity>(), 1e-9);
  }
}

TEST(BuildConnectivityGame, SymmetricPairAtOrigin) {
  ConnectivityGameSpec s;
  s.dim = 2;
  s.r_self = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  s.r_lin = {Vector::Zero(2), Vector::Zero(2)};
  s.b = {0.0, 0.0};
  s.coupling = Matrix{{0.0, 1.0}, {1.0, 0.0}};
  const auto sol = solve_nash(build_connectivity_game(s), Vector::Constant(4, 2.0));
  EXPECT_LE(sol.x.lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(BuildConnectivityGame, Example1NashAndMonotone) {
  const Game g = build_sensor_network_game();
  EXPECT_GT(g.monotonicity, 0.0);
  ASSERT_TRUE(g.connectivity.has_value());
  const Matrix r = connectivity_jacobian(*g.connectivity);
  const Vector direct = r.fullPivLu().solve(-pseudo_gradient(g, Vector::Zero(10)));
  EXPECT_LE((direct - Vector::Constant(10, -0.5)).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(BuildConnectivityGame, RejectsInvalidSpecs) {
  ConnectivityGameSpec s = sensor_network_spec();
  s.r_self[0] = Matrix{{1.0, 2.0}, {2.0, 1.0}};
  EXPECT_THROW(build_connectivity_game(s), std::invalid_argument);
  s = sensor_network_spec();
  s.r_self[1] = Matrix{{1.0, 0.5}, {0.0, 1.0}};
  EXPECT_THROW(build_connectivity_game(s), std::invalid_argument);
  s = sensor_network_spec();
  s.coupling(0, 3) = -1.0;
  EXPECT_THROW(build_connectivity_game(s), std::invalid_argument);
  s = sensor_network_spec();
  s.coupling(2, 2) = 1.0;
  EXPECT_THROW(build_connectivity_game(s), std::invalid_argument);
  s = sensor_network_spec();
  s.r_lin.pop_back();
  EXPECT_THROW(build_connectivity_game(s), std::invalid_argument);
}

// Analytic partial gradients vs central differences, |fd - a| / max(1, |a|).
TEST(GameProperty, GradientsMatchFiniteDifferences) {
  std::mt19937 rng(2024);
  for (const Game& g : {build_sensor_network_game(), build_nonquadratic_example()}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector v = oracle::random_point(g.joint_size(), -10, 10, rng);
      for (int i = 0; i < g.n_players; ++i) {
        const Vector a = partial_grad(g, i, v);
        Vector fd(g.dim);
        for (int k = 0; k < g.dim; ++k)
          fd(k) = oracle::central_diff(g.objectives[i], v, i * g.dim + k, 1e-6);
        EXPECT_LE(oracle::relative_error(fd, a), 1e-6) << g.name << " player " << i;
      }
    }
  }
}

TEST(GameProperty, ConnectivityPseudoGradientIsAffine) {
  const Game g = build_sensor_network_game();
  const Matrix m = connectivity_jacobian(*g.connectivity);
  std::mt19937 rng(17);
  for (int pair = 0; pair < 3; ++pair) {
    const Vector x = oracle::random_point(10, -10, 10, rng);
    const Vector z = oracle::random_point(10, -10, 10, rng);
    const Vector lhs = pseudo_gradient(g, x) - pseudo_gradient(g, z);
    EXPECT_LE((lhs - m * (x - z)).lpNorm<Eigen::Infinity>(), 1e-11 * (x - z).norm() + 1e-12);
  }
}

#include <doctest.h>

#include "ltisid/simulate.hpp"
#include "test_helpers.hpp"

using namespace ltisid;
using ltisid::testing::random_stable_system;

TEST_SUITE_BEGIN("simulate");

TEST_CASE("degenerate control gives the zero trajectory") {
  const StateSpace sys(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2),
                       Eigen::MatrixXd::Identity(2, 2));
  const EnvironmentSpec env(0, Eigen::VectorXd::Zero(2));
  const Trajectory traj = simulate(sys, env, 20, 0.0, 42);
  CHECK(traj.u.norm() == 0.0);
  CHECK(traj.x.norm() == 0.0);
  CHECK(traj.y.norm() == 0.0);
}

TEST_CASE("one step from the origin lands on B u_0") {
  Rng rng(1);
  const StateSpace sys = random_stable_system(rng, 3, 2, 3);
  const EnvironmentSpec env(0, Eigen::VectorXd::Constant(2, 1.0));
  const Trajectory traj = simulate(sys, env, 1, 0.0, 7);
  const Eigen::VectorXd expected = sys.B * traj.u.row(0).transpose();
  CHECK((traj.x.row(1).transpose() - expected).norm() < 1e-15);
}

TEST_CASE("recorded states satisfy the recursion exactly") {
  Rng rng(2);
  const StateSpace sys = random_stable_system(rng, 3, 2, 2);
  const EnvironmentSpec env(0, (Eigen::VectorXd(2) << 0.5, 2.0).finished(),
                            (Eigen::VectorXd(2) << 0.3, -0.1).finished());
  const Trajectory traj = simulate(sys, env, 50, 0.0, 9);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd next =
        sys.A * traj.x.row(t).transpose() + sys.B * traj.u.row(t).transpose();
    CHECK((traj.x.row(t + 1).transpose() - next).norm() <= 1e-13);
    CHECK((traj.y.row(t) - traj.x.row(t) * sys.C.transpose()).norm() <= 1e-13);
  }
}

TEST_CASE("long-run output covariance approaches the Lyapunov fixed point") {
  Rng rng(3);
  Eigen::MatrixXd a = ltisid::testing::random_matrix(rng, 2, 2);
  a *= 0.7 / Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().cwiseAbs().maxCoeff();
  const StateSpace sys(a, ltisid::testing::random_matrix(rng, 2, 2),
                       Eigen::MatrixXd::Identity(2, 2));
  const Eigen::VectorXd variances = (Eigen::VectorXd(2) << 0.8, 1.3).finished();

  // Independent oracle: iterate Sigma <- A Sigma A^T + B Sigma_u B^T.
  const Eigen::MatrixXd injected = sys.B * variances.asDiagonal() * sys.B.transpose();
  Eigen::MatrixXd stationary = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < 2000; ++i) stationary = sys.A * stationary * sys.A.transpose() + injected;

  const int T = 10000;
  const Trajectory traj = simulate(sys, EnvironmentSpec(0, variances), T, 0.0, 11);
  const int burn_in = 100;
  const Eigen::MatrixXd tail = traj.y.bottomRows(T + 1 - burn_in);
  const Eigen::MatrixXd centered = tail.rowwise() - tail.colwise().mean();
  const Eigen::MatrixXd empirical =
      centered.transpose() * centered / static_cast<double>(tail.rows() - 1);
  CHECK((empirical - stationary).norm() / stationary.norm() < 0.05);
}

TEST_CASE("bit-identical trajectories for identical seeds") {
  Rng rng(4);
  const StateSpace sys = random_stable_system(rng, 2, 2, 2);
  const EnvironmentSpec env(0, Eigen::VectorXd::Constant(2, 1.0));
  const Trajectory a = simulate(sys, env, 100, 0.01, 123);
  const Trajectory b = simulate(sys, env, 100, 0.01, 123);
  CHECK((a.u.array() == b.u.array()).all());
  CHECK((a.x.array() == b.x.array()).all());
  CHECK((a.y.array() == b.y.array()).all());
  const Trajectory c = simulate(sys, env, 100, 0.01, 124);
  CHECK_FALSE((a.u.array() == c.u.array()).all());
}

TEST_CASE("controls do not depend on the observation noise level") {
  Rng rng(5);
  const StateSpace sys = random_stable_system(rng, 2, 2, 2);
  const EnvironmentSpec env(0, Eigen::VectorXd::Constant(2, 1.0));
  const Trajectory clean = simulate(sys, env, 50, 0.0, 77);
  const Trajectory noisy = simulate(sys, env, 50, 0.5, 77);
  CHECK((clean.u.array() == noisy.u.array()).all());
  CHECK((clean.x.array() == noisy.x.array()).all());
  CHECK_FALSE((clean.y.array() == noisy.y.array()).all());
}

TEST_CASE("dimension and argument errors") {
  Rng rng(6);
  const StateSpace sys = random_stable_system(rng, 2, 2, 2);
  CHECK_THROWS_AS(simulate(sys, EnvironmentSpec(0, Eigen::VectorXd::Ones(3)), 10, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(sys, EnvironmentSpec(0, Eigen::VectorXd::Ones(2)), 0, 0.0, 1),
                  std::invalid_argument);
}

TEST_SUITE_END();

#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>

#include "ltisid/markov.hpp"
#include "ltisid/metrics.hpp"
#include "ltisid/state_space.hpp"
#include "test_helpers.hpp"

using namespace ltisid;
using ltisid::testing::random_conditioned;
using ltisid::testing::random_matrix;
using ltisid::testing::random_orthogonal;
using ltisid::testing::random_stable_system;

TEST_SUITE_BEGIN("lti_core");

TEST_CASE("validate_system on trivial and hand-computed systems") {
  SUBCASE("zero A with identity B, C") {
    const StateSpace sys(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2),
                         Eigen::MatrixXd::Identity(2, 2));
    const SystemReport report = validate_system(sys);
    CHECK(report.spectral_radius == doctest::Approx(0.0));
    CHECK(report.is_stable);
    CHECK(report.is_controllable);
    CHECK(report.is_observable);
  }
  SUBCASE("diagonal A cannot spread a single-channel input") {
    // Hand oracle: ctrb = [B, AB] = [[1, 0.5], [0, 0]], rank 1; obsv analogous.
    Eigen::MatrixXd a(2, 2);
    a << 0.5, 0.0, 0.0, 0.5;
    Eigen::MatrixXd b(2, 1);
    b << 1.0, 0.0;
    Eigen::MatrixXd c(1, 2);
    c << 1.0, 0.0;
    const SystemReport report = validate_system(StateSpace(a, b, c));
    CHECK(report.controllability_rank == 1);
    CHECK(report.observability_rank == 1);
    CHECK_FALSE(report.is_controllable);
    CHECK_FALSE(report.is_observable);
    CHECK(report.is_stable);
  }
  SUBCASE("non-square A is rejected") {
    StateSpace sys;
    sys.A = Eigen::MatrixXd::Zero(2, 3);
    sys.B = Eigen::MatrixXd::Zero(2, 1);
    sys.C = Eigen::MatrixXd::Zero(1, 2);
    CHECK_THROWS_AS(validate_system(sys), std::invalid_argument);
  }
}

TEST_CASE("matrix_exp against closed forms") {
  SUBCASE("zero matrix") {
    CHECK(matrix_exp(Eigen::MatrixXd::Zero(3, 3)).isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-15));
  }
  SUBCASE("rotation generator") {
    const double theta = 0.7;
    Eigen::MatrixXd g(2, 2);
    g << 0.0, -theta, theta, 0.0;
    Eigen::MatrixXd expected(2, 2);
    expected << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    CHECK((matrix_exp(g) - expected).norm() < 1e-14);
  }
  SUBCASE("nilpotent") {
    Eigen::MatrixXd n(2, 2);
    n << 0.0, 1.0, 0.0, 0.0;
    Eigen::MatrixXd expected(2, 2);
    expected << 1.0, 1.0, 0.0, 1.0;
    CHECK((matrix_exp(n) - expected).norm() < 1e-14);
  }
  SUBCASE("symmetric via eigendecomposition oracle") {
    Rng rng(7);
    const Eigen::MatrixXd g = random_matrix(rng, 4, 4);
    const Eigen::MatrixXd s = 0.5 * (g + g.transpose()) * 3.0;  // norm above the scaling threshold
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const Eigen::MatrixXd expected = es.eigenvectors() *
                                     es.eigenvalues().array().exp().matrix().asDiagonal() *
                                     es.eigenvectors().transpose();
    CHECK((matrix_exp(s) - expected).norm() / expected.norm() < 1e-13);
  }
}

TEST_CASE("discretize") {
  SUBCASE("zoh of A_c = 0 integrates B exactly") {
    const ContinuousStateSpace csys(Eigen::MatrixXd::Zero(2, 2),
                                    (Eigen::MatrixXd(2, 1) << 1.0, 2.0).finished(),
                                    Eigen::MatrixXd::Identity(2, 2));
    const StateSpace sys = discretize(csys, 0.25, DiscretizationMethod::kZeroOrderHold);
    CHECK(sys.A.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-14));
    CHECK(sys.B.isApprox(csys.B * 0.25, 1e-14));
    CHECK(sys.C.isApprox(csys.C));
  }
  SUBCASE("scalar zoh matches the scalar exponential") {
    const ContinuousStateSpace csys((Eigen::MatrixXd(1, 1) << -2.0).finished(),
                                    Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1));
    const StateSpace sys = discretize(csys, 0.1, DiscretizationMethod::kZeroOrderHold);
    CHECK(sys.A(0, 0) == doctest::Approx(0.8187307530779818).epsilon(1e-12));
    // B = a^{-1}(e^{a dt} - 1) b
    CHECK(sys.B(0, 0) == doctest::Approx((std::exp(-0.2) - 1.0) / -2.0).epsilon(1e-12));
  }
  SUBCASE("forward Euler") {
    const ContinuousStateSpace csys((Eigen::MatrixXd(1, 1) << -1.0).finished(),
                                    Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1));
    const StateSpace sys = discretize(csys, 3e-3, DiscretizationMethod::kForwardEuler);
    CHECK(sys.A(0, 0) == doctest::Approx(0.997).epsilon(1e-15));
    CHECK(sys.B(0, 0) == doctest::Approx(3e-3).epsilon(1e-15));
  }
  SUBCASE("zoh with singular A_c (integral form)") {
    // A_c = [[0, 1], [0, 0]]: exp(A_c t) = [[1, t], [0, 1]],
    // integral_0^dt exp(A_c s) ds = [[dt, dt^2/2], [0, dt]].
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 0.0, 0.0;
    Eigen::MatrixXd b(2, 1);
    b << 0.0, 1.0;
    const double dt = 0.5;
    const StateSpace sys =
        discretize(ContinuousStateSpace(a, b, Eigen::MatrixXd::Identity(2, 2)), dt,
                   DiscretizationMethod::kZeroOrderHold);
    CHECK(sys.A(0, 1) == doctest::Approx(dt).epsilon(1e-14));
    CHECK(sys.B(0, 0) == doctest::Approx(dt * dt / 2.0).epsilon(1e-14));
    CHECK(sys.B(1, 0) == doctest::Approx(dt).epsilon(1e-14));
  }
  SUBCASE("nonpositive dt rejected") {
    const ContinuousStateSpace csys(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1),
                                    Eigen::MatrixXd::Ones(1, 1));
    CHECK_THROWS_AS(discretize(csys, 0.0, DiscretizationMethod::kZeroOrderHold),
                    std::invalid_argument);
  }
}

TEST_CASE("markov_params") {
  SUBCASE("A = 0 kills all blocks past CB") {
    Rng rng(3);
    const Eigen::MatrixXd b = random_matrix(rng, 2, 2);
    const Eigen::MatrixXd c = random_matrix(rng, 2, 2);
    const MarkovParams mp = markov_params(StateSpace(Eigen::MatrixXd::Zero(2, 2), b, c), 5);
    CHECK(mp.has_identity_block);
    CHECK(mp.block(0).isIdentity(1e-15));
    CHECK(mp.block(1).isApprox(c * b, 1e-14));
    for (int k = 2; k < 5; ++k) CHECK(mp.block(k).norm() == doctest::Approx(0.0));
  }
  SUBCASE("nilpotent hand computation") {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 0.0, 0.0;
    const MarkovParams mp =
        markov_params(StateSpace(a, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)), 3);
    CHECK(mp.block(0).isIdentity(1e-15));
    CHECK(mp.block(1).isIdentity(1e-15));
    CHECK(mp.block(2).isApprox(a, 1e-15));
  }
  SUBCASE("identity block omitted for rectangular systems") {
    Rng rng(4);
    const StateSpace sys = random_stable_system(rng, 3, 1, 2);
    const MarkovParams mp = markov_params(sys, 4);
    CHECK_FALSE(mp.has_identity_block);
    CHECK(mp.blocks.size() == 3);
    CHECK_THROWS_AS(mp.block(0), std::logic_error);
    CHECK(mp.block(1).isApprox(sys.C * sys.B, 1e-14));
  }
  SUBCASE("invariance under similarity transform") {
    Rng rng(5);
    const StateSpace sys = random_stable_system(rng, 4, 4, 4);
    const Eigen::MatrixXd p = random_conditioned(rng, 4, 8.0);
    const StateSpace transformed = similarity_transform(sys, p);
    const MarkovParams mp1 = markov_params(sys, 6);
    const MarkovParams mp2 = markov_params(transformed, 6);
    for (int k = 1; k < 6; ++k) {
      CHECK((mp1.block(k) - mp2.block(k)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("transfer_function") {
  SUBCASE("A = 0 gives CB / z") {
    Rng rng(6);
    const Eigen::MatrixXd b = random_matrix(rng, 2, 2);
    const Eigen::MatrixXd c = random_matrix(rng, 2, 2);
    const StateSpace sys(Eigen::MatrixXd::Zero(2, 2), b, c);
    const std::complex<double> z(1.5, -0.5);
    const Eigen::MatrixXcd h = transfer_function(sys, z);
    CHECK((h - (c * b).cast<std::complex<double>>() / z).norm() < 1e-14);
  }
  SUBCASE("scalar resolvent") {
    const StateSpace sys((Eigen::MatrixXd(1, 1) << 0.5).finished(), Eigen::MatrixXd::Ones(1, 1),
                         Eigen::MatrixXd::Ones(1, 1));
    const Eigen::MatrixXcd h = transfer_function(sys, {2.0, 0.0});
    CHECK(h(0, 0).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(h(0, 0).imag() == doctest::Approx(0.0));
  }
  SUBCASE("pole is reported") {
    const StateSpace sys((Eigen::MatrixXd(1, 1) << 0.5).finished(), Eigen::MatrixXd::Ones(1, 1),
                         Eigen::MatrixXd::Ones(1, 1));
    bool threw = false;
    try {
      transfer_function(sys, {0.5, 0.0});
    } catch (const std::runtime_error& e) {
      threw = true;
      CHECK(std::string(e.what()).find("pole") != std::string::npos);
      CHECK(std::string(e.what()).find("0.5") != std::string::npos);
    }
    CHECK(threw);
  }
}

TEST_CASE("similarity invariance of the transfer function") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const StateSpace sys = random_stable_system(rng, 4, 3, 3, 0.85);
    const Eigen::MatrixXd p = random_conditioned(rng, 4, 50.0);  // condition number <= 1e6
    const StateSpace transformed = similarity_transform(sys, p);
    for (const auto& z : circle_samples(32, 1.5)) {
      const Eigen::MatrixXcd h1 = transfer_function(sys, z);
      const Eigen::MatrixXcd h2 = transfer_function(transformed, z);
      CHECK((h1 - h2).norm() / h1.norm() <= 1e-9);
    }
  }
}

TEST_CASE("similarity_transform basics") {
  Rng rng(9);
  const StateSpace sys = random_stable_system(rng, 3, 2, 2);
  SUBCASE("identity leaves the system unchanged") {
    const StateSpace same = similarity_transform(sys, Eigen::MatrixXd::Identity(3, 3));
    CHECK(same.A.isApprox(sys.A, 1e-14));
    CHECK(same.B.isApprox(sys.B, 1e-14));
    CHECK(same.C.isApprox(sys.C, 1e-14));
  }
  SUBCASE("scalar P rescales B and C only") {
    const StateSpace scaled = similarity_transform(sys, 2.0 * Eigen::MatrixXd::Identity(3, 3));
    CHECK(scaled.A.isApprox(sys.A, 1e-14));
    CHECK(scaled.B.isApprox(2.0 * sys.B, 1e-14));
    CHECK(scaled.C.isApprox(0.5 * sys.C, 1e-14));
  }
  SUBCASE("singular P is rejected") {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 3);
    p(0, 0) = 1.0;
    CHECK_THROWS_AS(similarity_transform(sys, p), std::runtime_error);
  }
}

TEST_CASE("unrolled_map") {
  Eigen::MatrixXd a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  const StateSpace nilpotent(a, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2));
  SUBCASE("t = 1 is CB") {
    CHECK(unrolled_map(nilpotent, 1).isIdentity(1e-15));
  }
  SUBCASE("A = 0 stalls at CB for any t") {
    Rng rng(10);
    const Eigen::MatrixXd b = random_matrix(rng, 2, 2);
    const Eigen::MatrixXd c = random_matrix(rng, 2, 2);
    const StateSpace sys(Eigen::MatrixXd::Zero(2, 2), b, c);
    CHECK(unrolled_map(sys, 7).isApprox(c * b, 1e-14));
  }
  SUBCASE("nilpotent hand sum CB + CAB") {
    const Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(2, 2) + a;
    CHECK(unrolled_map(nilpotent, 3).isApprox(expected, 1e-15));
  }
}

TEST_CASE("transfer function matches the truncated Markov series") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const StateSpace sys = random_stable_system(rng, 4, 2, 2, 0.9);
    const double rho = validate_system(sys).spectral_radius;
    for (const auto& z : circle_samples(8, 1.5)) {
      const double ratio = rho / std::abs(z);
      int K = 1;
      while (std::pow(ratio, K) / (1.0 - ratio) >= 1e-10) ++K;
      const MarkovParams mp = markov_params(sys, K + 1);
      Eigen::MatrixXcd series = Eigen::MatrixXcd::Zero(sys.output_dim(), sys.control_dim());
      std::complex<double> z_pow = z;
      for (int k = 1; k <= K; ++k) {
        series += mp.block(k).cast<std::complex<double>>() / z_pow;
        z_pow *= z;
      }
      const Eigen::MatrixXcd resolvent = transfer_function(sys, z);
      CHECK((series - resolvent).norm() / resolvent.norm() <= 1e-8);
    }
  }
}

// The Thm-style log-odds identity: two parameterizations that generate the
// same observational distributions produce identical log-odds between
// environments, evaluated through the change-of-variables density with the
// unrolled map.
TEST_CASE("log-odds equality for scaled-permutation-related systems") {
  Rng rng(12);
  const int d = 3;
  const StateSpace sys1 = random_stable_system(rng, d, d, d, 0.8);

  const Eigen::MatrixXd q = random_conditioned(rng, d, 5.0);
  Eigen::MatrixXd scaled_perm = Eigen::MatrixXd::Zero(d, d);
  const std::vector<int> perm = ltisid::testing::random_permutation(rng, d);
  for (int i = 0; i < d; ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    scaled_perm(perm[static_cast<std::size_t>(i)], i) = sign * rng.uniform(0.5, 2.0);
  }
  const Eigen::MatrixXd q_inv = q.partialPivLu().inverse();
  const StateSpace sys2(q * sys1.A * q_inv, q * sys1.B * scaled_perm, sys1.C * q_inv);

  // Matched environment covariances: Sigma2 = S^{-1} Sigma1 S^{-T}.
  const Eigen::MatrixXd s_inv = scaled_perm.partialPivLu().inverse();
  std::vector<Eigen::VectorXd> env1, env2;
  for (int e = 0; e < 2; ++e) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.uniform(0.3, 2.5);
    env1.push_back(v);
    const Eigen::MatrixXd transformed = s_inv * v.asDiagonal() * s_inv.transpose();
    CHECK((transformed - Eigen::MatrixXd(transformed.diagonal().asDiagonal())).norm() < 1e-12);
    env2.push_back(transformed.diagonal());
  }

  const auto log_density = [](const StateSpace& sys, int t, const Eigen::VectorXd& variances,
                              const Eigen::VectorXd& y) {
    const Eigen::MatrixXd map = unrolled_map(sys, t);
    const Eigen::VectorXd u = map.partialPivLu().solve(y);
    double value = -std::log(std::abs(map.partialPivLu().determinant()));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      value += -0.5 * u(i) * u(i) / variances(i) - 0.5 * std::log(variances(i)) -
               0.5 * std::log(2.0 * 3.14159265358979323846);
    }
    return value;
  };

  for (int t : {1, 2, 4}) {
    // Same observational law in both parameterizations.
    const Eigen::MatrixXd t1 = unrolled_map(sys1, t);
    const Eigen::MatrixXd t2 = unrolled_map(sys2, t);
    CHECK((t1 * env1[0].asDiagonal() * t1.transpose() -
           t2 * env2[0].asDiagonal() * t2.transpose())
              .norm() < 1e-9);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd y(d);
      for (int i = 0; i < d; ++i) y(i) = 2.0 * rng.gaussian();
      const double q1 = log_density(sys1, t, env1[1], y) - log_density(sys1, t, env1[0], y);
      const double q2 = log_density(sys2, t, env2[1], y) - log_density(sys2, t, env2[0], y);
      CHECK(std::abs(q1 - q2) <= 1e-8);
    }
  }
}

TEST_SUITE_END();

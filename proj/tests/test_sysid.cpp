#include <doctest.h>

#include <cmath>

#include "ltisid/metrics.hpp"
#include "ltisid/sysid.hpp"
#include "test_helpers.hpp"

using namespace ltisid;
using ltisid::testing::random_conditioned;
using ltisid::testing::random_stable_system;

namespace {

double max_block_error(const MarkovParams& a, const MarkovParams& b, int from, int to) {
  double worst = 0.0;
  for (int k = from; k < to; ++k) {
    const double denom = std::max(1e-12, a.block(k).norm());
    worst = std::max(worst, (a.block(k) - b.block(k)).norm() / denom);
  }
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("sysid");

TEST_CASE("hankel layout") {
  SUBCASE("smallest Hankel is CB") {
    Rng rng(61);
    const StateSpace sys = random_stable_system(rng, 2, 2, 2);
    const HankelMatrix h = hankel(markov_params(sys, 3), 1, 1);
    CHECK((h.data - sys.C * sys.B).norm() < 1e-14);
  }
  SUBCASE("nilpotent system gives the anti-diagonal band") {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 0.0, 0.0;  // A^2 = 0
    const StateSpace sys(a, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2));
    const HankelMatrix h = hankel(markov_params(sys, 5), 2, 2);
    // blocks: (1,1) = CB = I, (1,2) = (2,1) = CAB = A, (2,2) = CA^2B = 0.
    CHECK(h.data.block(0, 0, 2, 2).isIdentity(1e-15));
    CHECK((h.data.block(0, 2, 2, 2) - a).norm() == 0.0);
    CHECK((h.data.block(2, 0, 2, 2) - a).norm() == 0.0);
    CHECK(h.data.block(2, 2, 2, 2).norm() == 0.0);
  }
  SUBCASE("rank equals the state dimension for a minimal system") {
    Rng rng(62);
    for (int trial = 0; trial < 5; ++trial) {
      const int d_x = 3;
      const StateSpace sys = random_stable_system(rng, d_x, d_x, d_x);
      const SystemReport report = validate_system(sys);
      REQUIRE(report.is_controllable);
      REQUIRE(report.is_observable);
      const HankelMatrix h = hankel(markov_params(sys, 2 * d_x), d_x, d_x);
      CHECK(svd_rank(h.data) == d_x);
    }
  }
  SUBCASE("horizon too short") {
    Rng rng(63);
    const StateSpace sys = random_stable_system(rng, 2, 2, 2);
    CHECK_THROWS_AS(hankel(markov_params(sys, 3), 2, 2), std::invalid_argument);
  }
}

TEST_CASE("ho_kalman round trip on a known system") {
  Rng rng(64);
  const StateSpace sys = random_stable_system(rng, 2, 2, 2);
  const MarkovParams mp = markov_params(sys, 8);
  const HoKalmanResult result = ho_kalman(mp, 2, 3, 3);

  const MarkovParams recovered = markov_params(result.sys, 8);
  CHECK(max_block_error(mp, recovered, 1, 7) <= 1e-8);
  CHECK(result.effective_rank == 2);
  CHECK_FALSE(result.ill_conditioned_rank);

  SUBCASE("recovery is up to similarity, not elementwise") {
    // The balanced realization almost surely differs from the original
    // coordinates, but the transfer functions agree.
    CHECK((result.sys.A - sys.A).norm() > 1e-6);
    for (const auto& z : circle_samples(32, 1.5)) {
      const Eigen::MatrixXcd h1 = transfer_function(sys, z);
      const Eigen::MatrixXcd h2 = transfer_function(result.sys, z);
      CHECK((h1 - h2).norm() / h1.norm() <= 1e-7);
    }
  }
}

TEST_CASE("overestimated state dimension hits the rank guard") {
  Rng rng(65);
  const StateSpace sys = random_stable_system(rng, 3, 3, 3);
  const MarkovParams mp = markov_params(sys, 12);
  CHECK_THROWS_AS(ho_kalman(mp, 5, 5, 5), std::runtime_error);
}

TEST_CASE("markov params of similarity-transformed inputs give the same realization") {
  Rng rng(66);
  const StateSpace sys = random_stable_system(rng, 3, 3, 3);
  const StateSpace transformed = similarity_transform(sys, random_conditioned(rng, 3, 10.0));
  const MarkovParams mp1 = markov_params(sys, 10);
  const MarkovParams mp2 = markov_params(transformed, 10);

  const HoKalmanResult r1 = ho_kalman(mp1, 3);
  const HoKalmanResult r2 = ho_kalman(mp2, 3);
  const MarkovParams rec1 = markov_params(r1.sys, 10);
  const MarkovParams rec2 = markov_params(r2.sys, 10);
  CHECK(max_block_error(rec1, rec2, 1, 10) <= 1e-8);
}

TEST_CASE("round trip property over random systems up to d_x = 8") {
  Rng rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    const int d_x = 2 + static_cast<int>(rng.bounded(7));  // 2..8
    const StateSpace sys = random_stable_system(rng, d_x, d_x, d_x, 0.85);
    const int horizon = 2 * d_x + 2;
    const MarkovParams mp = markov_params(sys, horizon);
    const HoKalmanResult result = ho_kalman(mp, d_x);
    const MarkovParams recovered = markov_params(result.sys, horizon);
    CHECK(max_block_error(mp, recovered, 1, horizon) <= 1e-8);
  }
}

TEST_CASE("argument validation") {
  Rng rng(68);
  const StateSpace sys = random_stable_system(rng, 2, 2, 2);
  const MarkovParams mp = markov_params(sys, 8);
  CHECK_THROWS_AS(ho_kalman(mp, 0, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(ho_kalman(mp, 2, 4, 4), std::invalid_argument);  // needs horizon >= 9
  CHECK_THROWS_AS(ho_kalman(mp, 5, 2, 2), std::invalid_argument);  // rank above Hankel size
}

TEST_SUITE_END();

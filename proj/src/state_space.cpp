#include "ltisid/state_space.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace ltisid {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

StateSpace::StateSpace(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in, Eigen::MatrixXd C_in)
    : A(std::move(A_in)), B(std::move(B_in)), C(std::move(C_in)) {
  check_consistent(*this);
}

ContinuousStateSpace::ContinuousStateSpace(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in,
                                           Eigen::MatrixXd C_in)
    : A(std::move(A_in)), B(std::move(B_in)), C(std::move(C_in)) {
  check_consistent(*this);
}

void check_consistent(const StateSpace& sys) {
  require(sys.A.rows() > 0, "state dimension must be positive");
  require(sys.A.rows() == sys.A.cols(), "A must be square");
  require(sys.B.rows() == sys.A.rows(), "B row count must match state dimension");
  require(sys.B.cols() > 0, "control dimension must be positive");
  require(sys.C.cols() == sys.A.rows(), "C column count must match state dimension");
  require(sys.C.rows() > 0, "output dimension must be positive");
  require(all_finite(sys.A) && all_finite(sys.B) && all_finite(sys.C),
          "system matrices must be finite");
}

void check_consistent(const ContinuousStateSpace& sys) {
  require(sys.A.rows() > 0, "state dimension must be positive");
  require(sys.A.rows() == sys.A.cols(), "A must be square");
  require(sys.B.rows() == sys.A.rows(), "B row count must match state dimension");
  require(sys.B.cols() > 0, "control dimension must be positive");
  require(sys.C.cols() == sys.A.rows(), "C column count must match state dimension");
  require(sys.C.rows() > 0, "output dimension must be positive");
  require(all_finite(sys.A) && all_finite(sys.B) && all_finite(sys.C),
          "system matrices must be finite");
}

Eigen::MatrixXd controllability_matrix(const StateSpace& sys) {
  const int n = sys.state_dim();
  const int m = sys.control_dim();
  Eigen::MatrixXd ctrb(n, n * m);
  ctrb.leftCols(m) = sys.B;
  for (int i = 1; i < n; ++i) {
    ctrb.middleCols(i * m, m) = sys.A * ctrb.middleCols((i - 1) * m, m);
  }
  return ctrb;
}

Eigen::MatrixXd observability_matrix(const StateSpace& sys) {
  const int n = sys.state_dim();
  const int p = sys.output_dim();
  Eigen::MatrixXd obsv(n * p, n);
  obsv.topRows(p) = sys.C;
  for (int i = 1; i < n; ++i) {
    obsv.middleRows(i * p, p) = obsv.middleRows((i - 1) * p, p) * sys.A;
  }
  return obsv;
}

int svd_rank(const Eigen::MatrixXd& m, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold = static_cast<double>(std::max(m.rows(), m.cols())) * sv(0) * tol;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  return rank;
}

SystemReport validate_system(const StateSpace& sys) {
  check_consistent(sys);
  SystemReport report;
  const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(sys.A, false).eigenvalues();
  report.spectral_radius = eigs.cwiseAbs().maxCoeff();
  report.is_stable = report.spectral_radius < 1.0;
  report.controllability_rank = svd_rank(controllability_matrix(sys));
  report.observability_rank = svd_rank(observability_matrix(sys));
  report.is_controllable = report.controllability_rank == sys.state_dim();
  report.is_observable = report.observability_rank == sys.state_dim();
  return report;
}

namespace {

Eigen::MatrixXd matrix_exp_impl(const Eigen::MatrixXd& A) {
  // Pade(13) coefficients, Higham (2005); scale so the 1-norm is below
  // theta_13, square back afterwards.
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  static constexpr double kTheta13 = 5.371920351148152;

  const Eigen::Index n = A.rows();
  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  }
  const Eigen::MatrixXd As = A * std::ldexp(1.0, -squarings);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A2 = As * As;
  const Eigen::MatrixXd A4 = A2 * A2;
  const Eigen::MatrixXd A6 = A4 * A2;

  Eigen::MatrixXd U = A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2);
  U += b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I;
  U = As * U;

  Eigen::MatrixXd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2);
  V += b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;

  Eigen::MatrixXd P = (V - U).partialPivLu().solve(V + U);
  for (int s = 0; s < squarings; ++s) P = P * P;
  return P;
}

}  // namespace

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& A) {
  require(A.rows() == A.cols(), "matrix exponential requires a square matrix");
  require(A.allFinite(), "matrix exponential requires finite entries");
  Eigen::MatrixXd result = matrix_exp_impl(A);
  if (!result.allFinite()) {
    throw std::runtime_error("matrix exponential overflowed to non-finite values");
  }
  return result;
}

StateSpace discretize(const ContinuousStateSpace& csys, double dt, DiscretizationMethod method) {
  check_consistent(csys);
  require(dt > 0.0 && std::isfinite(dt), "discretization step must be positive");
  const int n = csys.state_dim();
  const int m = csys.control_dim();

  Eigen::MatrixXd Ad, Bd;
  switch (method) {
    case DiscretizationMethod::kForwardEuler:
      Ad = Eigen::MatrixXd::Identity(n, n) + csys.A * dt;
      Bd = csys.B * dt;
      break;
    case DiscretizationMethod::kZeroOrderHold: {
      // exp([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, I]]
      Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
      aug.topLeftCorner(n, n) = csys.A * dt;
      aug.topRightCorner(n, m) = csys.B * dt;
      const Eigen::MatrixXd e = matrix_exp(aug);
      Ad = e.topLeftCorner(n, n);
      Bd = e.topRightCorner(n, m);
      break;
    }
  }
  if (!Ad.allFinite() || !Bd.allFinite()) {
    throw std::runtime_error("discretization produced non-finite matrices");
  }
  return StateSpace(Ad, Bd, csys.C);
}

StateSpace similarity_transform(const StateSpace& sys, const Eigen::MatrixXd& P,
                                double cond_cap) {
  check_consistent(sys);
  require(P.rows() == P.cols() && P.rows() == sys.state_dim(),
          "P must be square with the state dimension");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0 || sv(0) / smin > cond_cap) {
    std::ostringstream oss;
    oss << "similarity transform: P is numerically singular (condition number "
        << (smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity()) << ")";
    throw std::runtime_error(oss.str());
  }
  const Eigen::MatrixXd Pinv = P.partialPivLu().inverse();
  return StateSpace(P * sys.A * Pinv, P * sys.B, sys.C * Pinv);
}

Eigen::MatrixXcd transfer_function(const StateSpace& sys, std::complex<double> z) {
  check_consistent(sys);
  const int n = sys.state_dim();
  const Eigen::MatrixXcd zIA =
      z * Eigen::MatrixXcd::Identity(n, n) - sys.A.cast<std::complex<double>>();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(zIA);
  if (!lu.isInvertible()) {
    std::ostringstream oss;
    oss << "transfer function pole at z = " << z.real() << (z.imag() < 0 ? " - " : " + ")
        << std::abs(z.imag()) << "i";
    throw std::runtime_error(oss.str());
  }
  return sys.C.cast<std::complex<double>>() * lu.solve(sys.B.cast<std::complex<double>>());
}

Eigen::MatrixXd unrolled_map(const StateSpace& sys, int t) {
  check_consistent(sys);
  require(t >= 1, "unrolled map requires t >= 1");
  Eigen::MatrixXd power = sys.B;                // A^{i-1} B
  Eigen::MatrixXd total = sys.C * power;
  for (int i = 2; i <= t; ++i) {
    power = sys.A * power;
    total += sys.C * power;
  }
  return total;
}

}  // namespace ltisid

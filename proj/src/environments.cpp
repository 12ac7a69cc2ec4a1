#include "ltisid/environments.hpp"

#include <limits>
#include <stdexcept>
#include <utility>

#include "ltisid/rng.hpp"

namespace ltisid {

namespace {

void check_spec(const EnvironmentSpec& spec) {
  if (spec.variances.size() == 0) throw std::invalid_argument("environment has no components");
  if (!spec.variances.allFinite() || (spec.variances.array() < 0.0).any()) {
    throw std::invalid_argument("environment variances must be finite and nonnegative");
  }
  if (spec.mean.size() != spec.variances.size() || !spec.mean.allFinite()) {
    throw std::invalid_argument("environment mean must be finite and match the control dimension");
  }
}

}  // namespace

EnvironmentSpec::EnvironmentSpec(int index_in, Eigen::VectorXd variances_in)
    : index(index_in),
      variances(std::move(variances_in)),
      mean(Eigen::VectorXd::Zero(variances.size())) {
  check_spec(*this);
}

EnvironmentSpec::EnvironmentSpec(int index_in, Eigen::VectorXd variances_in,
                                 Eigen::VectorXd mean_in)
    : index(index_in), variances(std::move(variances_in)), mean(std::move(mean_in)) {
  check_spec(*this);
}

DesignDiagnostics variability_matrix(const std::vector<EnvironmentSpec>& specs) {
  if (specs.size() < 2) throw std::invalid_argument("a design needs at least 2 environments");
  const int d_u = specs.front().control_dim();
  for (const auto& spec : specs) {
    check_spec(spec);
    if (spec.control_dim() != d_u) {
      throw std::invalid_argument("environments disagree on the control dimension");
    }
    if ((spec.variances.array() <= 0.0).any()) {
      throw std::invalid_argument("variability matrix requires strictly positive variances");
    }
  }

  DesignDiagnostics diag;
  const Eigen::ArrayXd base_prec = specs.front().variances.array().inverse();
  diag.delta.resize(static_cast<Eigen::Index>(specs.size()) - 1, d_u);
  for (std::size_t e = 1; e < specs.size(); ++e) {
    diag.delta.row(static_cast<Eigen::Index>(e) - 1) =
        (specs[e].variances.array().inverse() - base_prec).matrix().transpose();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(diag.delta);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  double threshold = static_cast<double>(std::max(diag.delta.rows(), diag.delta.cols())) * smax * 1e-12;
  diag.column_rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++diag.column_rank;
  }
  diag.condition_number =
      smin > threshold ? smax / smin : std::numeric_limits<double>::infinity();
  if (smax == 0.0) diag.condition_number = std::numeric_limits<double>::infinity();
  diag.satisfies_variability = diag.column_rank == d_u;
  return diag;
}

std::vector<EnvironmentSpec> design_max_variability(int d_u, double high, double low) {
  if (d_u < 1) throw std::invalid_argument("control dimension must be positive");
  if (!(0.0 < low && low < high)) throw std::invalid_argument("need 0 < low < high");

  std::vector<EnvironmentSpec> specs;
  specs.reserve(static_cast<std::size_t>(d_u) + 1);
  specs.emplace_back(0, Eigen::VectorXd::Constant(d_u, low));
  for (int e = 1; e <= d_u; ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(d_u, low);
    v(e - 1) = high;
    specs.emplace_back(e, std::move(v));
  }
  return specs;
}

std::vector<EnvironmentSpec> sample_random_design(int d_u, int n_envs, double lo, double hi,
                                                  std::uint64_t seed) {
  if (d_u < 1) throw std::invalid_argument("control dimension must be positive");
  if (n_envs <= d_u) throw std::invalid_argument("need more environments than control components");
  if (!(0.0 < lo && lo < hi)) throw std::invalid_argument("need 0 < lo < hi for the variance interval");

  Rng rng(seed);
  std::vector<EnvironmentSpec> specs;
  specs.reserve(static_cast<std::size_t>(n_envs));
  for (int e = 0; e < n_envs; ++e) {
    Eigen::VectorXd v(d_u);
    for (int i = 0; i < d_u; ++i) v(i) = rng.uniform(lo, hi);
    specs.emplace_back(e, std::move(v));
  }
  return specs;
}

}  // namespace ltisid

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "qhmc/rng.hpp"

namespace qhmc {

/// Positive-definite mass matrix in scalar, diagonal, or dense form.
/// Immutable after construction; the dense form keeps its Cholesky factor
/// for inverse-apply and momentum sampling.
class MassMatrix {
 public:
  enum class Kind { Scalar, Diagonal, Dense };

  static MassMatrix scalar(double m);
  static MassMatrix diagonal(Eigen::VectorXd diag);
  static MassMatrix dense(Eigen::MatrixXd m);  // must be symmetric positive definite

  Kind kind() const { return kind_; }

  /// Dimension constraint: 0 for scalar (applies to any dimension).
  Eigen::Index dim() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;          // M v
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const;  // M^{-1} v

  /// Draw q ~ N(0, M) of dimension d.
  Eigen::VectorXd sample_momentum(Eigen::Index d, Rng& rng) const;

  /// 0.5 q^T M^{-1} q
  double kinetic_energy(const Eigen::VectorXd& q) const;

  double trace_inverse(Eigen::Index d) const;

  /// Scalar summary for chain metadata: mean of the diagonal entries.
  double diag_mean(Eigen::Index d) const;

  double scalar_value() const { return m_; }
  const Eigen::VectorXd& diagonal_values() const { return diag_; }
  const Eigen::MatrixXd& dense_values() const { return dense_; }

  bool operator==(const MassMatrix& other) const;

 private:
  MassMatrix() = default;
  void check_dim(Eigen::Index d) const;

  Kind kind_ = Kind::Scalar;
  double m_ = 1.0;
  Eigen::VectorXd diag_;
  Eigen::MatrixXd dense_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Distribution P_M(M) over mass matrices. The scalar and diagonal log-normal
/// forms draw exponents in base 10: m = 10^w with w ~ N(mu, sigma^2).
class MassSpec {
 public:
  enum class Kind { Dirac, ScalarLogNormal, DiagonalLogNormal, Mixture };

  static MassSpec dirac(MassMatrix m0);
  static MassSpec scalar_log_normal(double mu, double sigma);
  static MassSpec diagonal_log_normal(Eigen::VectorXd mu, Eigen::VectorXd sigma);
  static MassSpec mixture(std::vector<double> weights, std::vector<MassMatrix> components);

  /// Clamp sampled scalar/diagonal entries from below.
  MassSpec& with_lower_bound(double m0);

  Kind kind() const { return kind_; }
  std::optional<double> lower_bound() const { return lower_bound_; }

  double scalar_mu() const { return mu_; }
  double scalar_sigma() const { return sigma_; }
  const Eigen::VectorXd& diagonal_mu() const { return mu_vec_; }
  const Eigen::VectorXd& diagonal_sigma() const { return sigma_vec_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<MassMatrix>& components() const { return components_; }

  /// Throws std::invalid_argument when the spec violates its invariants.
  void validate() const;

  /// Draw one mass matrix for a path of dimension d.
  MassMatrix sample(Eigen::Index d, Rng& rng) const;

 private:
  MassSpec() = default;

  Kind kind_ = Kind::Dirac;
  std::vector<MassMatrix> components_;  // Dirac: single entry; Mixture: all
  std::vector<double> weights_;
  double mu_ = 0.0, sigma_ = 0.0;
  Eigen::VectorXd mu_vec_, sigma_vec_;
  std::optional<double> lower_bound_;
};

}  // namespace qhmc

#include "qhmc/mass.hpp"

#include <cmath>
#include <stdexcept>

namespace qhmc {

MassMatrix MassMatrix::scalar(double m) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::invalid_argument("MassMatrix::scalar: m must be positive and finite");
  MassMatrix out;
  out.kind_ = Kind::Scalar;
  out.m_ = m;
  return out;
}

MassMatrix MassMatrix::diagonal(Eigen::VectorXd diag) {
  if (diag.size() == 0) throw std::invalid_argument("MassMatrix::diagonal: empty");
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    if (!(diag[i] > 0.0) || !std::isfinite(diag[i]))
      throw std::invalid_argument("MassMatrix::diagonal: entries must be positive");
  MassMatrix out;
  out.kind_ = Kind::Diagonal;
  out.diag_ = std::move(diag);
  return out;
}

MassMatrix MassMatrix::dense(Eigen::MatrixXd m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("MassMatrix::dense: matrix must be square");
  if (!m.isApprox(m.transpose(), 1e-10))
    throw std::invalid_argument("MassMatrix::dense: matrix must be symmetric");
  MassMatrix out;
  out.kind_ = Kind::Dense;
  out.dense_ = std::move(m);
  out.llt_.compute(out.dense_);
  if (out.llt_.info() != Eigen::Success)
    throw std::invalid_argument("MassMatrix::dense: matrix must be positive definite");
  return out;
}

Eigen::Index MassMatrix::dim() const {
  switch (kind_) {
    case Kind::Scalar: return 0;
    case Kind::Diagonal: return diag_.size();
    case Kind::Dense: return dense_.rows();
  }
  return 0;
}

void MassMatrix::check_dim(Eigen::Index d) const {
  if (dim() != 0 && dim() != d)
    throw std::invalid_argument("MassMatrix: dimension mismatch");
}

Eigen::VectorXd MassMatrix::apply(const Eigen::VectorXd& v) const {
  check_dim(v.size());
  switch (kind_) {
    case Kind::Scalar: return m_ * v;
    case Kind::Diagonal: return diag_.cwiseProduct(v);
    case Kind::Dense: return dense_ * v;
  }
  return v;
}

Eigen::VectorXd MassMatrix::apply_inverse(const Eigen::VectorXd& v) const {
  check_dim(v.size());
  switch (kind_) {
    case Kind::Scalar: return v / m_;
    case Kind::Diagonal: return v.cwiseQuotient(diag_);
    case Kind::Dense: return llt_.solve(v);
  }
  return v;
}

Eigen::VectorXd MassMatrix::sample_momentum(Eigen::Index d, Rng& rng) const {
  check_dim(d);
  Eigen::VectorXd z = rng.normal_vector(d);
  switch (kind_) {
    case Kind::Scalar: return std::sqrt(m_) * z;
    case Kind::Diagonal: return diag_.cwiseSqrt().cwiseProduct(z);
    case Kind::Dense: return llt_.matrixL() * z;
  }
  return z;
}

double MassMatrix::kinetic_energy(const Eigen::VectorXd& q) const {
  return 0.5 * q.dot(apply_inverse(q));
}

double MassMatrix::trace_inverse(Eigen::Index d) const {
  check_dim(d);
  switch (kind_) {
    case Kind::Scalar: return static_cast<double>(d) / m_;
    case Kind::Diagonal: return diag_.cwiseInverse().sum();
    case Kind::Dense: {
      Eigen::MatrixXd inv = llt_.solve(Eigen::MatrixXd::Identity(dense_.rows(), dense_.cols()));
      return inv.trace();
    }
  }
  return 0.0;
}

double MassMatrix::diag_mean(Eigen::Index d) const {
  switch (kind_) {
    case Kind::Scalar: return m_;
    case Kind::Diagonal: return diag_.mean();
    case Kind::Dense: return dense_.diagonal().mean();
  }
  (void)d;
  return m_;
}

bool MassMatrix::operator==(const MassMatrix& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::Scalar: return m_ == other.m_;
    case Kind::Diagonal: return diag_ == other.diag_;
    case Kind::Dense: return dense_ == other.dense_;
  }
  return false;
}

MassSpec MassSpec::dirac(MassMatrix m0) {
  MassSpec out;
  out.kind_ = Kind::Dirac;
  out.components_.push_back(std::move(m0));
  return out;
}

MassSpec MassSpec::scalar_log_normal(double mu, double sigma) {
  MassSpec out;
  out.kind_ = Kind::ScalarLogNormal;
  out.mu_ = mu;
  out.sigma_ = sigma;
  return out;
}

MassSpec MassSpec::diagonal_log_normal(Eigen::VectorXd mu, Eigen::VectorXd sigma) {
  MassSpec out;
  out.kind_ = Kind::DiagonalLogNormal;
  out.mu_vec_ = std::move(mu);
  out.sigma_vec_ = std::move(sigma);
  return out;
}

MassSpec MassSpec::mixture(std::vector<double> weights, std::vector<MassMatrix> components) {
  MassSpec out;
  out.kind_ = Kind::Mixture;
  out.weights_ = std::move(weights);
  out.components_ = std::move(components);
  return out;
}

MassSpec& MassSpec::with_lower_bound(double m0) {
  lower_bound_ = m0;
  return *this;
}

void MassSpec::validate() const {
  if (lower_bound_ && !(*lower_bound_ > 0.0))
    throw std::invalid_argument("MassSpec: lower bound must be positive");
  switch (kind_) {
    case Kind::Dirac:
      break;
    case Kind::ScalarLogNormal:
      if (sigma_ < 0.0 || !std::isfinite(mu_) || !std::isfinite(sigma_))
        throw std::invalid_argument("MassSpec: invalid log-normal parameters");
      break;
    case Kind::DiagonalLogNormal:
      if (mu_vec_.size() == 0 || mu_vec_.size() != sigma_vec_.size())
        throw std::invalid_argument("MassSpec: mu/sigma size mismatch");
      if ((sigma_vec_.array() < 0.0).any())
        throw std::invalid_argument("MassSpec: sigma entries must be nonnegative");
      break;
    case Kind::Mixture: {
      if (weights_.empty() || weights_.size() != components_.size())
        throw std::invalid_argument("MassSpec: mixture weights/components mismatch");
      double total = 0.0;
      for (double w : weights_) {
        if (w < 0.0) throw std::invalid_argument("MassSpec: negative mixture weight");
        total += w;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("MassSpec: mixture weights must sum to 1");
      break;
    }
  }
}

namespace {

double clamp_floor(double m, const std::optional<double>& m0) {
  return m0 ? std::max(m, *m0) : m;
}

MassMatrix apply_floor(const MassMatrix& m, const std::optional<double>& m0) {
  if (!m0) return m;
  switch (m.kind()) {
    case MassMatrix::Kind::Scalar:
      return MassMatrix::scalar(std::max(m.scalar_value(), *m0));
    case MassMatrix::Kind::Diagonal:
      return MassMatrix::diagonal(m.diagonal_values().cwiseMax(*m0));
    case MassMatrix::Kind::Dense:
      return m;  // the clamp is defined on scalar/diagonal entries only
  }
  return m;
}

}  // namespace

MassMatrix MassSpec::sample(Eigen::Index d, Rng& rng) const {
  validate();
  switch (kind_) {
    case Kind::Dirac:
      return components_.front();
    case Kind::ScalarLogNormal: {
      double w = mu_ + sigma_ * rng.normal();
      return MassMatrix::scalar(clamp_floor(std::pow(10.0, w), lower_bound_));
    }
    case Kind::DiagonalLogNormal: {
      if (mu_vec_.size() != d)
        throw std::invalid_argument("MassSpec: diagonal spec dimension mismatch");
      Eigen::VectorXd diag(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        double w = mu_vec_[i] + sigma_vec_[i] * rng.normal();
        diag[i] = clamp_floor(std::pow(10.0, w), lower_bound_);
      }
      return MassMatrix::diagonal(std::move(diag));
    }
    case Kind::Mixture: {
      std::size_t i = rng.categorical(weights_);
      return apply_floor(components_[i], lower_bound_);
    }
  }
  throw std::logic_error("MassSpec: unreachable");
}

}  // namespace qhmc

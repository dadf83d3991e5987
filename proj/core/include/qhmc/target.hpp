#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "qhmc/mass.hpp"
#include "qhmc/rng.hpp"

namespace qhmc {

/// Potential-energy capability U(x) = -log p(x|D) plus gradient. Optional
/// exact CDF/quantile hooks support 1-D diagnostics against ground truth.
struct Target {
  Eigen::Index dim = 0;
  std::function<double(const Eigen::VectorXd&)> potential;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;

  // 1-D exact-density hooks (empty when unavailable).
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;

  bool has_exact_density() const { return static_cast<bool>(quantile); }
};

inline double hamiltonian(const Target& target, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& q, const MassMatrix& m) {
  return target.potential(x) + m.kinetic_energy(q);
}

/// Minibatch view over a per-record loss decomposition U(x) = (1/N) sum U_i(x).
struct StochasticTarget {
  Eigen::Index dim = 0;
  int n_records = 0;
  std::function<double(const Eigen::VectorXd&, const std::vector<int>&)> batch_potential;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const std::vector<int>&)> batch_gradient;

  /// Deterministic full-batch target.
  Target full() const;
};

/// Uniform batch of size b out of n without replacement.
std::vector<int> sample_batch(int n, int b, Rng& rng);

/// Max relative central-difference gradient error over all coordinates.
double finite_diff_check(const Target& target, const Eigen::VectorXd& x, double h);

}  // namespace qhmc

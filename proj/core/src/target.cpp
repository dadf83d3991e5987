#include "qhmc/target.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qhmc {

Target StochasticTarget::full() const {
  std::vector<int> all(n_records);
  std::iota(all.begin(), all.end(), 0);
  Target t;
  t.dim = dim;
  t.potential = [pot = batch_potential, all](const Eigen::VectorXd& x) {
    return pot(x, all);
  };
  t.gradient = [grad = batch_gradient, all](const Eigen::VectorXd& x) {
    return grad(x, all);
  };
  return t;
}

std::vector<int> sample_batch(int n, int b, Rng& rng) {
  if (b > n || b < 1) throw std::invalid_argument("sample_batch: need 1 <= b <= n");
  // Partial Fisher-Yates over an index pool.
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < b; ++i) {
    int j = i + static_cast<int>(rng.uniform() * (n - i));
    j = std::min(j, n - 1);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(b);
  return pool;
}

double finite_diff_check(const Target& target, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g = target.gradient(x);
  double worst = 0.0;
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    double fd = (target.potential(xp) - target.potential(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
    double scale = std::max({std::abs(g[i]), std::abs(fd), 1.0});
    worst = std::max(worst, std::abs(g[i] - fd) / scale);
  }
  return worst;
}

}  // namespace qhmc

#include "qhmc/targets.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <boost/math/distributions/gamma.hpp>

namespace qhmc {

namespace {

// sign(x) = +1 for x >= 0, -1 for x < 0
double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

Eigen::VectorXd lp_gradient(const Eigen::VectorXd& x, double p, double lambda, double eps0) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double a = std::abs(x[i]);
    g[i] = lambda * p * sgn(x[i]) / (std::pow(a, 1.0 - p) + eps0);
  }
  return g;
}

double lp_potential(const Eigen::VectorXd& x, double p, double lambda) {
  double u = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) u += std::pow(std::abs(x[i]), p);
  return lambda * u;
}

}  // namespace

Target lp_target(double p, double lambda, Eigen::Index d, double eps0) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("lp_target: p must be in (0,1]");
  if (!(lambda > 0.0)) throw std::invalid_argument("lp_target: lambda must be positive");
  Target t;
  t.dim = d;
  t.potential = [p, lambda](const Eigen::VectorXd& x) { return lp_potential(x, p, lambda); };
  t.gradient = [p, lambda, eps0](const Eigen::VectorXd& x) {
    return lp_gradient(x, p, lambda, eps0);
  };
  if (d == 1) {
    // |x|^p ~ Gamma(1/p, rate lambda), so the 1-D density has exact quantiles.
    auto dist = std::make_shared<boost::math::gamma_distribution<double>>(1.0 / p, 1.0 / lambda);
    t.cdf = [dist, p](double x) {
      double f = boost::math::cdf(*dist, std::pow(std::abs(x), p));
      return 0.5 + 0.5 * sgn(x) * f;
    };
    t.quantile = [dist, p](double v) {
      double s = std::abs(2.0 * v - 1.0);
      s = std::min(s, 1.0 - 1e-15);
      double u = boost::math::quantile(*dist, s);
      return (v >= 0.5 ? 1.0 : -1.0) * std::pow(u, 1.0 / p);
    };
  }
  return t;
}

Target piecewise_well_target() {
  Target t;
  t.dim = 1;
  t.potential = [](const Eigen::VectorXd& xv) {
    double x = xv[0];
    if (x <= -3.0) return -x - 3.0;
    if (x <= 0.0) return 0.0;
    if (x <= 1.0) return 8.0 * x * (x - 1.0);
    return x - 1.0;
  };
  // one-sided derivative from the right at the breakpoints
  t.gradient = [](const Eigen::VectorXd& xv) {
    double x = xv[0];
    Eigen::VectorXd g(1);
    if (x < -3.0) g[0] = -1.0;
    else if (x < 0.0) g[0] = 0.0;
    else if (x < 1.0) g[0] = 16.0 * x - 8.0;
    else g[0] = 1.0;
    return g;
  };
  attach_numeric_density(t, -25.0, 23.0, 40001);
  return t;
}

Target spiky_smooth_target(double x0) {
  if (!(x0 > 0.0)) throw std::invalid_argument("spiky_smooth_target: x0 must be positive");
  Target t;
  t.dim = 1;
  t.potential = [x0](const Eigen::VectorXd& xv) {
    double a = std::abs(xv[0]);
    return a > x0 ? a + 999.0 * x0 : 1000.0 * a;
  };
  t.gradient = [x0](const Eigen::VectorXd& xv) {
    Eigen::VectorXd g(1);
    double a = std::abs(xv[0]);
    g[0] = (a > x0 ? 1.0 : 1000.0) * sgn(xv[0]);
    return g;
  };
  attach_numeric_density(t, -24.0 - 999.0 * x0, 24.0 + 999.0 * x0, 60001);
  return t;
}

Target double_well_target() {
  Target t;
  t.dim = 1;
  t.potential = [](const Eigen::VectorXd& xv) {
    double x = xv[0];
    return x * x * x * x - 4.0 * x * x;
  };
  t.gradient = [](const Eigen::VectorXd& xv) {
    double x = xv[0];
    Eigen::VectorXd g(1);
    g[0] = 4.0 * x * x * x - 8.0 * x;
    return g;
  };
  attach_numeric_density(t, -3.5, 3.5, 40001);
  return t;
}

Target asymmetric_well_target() {
  Target t;
  t.dim = 1;
  t.potential = [](const Eigen::VectorXd& xv) {
    double x = xv[0];
    return x < 0.0 ? -x : 3.0 * x;
  };
  t.gradient = [](const Eigen::VectorXd& xv) {
    Eigen::VectorXd g(1);
    g[0] = xv[0] < 0.0 ? -1.0 : 3.0;
    return g;
  };
  // density: (3/4) e^x for x<0, (3/4) e^{-3x} for x>=0
  t.cdf = [](double x) {
    return x < 0.0 ? 0.75 * std::exp(x) : 1.0 - 0.25 * std::exp(-3.0 * x);
  };
  t.quantile = [](double v) {
    if (v < 0.75) return std::log(v / 0.75);
    return -std::log(4.0 * (1.0 - v)) / 3.0;
  };
  return t;
}

Target gaussian_target(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("gaussian_target: covariance must be SPD");
  auto solver = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(std::move(llt));
  Target t;
  t.dim = sigma.rows();
  t.potential = [solver](const Eigen::VectorXd& x) { return 0.5 * x.dot(solver->solve(x)); };
  t.gradient = [solver](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return solver->solve(x);
  };
  return t;
}

Target gaussian_mixture_target(const std::vector<double>& weights,
                               const std::vector<Eigen::MatrixXd>& sigmas) {
  if (weights.size() != sigmas.size() || weights.empty())
    throw std::invalid_argument("gaussian_mixture_target: weights/sigmas mismatch");
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("gaussian_mixture_target: weights must sum to 1");

  auto solvers = std::make_shared<std::vector<Eigen::LLT<Eigen::MatrixXd>>>();
  for (const auto& s : sigmas) {
    solvers->emplace_back(s);
    if (solvers->back().info() != Eigen::Success)
      throw std::invalid_argument("gaussian_mixture_target: component must be SPD");
  }
  auto w = std::make_shared<std::vector<double>>(weights);

  auto energies = [solvers](const Eigen::VectorXd& x) {
    std::vector<double> e;
    e.reserve(solvers->size());
    for (const auto& llt : *solvers) e.push_back(0.5 * x.dot(llt.solve(x)));
    return e;
  };

  Target t;
  t.dim = sigmas.front().rows();
  t.potential = [energies, w](const Eigen::VectorXd& x) {
    auto e = energies(x);
    double emin = *std::min_element(e.begin(), e.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) acc += (*w)[i] * std::exp(emin - e[i]);
    return emin - std::log(acc);
  };
  t.gradient = [energies, solvers, w](const Eigen::VectorXd& x) {
    auto e = energies(x);
    double emin = *std::min_element(e.begin(), e.end());
    double z = 0.0;
    std::vector<double> r(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      r[i] = (*w)[i] * std::exp(emin - e[i]);
      z += r[i];
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (std::size_t i = 0; i < e.size(); ++i)
      g += (r[i] / z) * (*solvers)[i].solve(x);
    return g;
  };
  return t;
}

Target quadratic_target(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("quadratic_target: A must be square");
  auto m = std::make_shared<Eigen::MatrixXd>(a);
  Target t;
  t.dim = a.rows();
  t.potential = [m](const Eigen::VectorXd& x) { return 0.5 * x.dot(*m * x); };
  t.gradient = [m](const Eigen::VectorXd& x) -> Eigen::VectorXd { return *m * x; };
  return t;
}

Target bridge_target(const RegressionDataset& data, double mu, double lambda, double p,
                     double eps0) {
  auto x = std::make_shared<Eigen::MatrixXd>(data.x_train);
  auto y = std::make_shared<Eigen::VectorXd>(data.y_train);
  double n = static_cast<double>(data.n_train());

  Target t;
  t.dim = data.n_features();
  t.potential = [x, y, mu, lambda, p, n](const Eigen::VectorXd& beta) {
    if (beta.size() != x->cols()) throw std::invalid_argument("bridge_target: beta size");
    Eigen::VectorXd r = *y - *x * beta;
    return mu / (2.0 * n) * r.squaredNorm() + lp_potential(beta, p, lambda);
  };
  t.gradient = [x, y, mu, lambda, p, n, eps0](const Eigen::VectorXd& beta) {
    if (beta.size() != x->cols()) throw std::invalid_argument("bridge_target: beta size");
    Eigen::VectorXd r = *y - *x * beta;
    Eigen::VectorXd g = -(mu / n) * (x->transpose() * r);
    return (g + lp_gradient(beta, p, lambda, eps0)).eval();
  };
  return t;
}

StochasticTarget quadratic_record_target(const Eigen::VectorXd& centers) {
  auto c = std::make_shared<Eigen::VectorXd>(centers);
  StochasticTarget t;
  t.dim = 1;
  t.n_records = static_cast<int>(centers.size());
  t.batch_potential = [c](const Eigen::VectorXd& x, const std::vector<int>& batch) {
    double acc = 0.0;
    for (int i : batch) {
      double r = x[0] - (*c)[i];
      acc += 0.5 * r * r;
    }
    return acc / static_cast<double>(batch.size());
  };
  t.batch_gradient = [c](const Eigen::VectorXd& x, const std::vector<int>& batch) {
    double acc = 0.0;
    for (int i : batch) acc += x[0] - (*c)[i];
    Eigen::VectorXd g(1);
    g[0] = acc / static_cast<double>(batch.size());
    return g;
  };
  return t;
}

StochasticTarget bridge_stochastic_target(const RegressionDataset& data, double mu,
                                          double lambda, double p, double eps0) {
  auto x = std::make_shared<Eigen::MatrixXd>(data.x_train);
  auto y = std::make_shared<Eigen::VectorXd>(data.y_train);

  StochasticTarget t;
  t.dim = data.n_features();
  t.n_records = static_cast<int>(data.n_train());
  // Every record loss carries the shared prior term, so batch averages keep it once.
  t.batch_potential = [x, y, mu, lambda, p](const Eigen::VectorXd& beta,
                                            const std::vector<int>& batch) {
    double acc = 0.0;
    for (int i : batch) {
      double r = (*y)[i] - x->row(i).dot(beta);
      acc += 0.5 * mu * r * r;
    }
    return acc / static_cast<double>(batch.size()) + lp_potential(beta, p, lambda);
  };
  t.batch_gradient = [x, y, mu, lambda, p, eps0](const Eigen::VectorXd& beta,
                                                 const std::vector<int>& batch) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(beta.size());
    for (int i : batch) {
      double r = (*y)[i] - x->row(i).dot(beta);
      g -= mu * r * x->row(i).transpose();
    }
    g /= static_cast<double>(batch.size());
    return (g + lp_gradient(beta, p, lambda, eps0)).eval();
  };
  return t;
}

void attach_numeric_density(Target& target, double xmin, double xmax, int n) {
  if (target.dim != 1) throw std::invalid_argument("attach_numeric_density: 1-D targets only");
  auto xs = std::make_shared<std::vector<double>>(n);
  auto cdf = std::make_shared<std::vector<double>>(n);
  double h = (xmax - xmin) / (n - 1);

  std::vector<double> u(n);
  Eigen::VectorXd xv(1);
  double umin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    (*xs)[i] = xmin + i * h;
    xv[0] = (*xs)[i];
    u[i] = target.potential(xv);
    umin = std::min(umin, u[i]);
  }
  (*cdf)[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    double wa = std::exp(umin - u[i - 1]);
    double wb = std::exp(umin - u[i]);
    (*cdf)[i] = (*cdf)[i - 1] + 0.5 * h * (wa + wb);
  }
  double z = (*cdf)[n - 1];
  for (int i = 0; i < n; ++i) (*cdf)[i] /= z;

  target.cdf = [xs, cdf](double x) {
    if (x <= xs->front()) return 0.0;
    if (x >= xs->back()) return 1.0;
    auto it = std::upper_bound(xs->begin(), xs->end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs->begin());
    double t = (x - (*xs)[i - 1]) / ((*xs)[i] - (*xs)[i - 1]);
    return (*cdf)[i - 1] + t * ((*cdf)[i] - (*cdf)[i - 1]);
  };
  target.quantile = [xs, cdf](double v) {
    v = std::clamp(v, 0.0, 1.0);
    auto it = std::lower_bound(cdf->begin(), cdf->end(), v);
    if (it == cdf->begin()) return xs->front();
    if (it == cdf->end()) return xs->back();
    std::size_t i = static_cast<std::size_t>(it - cdf->begin());
    double c0 = (*cdf)[i - 1], c1 = (*cdf)[i];
    double t = c1 > c0 ? (v - c0) / (c1 - c0) : 0.0;
    return (*xs)[i - 1] + t * ((*xs)[i] - (*xs)[i - 1]);
  };
}

}  // namespace qhmc

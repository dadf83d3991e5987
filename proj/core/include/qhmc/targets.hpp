#pragma once

#include <vector>

#include <Eigen/Core>

#include "qhmc/dataset.hpp"
#include "qhmc/target.hpp"

namespace qhmc {

/// U(x) = lambda * sum_i |x_i|^p with the smoothed gradient
/// lambda * p * sign(x_i) / (|x_i|^{1-p} + eps0), sign(0) = +1.
/// Carries an exact CDF/quantile for d = 1.
Target lp_target(double p, double lambda, Eigen::Index d, double eps0 = 1e-8);

/// Piecewise flat-then-spiky well:
///   -x-3 (x<=-3); 0 (-3<x<=0); 8x(x-1) (0<x<=1); x-1 (x>1).
Target piecewise_well_target();

/// |x| + 999*x0 outside [-x0, x0], 1000|x| inside; continuous at +-x0 when
/// x0 = log(1001)/1000.
Target spiky_smooth_target(double x0);

/// U(x) = x^4 - 4x^2, minima at +-sqrt(2).
Target double_well_target();

/// U(x) = -x (x<0), 3x (x>=0). Exact CDF/quantile attached.
Target asymmetric_well_target();

/// U = 0.5 x^T Sigma^{-1} x for SPD Sigma.
Target gaussian_target(const Eigen::MatrixXd& sigma);

/// U = -log sum_i w_i exp(-0.5 x^T Sigma_i^{-1} x).
Target gaussian_mixture_target(const std::vector<double>& weights,
                               const std::vector<Eigen::MatrixXd>& sigmas);

/// U = 0.5 x^T A x for symmetric A (not necessarily PD; stability tests).
Target quadratic_target(const Eigen::MatrixXd& a);

/// Bridge regression posterior over coefficients beta:
///   mu/(2n) ||y - X beta||^2 + lambda ||beta||_p^p  (training split only).
Target bridge_target(const RegressionDataset& data, double mu, double lambda,
                     double p, double eps0 = 1e-8);

/// Stochastic view of a quadratic record decomposition: U_i(x) = 0.5(x - c_i)^2,
/// so the full-batch target is 0.5 (x - mean(c))^2 + const. Used for the
/// minibatched 1-D Gaussian experiments.
StochasticTarget quadratic_record_target(const Eigen::VectorXd& centers);

/// Stochastic view of bridge regression (per-row squared losses + shared prior).
StochasticTarget bridge_stochastic_target(const RegressionDataset& data, double mu,
                                          double lambda, double p, double eps0 = 1e-8);

/// Attach grid-quadrature CDF/quantile hooks to a 1-D target (for targets
/// with no closed-form normalization).
void attach_numeric_density(Target& target, double xmin, double xmax, int n = 20001);

}  // namespace qhmc

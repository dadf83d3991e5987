#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "qhmc/image.hpp"
#include "qhmc/sampler.hpp"

namespace qhmc {

struct HistogramSummary {
  std::vector<double> edges;    // size bins + 1
  std::vector<long> counts;     // size bins
  std::vector<double> density;  // normalized so the binned range integrates to 1
};

HistogramSummary histogram(const std::vector<double>& samples, double lo, double hi, int bins);

/// 1-D Wasserstein-1 between two sample sets. Equal counts pair sorted order
/// statistics; unequal counts fall back to the quantile grid.
double wasserstein1(std::vector<double> a, std::vector<double> b);

/// 1-D Wasserstein-1 between samples and an exact quantile function,
/// integrated on a uniform grid of quantile points.
double wasserstein1(std::vector<double> samples, const std::function<double(double)>& quantile,
                    int grid = 10000);

/// Fraction of chains whose trajectory has ever crossed the barrier (relative
/// to their starting side), evaluated at each multiple of check_interval.
std::vector<double> escape_ratio(const std::vector<Chain>& chains, double barrier,
                                 int check_interval);

struct MomentReport {
  std::vector<double> mean;  // per statistic
  std::vector<double> stdev;
};

/// Per-statistic mean +- std across repeated runs (rows = runs).
MomentReport moment_report(const std::vector<std::vector<double>>& runs);

/// 10*log10(1/MSE) for [0,1] images; capped at 100 dB when MSE < 1e-10.
double psnr(const ImageMatrix& reconstruction, const ImageMatrix& reference);

struct TestMseReport {
  double posterior_mean_mse = 0.0;        // MSE of the posterior-mean coefficients
  std::vector<double> per_sample_mse;     // MSE of each collected sample
};

TestMseReport test_mse(const Chain& coef_samples, const Eigen::MatrixXd& x_test,
                       const Eigen::VectorXd& y_test);

/// Total count over surviving (|w| >= threshold) count; infinity when all pruned.
double compression_rate(const Eigen::VectorXd& weights, double threshold);

}  // namespace qhmc

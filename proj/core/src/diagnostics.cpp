#include "qhmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qhmc {

HistogramSummary histogram(const std::vector<double>& samples, double lo, double hi,
                           int bins) {
  if (!(hi > lo) || bins < 1) throw std::invalid_argument("histogram: bad range or bins");
  HistogramSummary h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  h.density.assign(bins, 0.0);
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + i * width;
  long in_range = 0;
  for (double v : samples) {
    if (v < lo || v > hi) continue;
    int k = std::min(static_cast<int>((v - lo) / width), bins - 1);
    ++h.counts[k];
    ++in_range;
  }
  if (in_range > 0)
    for (int i = 0; i < bins; ++i)
      h.density[i] = static_cast<double>(h.counts[i]) / (in_range * width);
  return h;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1: empty sample set");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
    return total / a.size();
  }
  // Unequal counts: integrate |Qa - Qb| on a uniform quantile grid.
  const int grid = 10000;
  auto empirical_quantile = [](const std::vector<double>& s, double u) {
    double pos = u * (s.size() - 1);
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= s.size()) return s.back();
    double frac = pos - i;
    return s[i] * (1.0 - frac) + s[i + 1] * frac;
  };
  double total = 0.0;
  for (int k = 0; k < grid; ++k) {
    double u = (k + 0.5) / grid;
    total += std::abs(empirical_quantile(a, u) - empirical_quantile(b, u));
  }
  return total / grid;
}

double wasserstein1(std::vector<double> samples, const std::function<double(double)>& quantile,
                    int grid) {
  if (samples.empty()) throw std::invalid_argument("wasserstein1: empty sample set");
  if (grid < 1) throw std::invalid_argument("wasserstein1: grid must be >= 1");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  double total = 0.0;
  for (int k = 0; k < grid; ++k) {
    double u = (k + 0.5) / grid;
    // Empirical quantile: the order statistic covering quantile level u.
    std::size_t i = std::min(static_cast<std::size_t>(u * n), n - 1);
    total += std::abs(samples[i] - quantile(u));
  }
  return total / grid;
}

std::vector<double> escape_ratio(const std::vector<Chain>& chains, double barrier,
                                 int check_interval) {
  if (chains.empty()) throw std::invalid_argument("escape_ratio: no chains");
  if (check_interval < 1) throw std::invalid_argument("escape_ratio: bad interval");
  std::size_t min_len = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chains) min_len = std::min(min_len, c.samples.size());
  const int checks = static_cast<int>(min_len) / check_interval;

  std::vector<double> out;
  out.reserve(checks);
  std::vector<bool> escaped(chains.size(), false);
  std::size_t cursor = 0;
  for (int k = 1; k <= checks; ++k) {
    std::size_t upto = static_cast<std::size_t>(k) * check_interval;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      if (escaped[c]) continue;
      double start_side = chains[c].samples.front()[0] >= barrier ? 1.0 : -1.0;
      for (std::size_t i = cursor; i < upto; ++i) {
        double side = chains[c].samples[i][0] >= barrier ? 1.0 : -1.0;
        if (side != start_side) {
          escaped[c] = true;
          break;
        }
      }
    }
    cursor = upto;
    long n_escaped = std::count(escaped.begin(), escaped.end(), true);
    out.push_back(static_cast<double>(n_escaped) / chains.size());
  }
  return out;
}

MomentReport moment_report(const std::vector<std::vector<double>>& runs) {
  if (runs.empty()) throw std::invalid_argument("moment_report: no runs");
  const std::size_t k = runs.front().size();
  for (const auto& r : runs)
    if (r.size() != k) throw std::invalid_argument("moment_report: ragged runs");
  MomentReport rep;
  rep.mean.assign(k, 0.0);
  rep.stdev.assign(k, 0.0);
  for (const auto& r : runs)
    for (std::size_t j = 0; j < k; ++j) rep.mean[j] += r[j];
  for (std::size_t j = 0; j < k; ++j) rep.mean[j] /= runs.size();
  if (runs.size() > 1) {
    for (const auto& r : runs)
      for (std::size_t j = 0; j < k; ++j) {
        double d = r[j] - rep.mean[j];
        rep.stdev[j] += d * d;
      }
    for (std::size_t j = 0; j < k; ++j)
      rep.stdev[j] = std::sqrt(rep.stdev[j] / (runs.size() - 1));
  }
  return rep;
}

double psnr(const ImageMatrix& reconstruction, const ImageMatrix& reference) {
  if (reconstruction.rows() != reference.rows() || reconstruction.cols() != reference.cols())
    throw std::invalid_argument("psnr: shape mismatch");
  double mse = (reconstruction - reference).squaredNorm() / reference.size();
  if (mse < 1e-10) return 100.0;
  return 10.0 * std::log10(1.0 / mse);
}

TestMseReport test_mse(const Chain& coef_samples, const Eigen::MatrixXd& x_test,
                       const Eigen::VectorXd& y_test) {
  if (coef_samples.samples.empty()) throw std::invalid_argument("test_mse: empty chain");
  TestMseReport rep;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(coef_samples.samples.front().size());
  rep.per_sample_mse.reserve(coef_samples.samples.size());
  for (const auto& beta : coef_samples.samples) {
    mean += beta;
    rep.per_sample_mse.push_back((x_test * beta - y_test).squaredNorm() / y_test.size());
  }
  mean /= static_cast<double>(coef_samples.samples.size());
  rep.posterior_mean_mse = (x_test * mean - y_test).squaredNorm() / y_test.size();
  return rep;
}

double compression_rate(const Eigen::VectorXd& weights, double threshold) {
  long surviving = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (std::abs(weights[i]) >= threshold) ++surviving;
  if (surviving == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(weights.size()) / surviving;
}

}  // namespace qhmc

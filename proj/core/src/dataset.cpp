#include "qhmc/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qhmc {

RegressionDataset make_regression_dataset(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                          int n_train, std::uint64_t split_seed,
                                          std::vector<std::string> feature_names) {
  const int n = static_cast<int>(x.rows());
  if (y.size() != n) throw std::invalid_argument("make_regression_dataset: X/y row mismatch");
  if (n_train < 1 || n_train >= n)
    throw std::invalid_argument("make_regression_dataset: bad train size");

  // Seeded uniform shuffle (Fisher-Yates driven by the split seed).
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(split_seed, 7701);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform() * (i + 1));
    j = std::min(j, i);
    std::swap(order[i], order[j]);
  }

  RegressionDataset d;
  d.split_seed = split_seed;
  d.feature_names = std::move(feature_names);
  d.train_index.assign(order.begin(), order.begin() + n_train);
  d.test_index.assign(order.begin() + n_train, order.end());

  const Eigen::Index k = x.cols();
  d.x_train.resize(n_train, k);
  d.y_train.resize(n_train);
  d.x_test.resize(n - n_train, k);
  d.y_test.resize(n - n_train);
  for (int i = 0; i < n_train; ++i) {
    d.x_train.row(i) = x.row(d.train_index[i]);
    d.y_train[i] = y[d.train_index[i]];
  }
  for (int i = 0; i < n - n_train; ++i) {
    d.x_test.row(i) = x.row(d.test_index[i]);
    d.y_test[i] = y[d.test_index[i]];
  }

  // Standardize every column (and the response) with training statistics.
  d.feature_mean = d.x_train.colwise().mean();
  d.feature_std.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double var = (d.x_train.col(j).array() - d.feature_mean[j]).square().sum() / (n_train - 1);
    d.feature_std[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    d.x_train.col(j) = (d.x_train.col(j).array() - d.feature_mean[j]) / d.feature_std[j];
    d.x_test.col(j) = (d.x_test.col(j).array() - d.feature_mean[j]) / d.feature_std[j];
  }
  d.y_mean = d.y_train.mean();
  double yvar = (d.y_train.array() - d.y_mean).square().sum() / (n_train - 1);
  d.y_std = yvar > 0.0 ? std::sqrt(yvar) : 1.0;
  d.y_train = (d.y_train.array() - d.y_mean) / d.y_std;
  d.y_test = (d.y_test.array() - d.y_mean) / d.y_std;
  return d;
}

RegressionDataset load_diabetes(const std::string& path, std::uint64_t split_seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_diabetes: cannot open " + path);

  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::vector<std::string> names;
  for (std::string tok; hs >> tok;) names.push_back(tok);
  if (names.size() != 11)
    throw std::runtime_error("load_diabetes: expected 10 attribute columns + Y");

  std::vector<std::array<double, 11>> rows;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ls(line);
    std::array<double, 11> row{};
    for (int j = 0; j < 11; ++j) {
      if (!(ls >> row[j]))
        throw std::runtime_error("load_diabetes: malformed row at line " +
                                 std::to_string(lineno));
    }
    double extra;
    if (ls >> extra)
      throw std::runtime_error("load_diabetes: too many columns at line " +
                               std::to_string(lineno));
    rows.push_back(row);
  }
  if (rows.size() != 442)
    throw std::runtime_error("load_diabetes: expected 442 rows, got " +
                             std::to_string(rows.size()));

  Eigen::MatrixXd x(rows.size(), 10);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < 10; ++j) x(i, j) = rows[i][j];
    y[i] = rows[i][10];
  }
  names.pop_back();  // Y
  return make_regression_dataset(x, y, 300, split_seed, std::move(names));
}

}  // namespace qhmc

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "qhmc/rng.hpp"

namespace qhmc {

/// Regression data with a seeded train/test split. Columns (and the response)
/// are standardized with training-split statistics.
struct RegressionDataset {
  Eigen::MatrixXd x_train, x_test;
  Eigen::VectorXd y_train, y_test;
  std::vector<int> train_index, test_index;
  Eigen::VectorXd feature_mean, feature_std;
  double y_mean = 0.0, y_std = 1.0;
  std::vector<std::string> feature_names;
  std::uint64_t split_seed = 0;

  Eigen::Index n_train() const { return x_train.rows(); }
  Eigen::Index n_features() const { return x_train.cols(); }
};

/// Build a standardized dataset from raw X/y with a seeded uniform shuffle split.
RegressionDataset make_regression_dataset(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                          int n_train, std::uint64_t split_seed,
                                          std::vector<std::string> feature_names = {});

/// Load the diabetes file (whitespace/tab-delimited, header row, 10 attribute
/// columns + Y, 442 rows) and split 300/142 with the given seed.
RegressionDataset load_diabetes(const std::string& path, std::uint64_t split_seed = 0);

}  // namespace qhmc

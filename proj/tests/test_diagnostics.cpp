#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "qhmc/diagnostics.hpp"
#include "qhmc/rng.hpp"
#include "qhmc/targets.hpp"

using namespace qhmc;

namespace {

Chain chain_from(const std::vector<double>& xs) {
  Chain ch;
  for (double x : xs) ch.samples.push_back(Eigen::VectorXd::Constant(1, x));
  return ch;
}

Chain chain_from_vectors(const std::vector<Eigen::VectorXd>& xs) {
  Chain ch;
  ch.samples = xs;
  return ch;
}

}  // namespace

TEST_CASE("histogram: density integrates to one over the binned range") {
  Rng rng(1);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(rng.normal());
  HistogramSummary h = histogram(xs, -4.0, 4.0, 40);
  REQUIRE(h.edges.size() == 41);
  REQUIRE(h.counts.size() == 40);
  REQUIRE(h.density.size() == 40);
  double integral = 0.0;
  long total = 0;
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    integral += h.density[i] * (h.edges[i + 1] - h.edges[i]);
    total += h.counts[i];
  }
  CHECK(std::abs(integral - 1.0) <= 1e-9);
  CHECK(total <= 5000);
}

TEST_CASE("wasserstein1: point masses and identical samples") {
  CHECK(wasserstein1({0.0}, {1.0}) == doctest::Approx(1.0));
  std::vector<double> xs = {0.3, -1.2, 4.0, 0.0};
  CHECK(wasserstein1(xs, xs) == doctest::Approx(0.0));
  CHECK_THROWS_AS(wasserstein1({}, {1.0}), std::invalid_argument);
}

TEST_CASE("wasserstein1: exact Laplace draws are close to the Laplace CDF") {
  Target t = lp_target(1.0, 1.0, 1);
  Rng rng(12);
  std::vector<double> xs;
  xs.reserve(100000);
  for (int i = 0; i < 100000; ++i) xs.push_back(t.quantile(rng.uniform()));
  CHECK(wasserstein1(xs, t.quantile) <= 0.02);
}

TEST_CASE("wasserstein1: metric properties on random triples") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a, b, c;
    for (int i = 0; i < 200; ++i) {
      a.push_back(rng.normal());
      b.push_back(1.0 + 0.5 * rng.normal());
      c.push_back(-0.7 + 2.0 * rng.normal());
    }
    double ab = wasserstein1(a, b), ba = wasserstein1(b, a);
    double bc = wasserstein1(b, c), ac = wasserstein1(a, c);
    CHECK(std::abs(ab - ba) <= 1e-9);
    CHECK(ac <= ab + bc + 1e-9);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("wasserstein1: the paired and quantile-grid code paths agree") {
  Rng rng(3);
  std::vector<double> a, b;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(rng.normal());
    b.push_back(0.4 + 1.3 * rng.normal());
  }
  double paired = wasserstein1(a, b);
  std::vector<double> b_short(b.begin(), b.end() - 1);  // force the grid path
  double grid = wasserstein1(a, b_short);
  CHECK(std::abs(paired - grid) <= 1e-3);
}

TEST_CASE("escape_ratio: static chains never escape") {
  std::vector<Chain> chains;
  for (int i = 0; i < 5; ++i)
    chains.push_back(chain_from(std::vector<double>(200, 1.0)));
  std::vector<double> curve = escape_ratio(chains, 0.0, 50);
  REQUIRE(curve.size() == 4);
  for (double f : curve) CHECK(f == 0.0);
}

TEST_CASE("escape_ratio: an early crossing counts from the first checkpoint on") {
  std::vector<double> crossing(200, 1.0);
  crossing[1] = -0.5;  // crosses at iteration 1, then returns
  std::vector<Chain> chains = {chain_from(crossing),
                               chain_from(std::vector<double>(200, 1.0))};
  std::vector<double> curve = escape_ratio(chains, 0.0, 50);
  REQUIRE(curve.size() == 4);
  for (double f : curve) CHECK(f == doctest::Approx(0.5));
}

TEST_CASE("escape_ratio: nondecreasing and bounded by one") {
  Rng rng(4);
  std::vector<Chain> chains;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> xs;
    double x = 1.0;
    for (int t = 0; t < 500; ++t) {
      x += 0.3 * rng.normal();
      xs.push_back(x);
    }
    chains.push_back(chain_from(xs));
  }
  std::vector<double> curve = escape_ratio(chains, 0.0, 50);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] >= curve[i - 1]);
  for (double f : curve) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
}

TEST_CASE("moment_report: identical runs have zero spread") {
  std::vector<std::vector<double>> runs(20, {1.5, -2.0});
  MomentReport rep = moment_report(runs);
  REQUIRE(rep.mean.size() == 2);
  CHECK(rep.mean[0] == doctest::Approx(1.5));
  CHECK(rep.mean[1] == doctest::Approx(-2.0));
  CHECK(rep.stdev[0] == doctest::Approx(0.0));
  CHECK(rep.stdev[1] == doctest::Approx(0.0));
}

TEST_CASE("moment_report: error bars shrink like one over root paths") {
  auto spread = [](int n, int reps, int seed) {
    std::vector<std::vector<double>> runs;
    Rng rng(static_cast<std::uint64_t>(seed));
    for (int r = 0; r < reps; ++r) {
      double m = 0.0;
      for (int i = 0; i < n; ++i) m += rng.normal();
      runs.push_back({m / n});
    }
    return moment_report(runs).stdev[0];
  };
  double base = spread(500, 200, 3);
  double quadrupled = spread(2000, 200, 4);
  double ratio = quadrupled / base;
  CHECK(ratio >= 0.4);
  CHECK(ratio <= 0.65);
}

TEST_CASE("moment_report: symmetric target mean sits within its error bars") {
  Target t = lp_target(1.0, 1.0, 1);
  std::vector<std::vector<double>> runs;
  Rng root(5);
  for (int r = 0; r < 20; ++r) {
    Rng rng = root.split(r);
    double m = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) m += t.quantile(rng.uniform());
    runs.push_back({m / n});
  }
  MomentReport rep = moment_report(runs);
  CHECK(std::abs(rep.mean[0]) <= 3.0 * rep.stdev[0]);
}

TEST_CASE("psnr: cap, formula, and uniform offset") {
  ImageMatrix img = ImageMatrix::Constant(10, 10, 0.4);
  CHECK(psnr(img, img) == doctest::Approx(100.0));

  ImageMatrix offset = img.array() + 0.1;
  CHECK(psnr(offset, img) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("psnr: strictly decreasing in the noise level") {
  Rng rng(6);
  ImageMatrix clean = ImageMatrix::NullaryExpr(20, 20, [&](Eigen::Index, Eigen::Index) {
    return 0.5 + 0.1 * rng.normal();
  });
  double previous = std::numeric_limits<double>::infinity();
  Rng noise(7);
  Eigen::MatrixXd z = Eigen::MatrixXd::NullaryExpr(20, 20, [&](Eigen::Index, Eigen::Index) {
    return noise.normal();
  });
  for (double level : {0.01, 0.02, 0.05, 0.1, 0.2}) {
    ImageMatrix noisy = clean + level * z;
    double db = psnr(noisy, clean);
    CHECK(db < previous);
    previous = db;
  }
}

TEST_CASE("test_mse: perfect fit and the zero-coefficient baseline") {
  Rng rng(8);
  Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(30, 4, [&](Eigen::Index, Eigen::Index) {
    return rng.normal();
  });
  Eigen::VectorXd beta_true = rng.normal_vector(4);
  Eigen::VectorXd y = x * beta_true;

  Chain perfect = chain_from_vectors({beta_true, beta_true, beta_true});
  TestMseReport rep = test_mse(perfect, x, y);
  CHECK(rep.posterior_mean_mse <= 1e-20);
  for (double m : rep.per_sample_mse) CHECK(m <= 1e-20);

  Chain zero = chain_from_vectors({Eigen::VectorXd::Zero(4)});
  TestMseReport rep0 = test_mse(zero, x, y);
  CHECK(rep0.posterior_mean_mse == doctest::Approx(y.squaredNorm() / 30.0).epsilon(1e-12));
}

TEST_CASE("test_mse: matches a direct recomputation on random chains") {
  Rng rng(9);
  Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(25, 3, [&](Eigen::Index, Eigen::Index) {
    return rng.normal();
  });
  Eigen::VectorXd y = rng.normal_vector(25);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::VectorXd> betas;
    int n_samples = 1 + static_cast<int>(rng.uniform() * 8);
    for (int i = 0; i < n_samples; ++i) betas.push_back(rng.normal_vector(3));
    Chain ch = chain_from_vectors(betas);
    TestMseReport rep = test_mse(ch, x, y);

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    for (const auto& b : betas) mean += b;
    mean /= static_cast<double>(betas.size());
    double expected = (y - x * mean).squaredNorm() / 25.0;
    CHECK(rep.posterior_mean_mse == doctest::Approx(expected).epsilon(1e-12));

    REQUIRE(rep.per_sample_mse.size() == betas.size());
    for (std::size_t i = 0; i < betas.size(); ++i) {
      double per = (y - x * betas[i]).squaredNorm() / 25.0;
      CHECK(rep.per_sample_mse[i] == doctest::Approx(per).epsilon(1e-12));
    }
  }
}

TEST_CASE("compression_rate: counting, no-op threshold, and the all-pruned sentinel") {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(1000);
  for (int i = 0; i < 100; ++i) w[i] = 0.5;
  CHECK(compression_rate(w, 0.01) == doctest::Approx(10.0));

  Rng rng(10);
  Eigen::VectorXd dense = rng.normal_vector(64);
  CHECK(compression_rate(dense, 0.0) == doctest::Approx(1.0));

  Eigen::VectorXd tiny = Eigen::VectorXd::Constant(8, 1e-6);
  CHECK(std::isinf(compression_rate(tiny, 0.01)));

  // Brute-force oracle on a random vector.
  Eigen::VectorXd v = rng.normal_vector(500);
  double threshold = 0.8;
  int surviving = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) >= threshold) ++surviving;
  REQUIRE(surviving > 0);
  CHECK(compression_rate(v, threshold) ==
        doctest::Approx(500.0 / surviving).epsilon(1e-12));
}

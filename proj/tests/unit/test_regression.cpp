#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace smacsim;

namespace {

Fold random_fold(std::size_t rows, std::size_t dim, std::uint64_t seed, double noise,
                 const std::vector<double>& w_true, double bias = 0.0) {
  Rng rng(seed);
  Fold f;
  std::vector<float> x(dim);
  for (std::size_t r = 0; r < rows; ++r) {
    double y = bias;
    for (std::size_t c = 0; c < dim; ++c) {
      x[c] = static_cast<float>(rng.uniform() * 2.0 - 1.0);
      y += w_true[c] * x[c];
    }
    f.push(x, y + noise * (rng.uniform() - 0.5));
  }
  return f;
}

// Normal equations in long double solved by Gauss-Jordan elimination with
// partial pivoting. Columns listed in `cols`; an intercept column is appended
// when `intercept` is set and left unpenalized.
std::vector<long double> gauss_jordan_ridge(const Fold& f, const std::vector<std::size_t>& cols, bool intercept,
                                            double lambda) {
  const std::size_t p = cols.size() + (intercept ? 1 : 0);
  std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
  auto feat = [&](std::size_t r, std::size_t k) -> long double {
    return k < cols.size() ? static_cast<long double>(f.at(r, cols[k])) : 1.0L;
  };
  for (std::size_t r = 0; r < f.rows(); ++r)
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) a[i][j] += feat(r, i) * feat(r, j);
      a[i][p] += feat(r, i) * static_cast<long double>(f.y[r]);
    }
  for (std::size_t i = 0; i < cols.size(); ++i) a[i][i] += lambda;
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const long double m = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= p; ++k) a[r][k] -= m * a[c][k];
    }
  }
  std::vector<long double> w(p);
  for (std::size_t i = 0; i < p; ++i) w[i] = a[i][p] / a[i][i];
  return w;
}

}  // namespace

TEST(Ridge, MatchesGaussJordanOracle) {
  const std::vector<double> w_true = {1.5, -2.0, 0.0, 0.75, 3.0, -0.5};
  for (double lambda : {0.0, 1e-3, 0.5, 10.0}) {
    const Fold f = random_fold(3000, 6, 42, 0.3, w_true, 0.7);
    const LinearModel m = fit_ridge(f, ColumnPlan::all(6), lambda);
    ASSERT_TRUE(m.intercept);
    ASSERT_EQ(m.columns.size(), 6u);
    const auto oracle = gauss_jordan_ridge(f, m.columns, true, lambda);
    for (std::size_t i = 0; i < oracle.size(); ++i)
      EXPECT_NEAR(m.weights[static_cast<Eigen::Index>(i)], static_cast<double>(oracle[i]), 1e-9) << "lambda " << lambda;
  }
}

TEST(Ridge, ThreeRowHandCase) {
  Fold f;
  f.push(std::vector<float>{1.0f}, 2.0);
  f.push(std::vector<float>{2.0f}, 4.0);
  f.push(std::vector<float>{3.0f}, 6.5);
  const LinearModel m = fit_ridge(f, ColumnPlan::all(1), 0.0);
  ASSERT_TRUE(m.intercept);
  EXPECT_NEAR(m.weights[0], 2.25, 1e-12);
  EXPECT_NEAR(m.weights[1], -1.0 / 3.0, 1e-12);
  const auto pred = m.predict(f);
  const auto s = score(pred, f.y);
  EXPECT_NEAR(s.eps_rmse, 1.0 / std::sqrt(72.0), 1e-12);
  EXPECT_NEAR(s.eps_abs, 1.0 / 9.0, 1e-12);
  EXPECT_NEAR(s.q_bar, 12.5 / 3.0, 1e-12);
  EXPECT_NEAR(s.ratio, (1.0 / std::sqrt(72.0)) / (12.5 / 3.0), 1e-12);
  EXPECT_EQ(s.n, 3u);
}

TEST(Ridge, UnpenalizedColumnReplacesTheIntercept) {
  // column 1 is a constant one-hot (a single timestep), left unpenalized
  Fold f;
  Rng rng(1);
  for (int r = 0; r < 200; ++r) {
    const float x = static_cast<float>(rng.uniform());
    f.push(std::vector<float>{x, 1.0f}, 4.0 * x + 10.0);
  }
  ColumnPlan plan = ColumnPlan::all(2);
  plan.penalize[1] = 0;
  const LinearModel m = fit_ridge(f, plan, 1e-3);
  EXPECT_FALSE(m.intercept);
  EXPECT_NEAR(m.weights[1], 10.0, 1e-3);
}

TEST(Ridge, DropsZeroAndMaskedColumns) {
  Fold f;
  Rng rng(2);
  for (int r = 0; r < 100; ++r) {
    const float a = static_cast<float>(rng.uniform());
    const float b = static_cast<float>(rng.uniform());
    f.push(std::vector<float>{a, 0.0f, b}, 2.0 * a + b);
  }
  LinearModel m = fit_ridge(f, ColumnPlan::all(3), 0.0);
  EXPECT_EQ(m.columns, (std::vector<std::size_t>{0, 2}));
  ColumnPlan plan = ColumnPlan::all(3);
  plan.use[2] = 0;
  m = fit_ridge(f, plan, 0.0);
  EXPECT_EQ(m.columns, (std::vector<std::size_t>{0}));
}

TEST(Ridge, AllZeroWithoutRegularizationIsAnError) {
  Fold f;
  for (int r = 0; r < 5; ++r) f.push(std::vector<float>{0.0f, 0.0f}, r);
  EXPECT_THROW(fit_ridge(f, ColumnPlan::all(2), 0.0), RegressionError);
  // with regularization the fit falls back to the mean
  const LinearModel m = fit_ridge(f, ColumnPlan::all(2), 1e-3);
  EXPECT_NEAR(m.predict(f.row(0)), 2.0, 1e-12);
  EXPECT_THROW(fit_ridge(f, ColumnPlan::all(3), 1e-3), RegressionError);
  EXPECT_THROW(fit_ridge(Fold{}, ColumnPlan::all(0), 1e-3), RegressionError);
  EXPECT_THROW(f.push(std::vector<float>{1.0f}, 0.0), LayoutError);
}

TEST(Ridge, DuplicateColumnsStillSolve) {
  Fold f;
  Rng rng(3);
  for (int r = 0; r < 50; ++r) {
    const float a = static_cast<float>(rng.uniform());
    f.push(std::vector<float>{a, a}, 3.0 * a);
  }
  const LinearModel m = fit_ridge(f, ColumnPlan::all(2), 0.0);
  EXPECT_NEAR(m.weights[0], m.weights[1], 1e-6);
  EXPECT_NEAR(m.predict(f.row(7)), f.y[7], 1e-6);
}

TEST(Score, DeltaRatioHandExample) {
  RegressionMetrics masked, nothing;
  masked.q_bar = 2.0;
  masked.eps_rmse = 0.5;
  nothing.q_bar = 2.0;
  nothing.eps_rmse = 0.3;
  EXPECT_NEAR(delta_ratio(masked, nothing), 0.1, 1e-15);
  const std::vector<double> y = {1, 2, 3};
  EXPECT_THROW(score(std::vector<double>{1, 2}, y), RegressionError);
  EXPECT_TRUE(std::isnan(score(std::vector<double>{0, 0}, std::vector<double>{1, -1}).ratio));
}

TEST(Mlp, BeatsTheMeanOnANonlinearTarget) {
  Rng rng(9);
  Fold tr, va;
  for (int r = 0; r < 3000; ++r) {
    const float a = static_cast<float>(rng.uniform() * 2 - 1);
    const float b = static_cast<float>(rng.uniform() * 2 - 1);
    (r < 2000 ? tr : va).push(std::vector<float>{a, b}, std::sin(3.0 * a) + b * b);
  }
  MlpConfig cfg;
  cfg.max_epochs = 150;
  const MlpModel m = fit_mlp(tr, va, ColumnPlan::all(2), cfg);
  const auto s = score(m.predict(va), va.y);
  double mean = 0.0, var = 0.0;
  for (double v : va.y) mean += v;
  mean /= static_cast<double>(va.rows());
  for (double v : va.y) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(va.rows()));
  EXPECT_LT(s.eps_rmse, 0.3 * sd);
  EXPECT_LE(m.epochs_trained, 150);
}

TEST(Mlp, DeterministicAndCapped) {
  const Fold tr = random_fold(600, 3, 1, 0.1, {1.0, -1.0, 0.5});
  const Fold va = random_fold(200, 3, 2, 0.1, {1.0, -1.0, 0.5});
  MlpConfig cfg;
  cfg.max_epochs = 20;
  cfg.seed = 4;
  const MlpModel a = fit_mlp(tr, va, ColumnPlan::all(3), cfg);
  const MlpModel b = fit_mlp(tr, va, ColumnPlan::all(3), cfg);
  EXPECT_EQ(a.predict(va), b.predict(va));
  EXPECT_LE(a.epochs_trained, 20);
  cfg.seed = 5;
  EXPECT_NE(fit_mlp(tr, va, ColumnPlan::all(3), cfg).predict(va), a.predict(va));
}

// Training error can only grow as columns are removed from a least-squares
// fit: the smaller model's solution is feasible for the larger one.
TEST(Ridge, MoreFeaturesNeverFitTrainingWorse) {
  const Fold f = random_fold(500, 5, 7, 1.0, {1, 2, 3, 4, 5});
  double prev = -1.0;
  for (std::size_t keep = 5; keep >= 1; --keep) {
    ColumnPlan plan = ColumnPlan::all(5);
    for (std::size_t c = keep; c < 5; ++c) plan.use[c] = 0;
    const auto m = fit_ridge(f, plan, 0.0);
    const double rmse = score(m.predict(f), f.y).eps_rmse;
    EXPECT_GE(rmse, prev - 1e-12);
    prev = rmse;
  }
}

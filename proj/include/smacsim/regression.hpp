#pragma once

// Regressors for the feature-inferrability analysis: closed-form ridge over
// the normal equations (default) and a one-hidden-layer network trained with
// Adam and validation early stopping (opt-in).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "smacsim/errors.hpp"
#include "smacsim/rng.hpp"

namespace smacsim {

// Row-major design matrix in single precision plus double targets.
struct Fold {
  std::size_t dim = 0;
  std::vector<float> x;
  std::vector<double> y;

  std::size_t rows() const { return y.size(); }
  const float* row(std::size_t r) const { return x.data() + r * dim; }
  float at(std::size_t r, std::size_t c) const { return x[r * dim + c]; }

  void push(std::span<const float> features, double target) {
    if (dim == 0 && y.empty()) dim = features.size();
    if (features.size() != dim) throw LayoutError("row of length " + std::to_string(features.size()) +
                                                  " in a fold of width " + std::to_string(dim));
    x.insert(x.end(), features.begin(), features.end());
    y.push_back(target);
  }
};

struct RegressionMetrics {
  double q_bar = 0.0;
  double eps_rmse = 0.0;
  double eps_abs = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();        // eps_rmse / q_bar
  double delta_ratio = std::numeric_limits<double>::quiet_NaN();  // (eps_rmse - eps_rmse_nothing) / q_bar
  std::size_t n = 0;

  nlohmann::json to_json() const {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"q_bar", q_bar}, {"eps_rmse", eps_rmse}, {"eps_rmse_over_q_bar", num(ratio)},
            {"eps_abs", eps_abs}, {"delta_ratio", num(delta_ratio)}, {"n", n}};
  }
};

inline RegressionMetrics score(std::span<const double> pred, std::span<const double> y) {
  if (pred.size() != y.size() || y.empty()) throw RegressionError("score: empty or mismatched prediction vector");
  RegressionMetrics m;
  m.n = y.size();
  double se = 0.0, ae = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = pred[i] - y[i];
    se += d * d;
    ae += std::abs(d);
    sum += y[i];
  }
  const auto n = static_cast<double>(y.size());
  m.q_bar = sum / n;
  m.eps_rmse = std::sqrt(se / n);
  m.eps_abs = ae / n;
  if (m.q_bar != 0.0) m.ratio = m.eps_rmse / m.q_bar;
  return m;
}

// Column roles for a fit. `use[c]` false drops the column (masked features);
// `penalize[c]` false exempts it from the ridge penalty (timestep channels).
struct ColumnPlan {
  std::vector<char> use;
  std::vector<char> penalize;

  static ColumnPlan all(std::size_t dim) { return {std::vector<char>(dim, 1), std::vector<char>(dim, 1)}; }
};

struct LinearModel {
  std::vector<std::size_t> columns;
  Eigen::VectorXd weights;  // one per column, then the intercept if present
  bool intercept = false;

  double predict(const float* row) const {
    double s = intercept ? weights[static_cast<Eigen::Index>(columns.size())] : 0.0;
    for (std::size_t k = 0; k < columns.size(); ++k) s += weights[static_cast<Eigen::Index>(k)] * row[columns[k]];
    return s;
  }

  std::vector<double> predict(const Fold& f) const {
    std::vector<double> out(f.rows());
    for (std::size_t r = 0; r < f.rows(); ++r) out[r] = predict(f.row(r));
    return out;
  }
};

namespace detail {

// Usable columns: requested by the plan and not identically zero on `train`.
inline std::vector<std::size_t> live_columns(const Fold& train, const ColumnPlan& plan) {
  std::vector<char> nonzero(train.dim, 0);
  for (std::size_t r = 0; r < train.rows(); ++r) {
    const float* row = train.row(r);
    for (std::size_t c = 0; c < train.dim; ++c)
      if (row[c] != 0.0f) nonzero[c] = 1;
  }
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < train.dim; ++c)
    if (plan.use[c] && nonzero[c]) cols.push_back(c);
  return cols;
}

}  // namespace detail

// Minimizes ||Xw - y||^2 + lambda * ||w_penalized||^2. All-zero columns are
// dropped. An unpenalized intercept is added when no unpenalized column
// survives (the timestep one-hot already spans the constant).
inline LinearModel fit_ridge(const Fold& train, const ColumnPlan& plan, double lambda) {
  if (train.rows() == 0) throw RegressionError("ridge: empty training fold");
  if (plan.use.size() != train.dim || plan.penalize.size() != train.dim)
    throw RegressionError("ridge: column plan does not match the fold width");
  if (lambda < 0.0) throw RegressionError("ridge: negative regularization");

  LinearModel m;
  m.columns = detail::live_columns(train, plan);
  if (m.columns.empty() && lambda == 0.0)
    throw RegressionError("ridge: every feature column is zero and regularization is 0");
  m.intercept = std::none_of(m.columns.begin(), m.columns.end(), [&](std::size_t c) { return !plan.penalize[c]; });

  const auto k = static_cast<Eigen::Index>(m.columns.size());
  const Eigen::Index p = k + (m.intercept ? 1 : 0);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);

  constexpr std::size_t kBlock = 2048;
  Eigen::MatrixXd block;
  Eigen::VectorXd yb;
  for (std::size_t start = 0; start < train.rows(); start += kBlock) {
    const std::size_t end = std::min(train.rows(), start + kBlock);
    const auto nb = static_cast<Eigen::Index>(end - start);
    block.resize(nb, p);
    yb.resize(nb);
    for (Eigen::Index r = 0; r < nb; ++r) {
      const float* row = train.row(start + static_cast<std::size_t>(r));
      for (Eigen::Index c = 0; c < k; ++c) block(r, c) = row[m.columns[static_cast<std::size_t>(c)]];
      if (m.intercept) block(r, k) = 1.0;
      yb[r] = train.y[start + static_cast<std::size_t>(r)];
    }
    gram.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
    rhs.noalias() += block.transpose() * yb;
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  for (Eigen::Index c = 0; c < k; ++c)
    if (plan.penalize[m.columns[static_cast<std::size_t>(c)]]) gram(c, c) += lambda;

  if (lambda > 0.0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      m.weights = ldlt.solve(rhs);
      if (m.weights.allFinite()) return m;
    }
  }
  // Unregularized or rank-deficient: minimum-norm least squares.
  m.weights = gram.completeOrthogonalDecomposition().solve(rhs);
  if (!m.weights.allFinite()) throw RegressionError("ridge: solve produced non-finite weights");
  return m;
}

// ---------------------------------------------------------------------------
// Feed-forward regressor

struct MlpConfig {
  int hidden = 64;
  double learning_rate = 0.005;
  std::size_t batch_size = 512;
  int eval_every = 5;   // epochs between validation checks
  int patience = 10;    // checks without improvement before stopping
  int max_epochs = 500;
  std::uint64_t seed = 0;
};

struct MlpModel {
  std::vector<std::size_t> columns;
  Eigen::MatrixXd w1;  // hidden x in
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;
  double y_mean = 0.0;
  double y_scale = 1.0;
  int epochs_trained = 0;

  double predict(const float* row) const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) x[static_cast<Eigen::Index>(k)] = row[columns[k]];
    const Eigen::VectorXd h = (w1 * x + b1).array().tanh();
    return (w2.dot(h) + b2) * y_scale + y_mean;
  }

  std::vector<double> predict(const Fold& f) const {
    std::vector<double> out(f.rows());
    for (std::size_t r = 0; r < f.rows(); ++r) out[r] = predict(f.row(r));
    return out;
  }
};

namespace detail {

inline Eigen::MatrixXd gather(const Fold& f, const std::vector<std::size_t>& cols, std::span<const std::size_t> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(cols.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const float* row = f.row(rows[j]);
    for (std::size_t k = 0; k < cols.size(); ++k)
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = row[cols[k]];
  }
  return m;
}

inline double gaussian(Rng& rng) {
  // Box-Muller on two uniform draws.
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace detail

// MSE loss, Adam, mini-batches shuffled from a seeded stream. Validation MSE
// is checked every `eval_every` epochs; training stops after `patience`
// checks without improvement and the best weights are kept.
inline MlpModel fit_mlp(const Fold& train, const Fold& val, const ColumnPlan& plan, const MlpConfig& cfg) {
  if (train.rows() == 0 || val.rows() == 0) throw RegressionError("mlp: empty fold");
  if (plan.use.size() != train.dim) throw RegressionError("mlp: column plan does not match the fold width");

  MlpModel m;
  m.columns = detail::live_columns(train, plan);
  const auto in = static_cast<Eigen::Index>(m.columns.size());
  const auto hid = static_cast<Eigen::Index>(cfg.hidden);

  m.y_mean = std::accumulate(train.y.begin(), train.y.end(), 0.0) / static_cast<double>(train.rows());
  double var = 0.0;
  for (double v : train.y) var += (v - m.y_mean) * (v - m.y_mean);
  var /= static_cast<double>(train.rows());
  m.y_scale = var > 0.0 ? std::sqrt(var) : 1.0;

  Rng rng(derive_seed(cfg.seed, Stream::policy));
  const double init = in > 0 ? 1.0 / std::sqrt(static_cast<double>(in)) : 0.0;
  m.w1.resize(hid, in);
  for (Eigen::Index i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = detail::gaussian(rng) * init;
  m.b1 = Eigen::VectorXd::Zero(hid);
  m.w2.resize(hid);
  for (Eigen::Index i = 0; i < hid; ++i) m.w2[i] = detail::gaussian(rng) / std::sqrt(static_cast<double>(hid));

  struct Moments {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1, w2;
    double b2 = 0.0;
  };
  Moments mo{Eigen::MatrixXd::Zero(hid, in), Eigen::VectorXd::Zero(hid), Eigen::VectorXd::Zero(hid), 0.0};
  Moments ve = mo;
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long long t = 0;

  std::vector<std::size_t> order(train.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> all_val(val.rows());
  std::iota(all_val.begin(), all_val.end(), std::size_t{0});
  const Eigen::MatrixXd xv = detail::gather(val, m.columns, all_val);

  auto val_mse = [&](const MlpModel& model) {
    const Eigen::MatrixXd h = ((model.w1 * xv).colwise() + model.b1).array().tanh();
    const Eigen::VectorXd pred = ((h.transpose() * model.w2).array() + model.b2) * model.y_scale + model.y_mean;
    double se = 0.0;
    for (std::size_t r = 0; r < val.rows(); ++r) {
      const double d = pred[static_cast<Eigen::Index>(r)] - val.y[r];
      se += d * d;
    }
    return se / static_cast<double>(val.rows());
  };

  MlpModel best = m;
  double best_mse = val_mse(m);
  int bad_checks = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const auto nb = static_cast<double>(idx.size());
      const Eigen::MatrixXd x = detail::gather(train, m.columns, idx);
      Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t j = 0; j < idx.size(); ++j) y[static_cast<Eigen::Index>(j)] = (train.y[idx[j]] - m.y_mean) / m.y_scale;

      const Eigen::MatrixXd h = ((m.w1 * x).colwise() + m.b1).array().tanh();
      const Eigen::VectorXd pred = (h.transpose() * m.w2).array() + m.b2;
      const Eigen::VectorXd dpred = 2.0 * (pred - y) / nb;
      const Eigen::VectorXd gw2 = h * dpred;
      const double gb2 = dpred.sum();
      const Eigen::MatrixXd dh = (m.w2 * dpred.transpose()).array() * (1.0 - h.array().square());
      const Eigen::MatrixXd gw1 = dh * x.transpose();
      const Eigen::VectorXd gb1 = dh.rowwise().sum();

      ++t;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
      const double lr = cfg.learning_rate;
      auto adam = [&](auto& param, auto& mom, auto& vel, const auto& grad) {
        mom = beta1 * mom + (1.0 - beta1) * grad;
        vel = beta2 * vel + (1.0 - beta2) * grad.cwiseProduct(grad);
        param.array() -= lr * (mom.array() / c1) / ((vel.array() / c2).sqrt() + eps);
      };
      adam(m.w1, mo.w1, ve.w1, gw1);
      adam(m.b1, mo.b1, ve.b1, gb1);
      adam(m.w2, mo.w2, ve.w2, gw2);
      mo.b2 = beta1 * mo.b2 + (1.0 - beta1) * gb2;
      ve.b2 = beta2 * ve.b2 + (1.0 - beta2) * gb2 * gb2;
      m.b2 -= lr * (mo.b2 / c1) / (std::sqrt(ve.b2 / c2) + eps);
    }
    m.epochs_trained = epoch;
    if (epoch % cfg.eval_every != 0) continue;
    const double mse = val_mse(m);
    if (mse < best_mse) {
      best_mse = mse;
      best = m;
      bad_checks = 0;
    } else if (++bad_checks >= cfg.patience) {
      break;
    }
  }
  best.epochs_trained = m.epochs_trained;
  return best;
}

}  // namespace smacsim

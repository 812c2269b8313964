#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sensopt/pde.hpp"
#include "sensopt/predictor.hpp"
#include "sensopt/rng.hpp"

namespace sensopt {

/// Training pairs as matrix columns: Y.col(s) is the one-step target of X.col(s).
struct Dataset {
  Eigen::MatrixXd X, Y;

  int size() const { return static_cast<int>(X.cols()); }
};

/// Consecutive pairs (z_k, z_{k+1}) across all trajectories, in trajectory
/// order then time order.
inline Dataset make_dataset(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("make_dataset: no trajectories");
  int n = 0;
  for (const auto& t : trajectories) {
    if (t.K() < 1) throw std::invalid_argument("make_dataset: trajectory has < 2 snapshots");
    n += t.K();
  }
  const int c = static_cast<int>(trajectories.front().snapshots.front().size());
  Dataset d;
  d.X.resize(c, n);
  d.Y.resize(c, n);
  int s = 0;
  for (const auto& t : trajectories)
    for (int k = 0; k < t.K(); ++k, ++s) {
      d.X.col(s) = t.snapshots[k];
      d.Y.col(s) = t.snapshots[k + 1];
    }
  return d;
}

/// Extension for second-order dynamics: inputs are stacked (z_k, z_{k-1}),
/// targets z_{k+1}, so pairing starts at k = 1. For Dense2History only; the
/// one-step cost path does not use this.
inline Dataset make_history_dataset(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("make_dataset: no trajectories");
  int n = 0;
  for (const auto& t : trajectories) {
    if (t.K() < 2) throw std::invalid_argument("history dataset: trajectory has < 3 snapshots");
    n += t.K() - 1;
  }
  const int c = static_cast<int>(trajectories.front().snapshots.front().size());
  Dataset d;
  d.X.resize(2 * c, n);
  d.Y.resize(c, n);
  int s = 0;
  for (const auto& t : trajectories)
    for (int k = 1; k < t.K(); ++k, ++s) {
      d.X.col(s).head(c) = t.snapshots[k];
      d.X.col(s).tail(c) = t.snapshots[k - 1];
      d.Y.col(s) = t.snapshots[k + 1];
    }
  return d;
}

struct TrainingConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 2000;
  int batch_size = 0;  // 0 = full dataset
  std::uint64_t rng_seed = 42;
  double validation_fraction = 0.0;

  void validate() const {
    if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
    if (beta1 <= 0 || beta1 >= 1 || beta2 <= 0 || beta2 >= 1)
      throw std::invalid_argument("Adam betas must lie in (0, 1)");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (validation_fraction < 0 || validation_fraction >= 1)
      throw std::invalid_argument("validation_fraction must lie in [0, 1)");
  }
};

struct TrainResult {
  PredictorModel model;
  std::vector<double> loss_history;  // training MSE after each epoch
  std::vector<double> val_history;   // empty when validation_fraction == 0
};

namespace detail {

// One flat parameter vector view keeps the Adam loop arch-agnostic.
struct AdamState {
  Eigen::VectorXd m, v;
  int t = 0;

  explicit AdamState(int n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

  void update(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad,
              const TrainingConfig& cfg) {
    ++t;
    m = cfg.beta1 * m + (1 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1 - cfg.beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1 - std::pow(cfg.beta1, t);
    const double bc2 = 1 - std::pow(cfg.beta2, t);
    params -= (cfg.learning_rate / bc1) * m.cwiseQuotient(
                  ((v / bc2).cwiseSqrt().array() + cfg.epsilon).matrix());
  }
};

inline double mse(const PredictorModel& m, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  double acc = 0.0;
  if (m.arch == Arch::Conv1) {
    for (int s = 0; s < X.cols(); ++s)
      acc += (predict(m, X.col(s)) - Y.col(s)).squaredNorm();
  } else {
    acc = ((m.W2 * ((m.W1 * X).colwise() + m.b1)).colwise() + m.b2 - Y).squaredNorm();
  }
  return acc / (static_cast<double>(X.cols()) * Y.rows());
}

inline void dense_gradients(const PredictorModel& m, const Eigen::MatrixXd& X,
                            const Eigen::MatrixXd& Y, Eigen::MatrixXd& gW1,
                            Eigen::VectorXd& gb1, Eigen::MatrixXd& gW2,
                            Eigen::VectorXd& gb2) {
  const Eigen::MatrixXd H = (m.W1 * X).colwise() + m.b1;
  const Eigen::MatrixXd R = ((m.W2 * H).colwise() + m.b2) - Y;
  const double scale = 2.0 / (static_cast<double>(X.cols()) * Y.rows());
  const Eigen::MatrixXd gP = scale * R;
  gW2.noalias() = gP * H.transpose();
  gb2 = gP.rowwise().sum();
  const Eigen::MatrixXd gH = m.W2.transpose() * gP;
  gW1.noalias() = gH * X.transpose();
  gb1 = gH.rowwise().sum();
}

inline void conv_gradients(const PredictorModel& m, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Y, Eigen::Matrix3d& gF, double& gB) {
  gF.setZero();
  gB = 0.0;
  const double scale = 2.0 / (static_cast<double>(X.cols()) * Y.rows());
  const int nx = m.nx, ny = m.ny;
  for (int s = 0; s < X.cols(); ++s) {
    const Eigen::VectorXd r = predict(m, X.col(s)) - Y.col(s);
    gB += scale * r.sum();
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const double g = scale * r(iy * nx + ix);
        if (g == 0.0) continue;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int jy = iy + dy, jx = ix + dx;
            if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
            gF(dy + 1, dx + 1) += g * X(jy * nx + jx, s);
          }
      }
  }
}

}  // namespace detail

/// Adam on the MSE (mean over pairs and components). Parameters are
/// re-initialized Glorot-uniform from cfg.rng_seed, so identical cfg + seed +
/// dataset reproduce identical parameters bit-for-bit.
inline TrainResult train(PredictorModel model, const Dataset& data, const TrainingConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
  if (data.X.rows() != model.input_size() || data.Y.rows() != model.c)
    throw std::invalid_argument("train: dataset shape does not match arch");

  glorot_init(model, cfg.rng_seed);
  Rng shuffle_rng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ull);

  const int n_total = data.size();
  int n_val = static_cast<int>(std::lround(cfg.validation_fraction * n_total));
  if (n_val >= n_total) n_val = n_total - 1;
  const int n_train = n_total - n_val;
  const Eigen::MatrixXd Xtr = data.X.leftCols(n_train);
  const Eigen::MatrixXd Ytr = data.Y.leftCols(n_train);

  TrainResult result;
  result.loss_history.reserve(cfg.epochs);

  const bool conv = model.arch == Arch::Conv1;
  const int batch = (cfg.batch_size <= 0 || cfg.batch_size >= n_train) ? n_train
                                                                       : cfg.batch_size;
  std::vector<int> order(n_train);
  std::iota(order.begin(), order.end(), 0);

  detail::AdamState adamW1(conv ? 9 : static_cast<int>(model.W1.size()));
  detail::AdamState adamb1(conv ? 1 : model.c);
  detail::AdamState adamW2(conv ? 0 : static_cast<int>(model.W2.size()));
  detail::AdamState adamb2(conv ? 0 : model.c);

  Eigen::MatrixXd gW1, gW2;
  Eigen::VectorXd gb1, gb2;
  Eigen::Matrix3d gF;
  double gB = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n_train) {
      for (int i = n_train - 1; i > 0; --i) {  // Fisher-Yates, seeded
        const int j = static_cast<int>(shuffle_rng.raw() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
      }
    }
    for (int start = 0; start < n_train; start += batch) {
      const int len = std::min(batch, n_train - start);
      Eigen::MatrixXd Xb, Yb;
      if (len == n_train) {
        Xb = Xtr;
        Yb = Ytr;
      } else {
        Xb.resize(Xtr.rows(), len);
        Yb.resize(Ytr.rows(), len);
        for (int i = 0; i < len; ++i) {
          Xb.col(i) = Xtr.col(order[start + i]);
          Yb.col(i) = Ytr.col(order[start + i]);
        }
      }
      if (conv) {
        detail::conv_gradients(model, Xb, Yb, gF, gB);
        Eigen::VectorXd fparams = Eigen::Map<Eigen::VectorXd>(model.filter.data(), 9);
        adamW1.update(fparams, Eigen::Map<Eigen::VectorXd>(gF.data(), 9), cfg);
        model.filter = Eigen::Map<Eigen::Matrix3d>(fparams.data());
        Eigen::VectorXd bparam(1), gb(1);
        bparam(0) = model.bias;
        gb(0) = gB;
        adamb1.update(bparam, gb, cfg);
        model.bias = bparam(0);
      } else {
        detail::dense_gradients(model, Xb, Yb, gW1, gb1, gW2, gb2);
        Eigen::Map<Eigen::VectorXd> w1(model.W1.data(), model.W1.size());
        Eigen::Map<Eigen::VectorXd> w2(model.W2.data(), model.W2.size());
        adamW1.update(w1, Eigen::Map<Eigen::VectorXd>(gW1.data(), gW1.size()), cfg);
        adamb1.update(model.b1, gb1, cfg);
        adamW2.update(w2, Eigen::Map<Eigen::VectorXd>(gW2.data(), gW2.size()), cfg);
        adamb2.update(model.b2, gb2, cfg);
      }
    }
    const double loss = detail::mse(model, Xtr, Ytr);
    if (!std::isfinite(loss))
      throw std::runtime_error("training diverged (non-finite loss); lower the learning rate");
    result.loss_history.push_back(loss);
    if (n_val > 0)
      result.val_history.push_back(
          detail::mse(model, data.X.rightCols(n_val), data.Y.rightCols(n_val)));
  }
  result.model = std::move(model);
  return result;
}

}  // namespace sensopt

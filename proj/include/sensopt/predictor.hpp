#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "sensopt/rng.hpp"
#include "sensopt/version.hpp"

namespace sensopt {

enum class Arch {
  Dense2,         // two dense layers, linear activation: f(x) = W2 (W1 x + b1) + b2
  Conv1,          // single 3x3 filter, zero padding, scalar bias (2D fields)
  Dense2History,  // extension: Dense2 on a stacked (z_k, z_{k-1}) input of length 2c
};

inline std::string to_string(Arch a) {
  switch (a) {
    case Arch::Dense2: return "dense2";
    case Arch::Conv1: return "conv1";
    case Arch::Dense2History: return "dense2_history";
  }
  throw std::logic_error("unreachable");
}

inline Arch arch_from_string(const std::string& s) {
  if (s == "dense2") return Arch::Dense2;
  if (s == "conv1") return Arch::Conv1;
  if (s == "dense2_history") return Arch::Dense2History;
  throw std::invalid_argument("unknown arch: " + s);
}

/// Affine one-step predictor f_n. Linear activations make every arch an
/// affine map x -> M x + b with constant M, which is what the cost module's
/// gradient relies on.
struct PredictorModel {
  Arch arch = Arch::Dense2;
  int c = 0;            // state length (output length for every arch)
  int nx = 0, ny = 0;   // field shape for Conv1 (nx * ny == c)

  // Dense2 / Dense2History parameters. W1 is c x c, or c x 2c for history.
  Eigen::MatrixXd W1, W2;
  Eigen::VectorXd b1, b2;

  // Conv1 parameters. filter(dy + 1, dx + 1) multiplies x(iy + dy, ix + dx).
  Eigen::Matrix3d filter = Eigen::Matrix3d::Zero();
  double bias = 0.0;

  int input_size() const { return arch == Arch::Dense2History ? 2 * c : c; }
};

inline PredictorModel make_dense2(int c) {
  PredictorModel m;
  m.arch = Arch::Dense2;
  m.c = c;
  m.W1 = Eigen::MatrixXd::Zero(c, c);
  m.W2 = Eigen::MatrixXd::Zero(c, c);
  m.b1 = Eigen::VectorXd::Zero(c);
  m.b2 = Eigen::VectorXd::Zero(c);
  return m;
}

inline PredictorModel make_conv1(int nx, int ny) {
  PredictorModel m;
  m.arch = Arch::Conv1;
  m.c = nx * ny;
  m.nx = nx;
  m.ny = ny;
  return m;
}

inline PredictorModel make_dense2_history(int c) {
  PredictorModel m = make_dense2(c);
  m.arch = Arch::Dense2History;
  m.W1 = Eigen::MatrixXd::Zero(c, 2 * c);
  return m;
}

/// Glorot-uniform parameter init (limit sqrt(6 / (fan_in + fan_out)), biases
/// zero). Conv fans use the receptive-field convention fan_in = fan_out = 9.
inline void glorot_init(PredictorModel& m, std::uint64_t seed) {
  Rng rng(seed);
  auto fill = [&](Eigen::Ref<Eigen::MatrixXd> W, double lim) {
    // Row-major fill order; part of the checkpoint/reproducibility contract.
    for (int i = 0; i < W.rows(); ++i)
      for (int j = 0; j < W.cols(); ++j) W(i, j) = rng.uniform(-lim, lim);
  };
  if (m.arch == Arch::Conv1) {
    Eigen::MatrixXd f(3, 3);
    fill(f, std::sqrt(6.0 / 18.0));
    m.filter = f;
    m.bias = 0.0;
  } else {
    fill(m.W1, std::sqrt(6.0 / (m.input_size() + m.c)));
    fill(m.W2, std::sqrt(6.0 / (m.c + m.c)));
    m.b1.setZero();
    m.b2.setZero();
  }
}

namespace detail {

inline Eigen::VectorXd conv3x3(const Eigen::VectorXd& x, const Eigen::Matrix3d& f, int nx,
                               int ny, bool flipped) {
  Eigen::VectorXd out(nx * ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int jy = flipped ? iy - dy : iy + dy;
          const int jx = flipped ? ix - dx : ix + dx;
          if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;  // zero padding
          acc += f(dy + 1, dx + 1) * x(jy * nx + jx);
        }
      out(iy * nx + ix) = acc;
    }
  return out;
}

}  // namespace detail

inline Eigen::VectorXd predict(const PredictorModel& m, const Eigen::VectorXd& x) {
  if (x.size() != m.input_size()) throw std::invalid_argument("predict: input length mismatch");
  if (m.arch == Arch::Conv1)
    return detail::conv3x3(x, m.filter, m.nx, m.ny, false).array() + m.bias;
  return m.W2 * (m.W1 * x + m.b1) + m.b2;
}

/// The constant input Jacobian of f_n, usable as an operator. Dense archs
/// carry the dense product W2 W1; Conv1 stays matrix-free so transpose
/// products never densify the banded stencil.
class InputJacobian {
 public:
  explicit InputJacobian(const PredictorModel& m) : conv_(m.arch == Arch::Conv1) {
    if (m.arch == Arch::Dense2History)
      throw std::logic_error("input_jacobian: history extension is not a one-step map");
    if (conv_) {
      filter_ = m.filter;
      nx_ = m.nx;
      ny_ = m.ny;
    } else {
      M_ = m.W2 * m.W1;
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    return conv_ ? detail::conv3x3(v, filter_, nx_, ny_, false) : Eigen::VectorXd(M_ * v);
  }

  Eigen::VectorXd applyT(const Eigen::VectorXd& v) const {
    return conv_ ? detail::conv3x3(v, filter_, nx_, ny_, true)
                 : Eigen::VectorXd(M_.transpose() * v);
  }

  Eigen::MatrixXd dense() const {
    if (!conv_) return M_;
    const int c = nx_ * ny_;
    Eigen::MatrixXd M(c, c);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(c);
    for (int j = 0; j < c; ++j) {
      e(j) = 1.0;
      M.col(j) = detail::conv3x3(e, filter_, nx_, ny_, false);
      e(j) = 0.0;
    }
    return M;
  }

 private:
  bool conv_;
  Eigen::MatrixXd M_;
  Eigen::Matrix3d filter_;
  int nx_ = 0, ny_ = 0;
};

inline InputJacobian input_jacobian(const PredictorModel& m) { return InputJacobian(m); }

/// Dense form of the affine map: predict(x) = effective_matrix * x + effective_bias.
inline Eigen::MatrixXd effective_matrix(const PredictorModel& m) {
  if (m.arch == Arch::Dense2History) return m.W2 * m.W1;  // c x 2c
  return input_jacobian(m).dense();
}

inline Eigen::VectorXd effective_bias(const PredictorModel& m) {
  if (m.arch == Arch::Conv1) return Eigen::VectorXd::Constant(m.c, m.bias);
  return m.W2 * m.b1 + m.b2;
}

// Checkpoints are JSON; doubles serialize with shortest-round-trip formatting,
// so save followed by load reproduces parameters bit-exactly.

inline void save_checkpoint(const PredictorModel& m, const std::string& path) {
  nlohmann::json j;
  j["format"] = "sensopt-model";
  j["version"] = kVersion;
  j["arch"] = to_string(m.arch);
  j["c"] = m.c;
  auto dump_mat = [](const Eigen::MatrixXd& M) {
    std::vector<std::vector<double>> rows(M.rows());
    for (int i = 0; i < M.rows(); ++i) {
      rows[i].resize(M.cols());
      for (int k = 0; k < M.cols(); ++k) rows[i][k] = M(i, k);
    }
    return rows;
  };
  if (m.arch == Arch::Conv1) {
    j["nx"] = m.nx;
    j["ny"] = m.ny;
    j["filter"] = dump_mat(m.filter);
    j["bias"] = m.bias;
  } else {
    j["W1"] = dump_mat(m.W1);
    j["b1"] = std::vector<double>(m.b1.data(), m.b1.data() + m.b1.size());
    j["W2"] = dump_mat(m.W2);
    j["b2"] = std::vector<double>(m.b2.data(), m.b2.data() + m.b2.size());
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump(2) << "\n";
}

inline PredictorModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "sensopt-model")
    throw std::runtime_error("not a model checkpoint: " + path);
  PredictorModel m;
  m.arch = arch_from_string(j.at("arch").get<std::string>());
  m.c = j.at("c").get<int>();
  auto load_mat = [&](const nlohmann::json& a, Eigen::MatrixXd& M) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    M.resize(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) M(i, k) = a[i][k].get<double>();
  };
  if (m.arch == Arch::Conv1) {
    m.nx = j.at("nx").get<int>();
    m.ny = j.at("ny").get<int>();
    Eigen::MatrixXd f;
    load_mat(j.at("filter"), f);
    m.filter = f;
    m.bias = j.at("bias").get<double>();
  } else {
    load_mat(j.at("W1"), m.W1);
    load_mat(j.at("W2"), m.W2);
    const auto b1 = j.at("b1").get<std::vector<double>>();
    const auto b2 = j.at("b2").get<std::vector<double>>();
    m.b1 = Eigen::Map<const Eigen::VectorXd>(b1.data(), b1.size());
    m.b2 = Eigen::Map<const Eigen::VectorXd>(b2.data(), b2.size());
  }
  return m;
}

}  // namespace sensopt

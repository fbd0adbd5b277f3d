#include "kgcast/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Dense>

#include "kgcast/dataset.hpp"
#include "kgcast/errors.hpp"
#include "kgcast/rng.hpp"

namespace kgcast {

namespace {

using Matrix = Eigen::MatrixXf;   // column-major; one sample per column below
using Vector = Eigen::VectorXf;

struct Net {
  std::vector<Matrix> w;
  std::vector<Vector> b;

  static Net from_params(const MlpParams& p) {
    Net net;
    for (size_t l = 0; l + 1 < p.dims.size(); ++l) {
      const int in = p.dims[l], out = p.dims[l + 1];
      Matrix m(out, in);
      for (int r = 0; r < out; ++r) {
        for (int c = 0; c < in; ++c) m(r, c) = p.weights[l][size_t(r) * size_t(in) + size_t(c)];
      }
      Vector v(out);
      for (int r = 0; r < out; ++r) v(r) = p.biases[l][size_t(r)];
      net.w.push_back(std::move(m));
      net.b.push_back(std::move(v));
    }
    return net;
  }

  void to_params(MlpParams& p) const {
    for (size_t l = 0; l < w.size(); ++l) {
      const int out = int(w[l].rows()), in = int(w[l].cols());
      for (int r = 0; r < out; ++r) {
        for (int c = 0; c < in; ++c) p.weights[l][size_t(r) * size_t(in) + size_t(c)] = w[l](r, c);
      }
      for (int r = 0; r < out; ++r) p.biases[l][size_t(r)] = b[l](r);
    }
  }

  double param_norm() const {
    double s = 0;
    for (const Matrix& m : w) s += double(m.squaredNorm());
    for (const Vector& v : b) s += double(v.squaredNorm());
    return std::sqrt(s);
  }
};

// Forward pass keeping pre-activations; the last layer output is a logit row.
void forward(const Net& net, const Matrix& x, std::vector<Matrix>& acts) {
  acts.assign(net.w.size() + 1, Matrix());
  acts[0] = x;
  for (size_t l = 0; l < net.w.size(); ++l) {
    Matrix z = (net.w[l] * acts[l]).colwise() + net.b[l];
    if (l + 1 < net.w.size()) z = z.cwiseMax(0.0f);  // ReLU on hidden layers
    acts[l + 1] = std::move(z);
  }
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double bce_loss(const Eigen::RowVectorXf& logits, const uint8_t* y) {
  double loss = 0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    double p = sigmoid(double(logits(i)));
    p = std::clamp(p, 1e-7, 1.0 - 1e-7);
    loss -= y[i] ? std::log(p) : std::log1p(-p);
  }
  return loss / double(logits.size());
}

struct Adam {
  std::vector<Matrix> mw, vw;
  std::vector<Vector> mb, vb;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  int64_t t = 0;

  explicit Adam(const Net& net) {
    for (const Matrix& m : net.w) {
      mw.emplace_back(Matrix::Zero(m.rows(), m.cols()));
      vw.emplace_back(Matrix::Zero(m.rows(), m.cols()));
    }
    for (const Vector& v : net.b) {
      mb.emplace_back(Vector::Zero(v.size()));
      vb.emplace_back(Vector::Zero(v.size()));
    }
  }

  void step(Net& net, const std::vector<Matrix>& gw, const std::vector<Vector>& gb, double lr) {
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, double(t));
    const double bc2 = 1.0 - std::pow(beta2, double(t));
    const float a1 = float(beta1), a2 = float(beta2);
    for (size_t l = 0; l < net.w.size(); ++l) {
      mw[l] = a1 * mw[l] + (1 - a1) * gw[l];
      vw[l] = a2 * vw[l] + (1 - a2) * gw[l].cwiseProduct(gw[l]);
      net.w[l] -= (float(lr) * (mw[l] / float(bc1)).array() / ((vw[l] / float(bc2)).array().sqrt() + float(eps)))
                      .matrix();
      mb[l] = a1 * mb[l] + (1 - a1) * gb[l];
      vb[l] = a2 * vb[l] + (1 - a2) * gb[l].cwiseProduct(gb[l]);
      net.b[l] -= (float(lr) * (mb[l] / float(bc1)).array() / ((vb[l] / float(bc2)).array().sqrt() + float(eps)))
                      .matrix();
    }
  }
};

Matrix gather_columns(const double* x, size_t cols, const std::vector<uint32_t>& rows) {
  Matrix m(Eigen::Index(cols), Eigen::Index(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    const double* src = x + size_t(rows[i]) * cols;
    for (size_t c = 0; c < cols; ++c) m(Eigen::Index(c), Eigen::Index(i)) = float(src[c]);
  }
  return m;
}

Matrix all_columns(const double* x, size_t rows, size_t cols) {
  Matrix m{Eigen::Index(cols), Eigen::Index(rows)};
  for (size_t i = 0; i < rows; ++i) {
    const double* src = x + i * cols;
    for (size_t c = 0; c < cols; ++c) m(Eigen::Index(c), Eigen::Index(i)) = float(src[c]);
  }
  return m;
}

double full_loss(const Net& net, const Matrix& x, const uint8_t* y) {
  std::vector<Matrix> acts;
  forward(net, x, acts);
  return bce_loss(acts.back().row(0), y);
}

}  // namespace

MlpParams init_mlp(int inputs, const std::vector<int>& hidden, uint64_t seed) {
  MlpParams p;
  p.dims.push_back(inputs);
  for (int h : hidden) {
    if (h < 1) throw ValidationError("hidden layer sizes must be positive");
    p.dims.push_back(h);
  }
  p.dims.push_back(1);

  for (size_t l = 0; l + 1 < p.dims.size(); ++l) {
    const int in = p.dims[l], out = p.dims[l + 1];
    Rng rng(derive_seed(seed, "mlp-layer", l));
    const double limit = 1.0 / std::sqrt(double(in));
    std::vector<float> w(size_t(out) * size_t(in));
    for (float& x : w) x = float(rng.uniform(-limit, limit));
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(size_t(out), 0.0f);
  }
  return p;
}

std::vector<double> mlp_predict(const MlpParams& params, const double* x, size_t rows, size_t cols) {
  if (params.dims.empty() || size_t(params.dims.front()) != cols)
    throw ValidationError("network expects " + std::to_string(params.dims.empty() ? 0 : params.dims.front()) +
                          " inputs, matrix has " + std::to_string(cols) + " columns");
  std::vector<double> scores(rows);
  if (rows == 0) return scores;
  const Net net = Net::from_params(params);

  constexpr size_t kBlock = 4096;
  std::vector<Matrix> acts;
  for (size_t start = 0; start < rows; start += kBlock) {
    const size_t n = std::min(kBlock, rows - start);
    Matrix block = all_columns(x + start * cols, n, cols);
    forward(net, block, acts);
    const auto& logits = acts.back();
    for (size_t i = 0; i < n; ++i) scores[start + i] = sigmoid(double(logits(0, Eigen::Index(i))));
  }
  return scores;
}

TrainCurves train_mlp(MlpParams& params, const double* train_x, const uint8_t* train_y, size_t n_train,
                      const double* test_x, const uint8_t* test_y, size_t n_test, size_t cols,
                      const MlpTrainConfig& cfg) {
  if (n_train == 0) throw ValidationError("cannot train on an empty training set");
  if (cfg.epochs < 1) throw ValidationError("epoch count must be at least 1");

  Net net = Net::from_params(params);
  Adam adam(net);
  std::vector<uint8_t> labels(train_y, train_y + n_train);
  BalancedBatcher batcher(labels, cfg.batch_size, derive_seed(cfg.seed, "batches"));
  const int steps_per_epoch = std::max<int>(1, int((n_train + size_t(cfg.batch_size) - 1) / size_t(cfg.batch_size)));

  const Matrix full_train = all_columns(train_x, n_train, cols);
  const Matrix full_test = n_test ? all_columns(test_x, n_test, cols) : Matrix();

  TrainCurves curves;
  double best = std::numeric_limits<double>::infinity();
  MlpParams best_params = params;
  std::vector<Matrix> acts, gw(net.w.size());
  std::vector<Vector> gb(net.b.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int step = 0; step < steps_per_epoch; ++step) {
      const std::vector<uint32_t> batch = batcher.next();
      const Matrix x = gather_columns(train_x, cols, batch);
      forward(net, x, acts);

      // dL/dz for sigmoid + BCE, averaged over the batch.
      Eigen::RowVectorXf delta(batch.size());
      const auto& logits = acts.back();
      for (size_t i = 0; i < batch.size(); ++i) {
        const double p = sigmoid(double(logits(0, Eigen::Index(i))));
        delta(Eigen::Index(i)) = float((p - double(train_y[batch[i]])) / double(batch.size()));
      }

      Matrix grad = delta;  // (1 x batch) growing backwards into (out_l x batch)
      for (size_t l = net.w.size(); l-- > 0;) {
        gw[l] = grad * acts[l].transpose();
        gb[l] = grad.rowwise().sum();
        if (l > 0) {
          grad = net.w[l].transpose() * grad;
          grad = grad.cwiseProduct((acts[l].array() > 0.0f).cast<float>().matrix());
        }
      }
      adam.step(net, gw, gb, cfg.learning_rate);
    }

    const double train_loss = full_loss(net, full_train, train_y);
    const double test_loss = n_test ? full_loss(net, full_test, test_y) : train_loss;
    if (!std::isfinite(train_loss) || !std::isfinite(test_loss)) {
      throw ValidationError("training diverged: non-finite loss at epoch " + std::to_string(epoch) +
                            ", parameter norm " + std::to_string(net.param_norm()));
    }
    curves.train_loss.push_back(train_loss);
    curves.test_loss.push_back(test_loss);
    if (test_loss < best) {
      best = test_loss;
      curves.best_epoch = epoch;
      net.to_params(params);
      best_params = params;
    }
  }
  params = best_params;
  return curves;
}

}  // namespace kgcast

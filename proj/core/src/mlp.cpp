#include "anonkit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "anonkit/encode.hpp"
#include "anonkit/error.hpp"
#include "anonkit/rng.hpp"

namespace anonkit {

std::string activation_to_string(Activation a) {
  return a == Activation::relu ? "relu" : "tanh";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw ValidationError("unknown activation '" + s + "'");
}

namespace {

inline double activate(double z, Activation a) {
  if (a == Activation::relu) return z > 0 ? z : 0.0;
  return std::tanh(z);
}

inline double activate_grad(double z, Activation a) {
  if (a == Activation::relu) return z > 0 ? 1.0 : 0.0;
  double t = std::tanh(z);
  return 1.0 - t * t;
}

/// Softmax probabilities with max-shift for stability.
std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

struct ForwardTrace {
  std::vector<std::vector<double>> pre;   // z per layer
  std::vector<std::vector<double>> post;  // a per layer (post[0] = input copy)
};

void forward_traced(const MlpModel& m, std::span<const double> x, ForwardTrace& t) {
  std::size_t layers = m.weights.size();
  t.pre.resize(layers);
  t.post.resize(layers + 1);
  t.post[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    std::size_t out_n = m.biases[l].size();
    std::size_t in_n = t.post[l].size();
    t.pre[l].resize(out_n);
    for (std::size_t o = 0; o < out_n; ++o) {
      double z = m.biases[l][o];
      const double* w = m.weights[l].data() + o * in_n;
      for (std::size_t i = 0; i < in_n; ++i) z += w[i] * t.post[l][i];
      t.pre[l][o] = z;
    }
    if (l + 1 == layers) {
      t.post[l + 1] = t.pre[l];  // output layer is linear (logits)
    } else {
      t.post[l + 1].resize(out_n);
      for (std::size_t o = 0; o < out_n; ++o) {
        t.post[l + 1][o] = activate(t.pre[l][o], m.activation);
      }
    }
  }
}

struct Gradients {
  std::vector<std::vector<double>> dw;
  std::vector<std::vector<double>> db;

  void zero_like(const MlpModel& m) {
    dw.resize(m.weights.size());
    db.resize(m.biases.size());
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      dw[l].assign(m.weights[l].size(), 0.0);
      db[l].assign(m.biases[l].size(), 0.0);
    }
  }
};

/// Accumulates d(mean CE)/d(params) for the given rows; returns summed loss.
double backprop_accumulate(const MlpModel& m, const EncodedMatrix& X, const std::vector<int>& y,
                           const std::vector<std::size_t>& rows, Gradients& g) {
  std::size_t layers = m.weights.size();
  double inv_batch = 1.0 / static_cast<double>(rows.size());
  double loss_sum = 0.0;
  ForwardTrace t;
  std::vector<double> delta, next_delta;
  for (std::size_t r : rows) {
    forward_traced(m, X.row(r), t);
    std::vector<double> p = softmax(t.post[layers]);
    int target = y[r];
    loss_sum += -std::log(std::max(p[static_cast<std::size_t>(target)], 1e-300));

    delta = p;
    delta[static_cast<std::size_t>(target)] -= 1.0;
    for (double& d : delta) d *= inv_batch;

    for (std::size_t l = layers; l-- > 0;) {
      std::size_t out_n = m.biases[l].size();
      std::size_t in_n = t.post[l].size();
      for (std::size_t o = 0; o < out_n; ++o) {
        g.db[l][o] += delta[o];
        double* gw = g.dw[l].data() + o * in_n;
        const double d = delta[o];
        for (std::size_t i = 0; i < in_n; ++i) gw[i] += d * t.post[l][i];
      }
      if (l == 0) break;
      next_delta.assign(in_n, 0.0);
      for (std::size_t o = 0; o < out_n; ++o) {
        const double* w = m.weights[l].data() + o * in_n;
        const double d = delta[o];
        for (std::size_t i = 0; i < in_n; ++i) next_delta[i] += w[i] * d;
      }
      for (std::size_t i = 0; i < in_n; ++i) {
        next_delta[i] *= activate_grad(t.pre[l - 1][i], m.activation);
      }
      delta = next_delta;
    }
  }
  return loss_sum;
}

}  // namespace

std::vector<double> MlpModel::forward_logits(std::span<const double> x) const {
  ForwardTrace t;
  forward_traced(*this, x, t);
  return t.post[weights.size()];
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

std::vector<double> MlpModel::flatten_params() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].begin(), weights[l].end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  return flat;
}

void MlpModel::set_params(std::span<const double> flat) {
  std::size_t pos = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + weights[l].size()),
              weights[l].begin());
    pos += weights[l].size();
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + biases[l].size()),
              biases[l].begin());
    pos += biases[l].size();
  }
}

double MlpModel::loss(const EncodedMatrix& X, const std::vector<int>& y) const {
  double sum = 0.0;
  for (std::size_t r = 0; r < X.n_rows; ++r) {
    std::vector<double> p = softmax(forward_logits(X.row(r)));
    sum += -std::log(std::max(p[static_cast<std::size_t>(y[r])], 1e-300));
  }
  return sum / static_cast<double>(X.n_rows);
}

std::vector<double> MlpModel::loss_gradient(const EncodedMatrix& X, const std::vector<int>& y) const {
  Gradients g;
  g.zero_like(*this);
  std::vector<std::size_t> rows(X.n_rows);
  std::iota(rows.begin(), rows.end(), 0);
  backprop_accumulate(*this, X, y, rows, g);
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), g.dw[l].begin(), g.dw[l].end());
    flat.insert(flat.end(), g.db[l].begin(), g.db[l].end());
  }
  return flat;
}

MlpModel fit_mlp(const MlpParams& params, std::uint64_t seed, const EncodedMatrix& X,
                 const std::vector<int>& y, int class_count) {
  if (params.learning_rate <= 0) throw ValidationError("mlp learning_rate must be > 0");
  if (params.epochs < 1 || params.batch_size < 1) {
    throw ValidationError("mlp epochs and batch_size must be >= 1");
  }
  for (int h : params.hidden_sizes) {
    if (h < 1) throw ValidationError("mlp hidden layer sizes must be >= 1");
  }

  MlpModel m;
  m.activation = params.activation;
  m.layer_sizes.push_back(static_cast<int>(X.n_cols));
  for (int h : params.hidden_sizes) m.layer_sizes.push_back(h);
  m.layer_sizes.push_back(class_count);

  Rng rng(derive_seed(seed, 0x6d6c70));
  std::size_t layers = m.layer_sizes.size() - 1;
  m.weights.resize(layers);
  m.biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    std::size_t in_n = static_cast<std::size_t>(m.layer_sizes[l]);
    std::size_t out_n = static_cast<std::size_t>(m.layer_sizes[l + 1]);
    double bound = std::sqrt(6.0 / static_cast<double>(in_n + out_n));
    m.weights[l].resize(in_n * out_n);
    for (double& w : m.weights[l]) w = rng.next_double(-bound, bound);
    m.biases[l].assign(out_n, 0.0);
  }

  // adam state
  std::size_t pcount = m.parameter_count();
  std::vector<double> m1(pcount, 0.0), m2(pcount, 0.0);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;

  std::vector<std::size_t> order(X.n_rows);
  std::iota(order.begin(), order.end(), 0);
  Gradients g;
  std::vector<double> params_flat = m.flatten_params();
  std::vector<double> grad_flat(pcount);

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(params.batch_size)) {
      std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(params.batch_size));
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(stop));
      g.zero_like(m);
      backprop_accumulate(m, X, y, batch, g);
      std::size_t pos = 0;
      for (std::size_t l = 0; l < layers; ++l) {
        for (double v : g.dw[l]) grad_flat[pos++] = v;
        for (double v : g.db[l]) grad_flat[pos++] = v;
      }
      beta1_t *= beta1;
      beta2_t *= beta2;
      for (std::size_t i = 0; i < pcount; ++i) {
        m1[i] = beta1 * m1[i] + (1 - beta1) * grad_flat[i];
        m2[i] = beta2 * m2[i] + (1 - beta2) * grad_flat[i] * grad_flat[i];
        double mh = m1[i] / (1 - beta1_t);
        double vh = m2[i] / (1 - beta2_t);
        params_flat[i] -= params.learning_rate * mh / (std::sqrt(vh) + eps);
      }
      m.set_params(params_flat);
    }
  }
  return m;
}

}  // namespace anonkit

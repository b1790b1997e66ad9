#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace anonkit {

struct EncodedMatrix;

enum class Activation { relu, tanh };

std::string activation_to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct MlpParams {
  std::vector<int> hidden_sizes{100};
  Activation activation = Activation::relu;
  double learning_rate = 1e-3;
  int epochs = 200;
  int batch_size = 200;
};

/// Fully connected network trained with adam on softmax cross-entropy.
/// Single-threaded with a fixed accumulation order, so training is
/// bit-reproducible for a given seed.
struct MlpModel {
  std::vector<int> layer_sizes;  // input, hidden..., output
  Activation activation = Activation::relu;
  std::vector<std::vector<double>> weights;  // per layer, out x in row-major
  std::vector<std::vector<double>> biases;   // per layer, out

  std::vector<double> forward_logits(std::span<const double> x) const;

  std::size_t parameter_count() const;
  std::vector<double> flatten_params() const;
  void set_params(std::span<const double> flat);

  /// Mean softmax cross-entropy over the rows; used directly by training and
  /// by finite-difference checks.
  double loss(const EncodedMatrix& X, const std::vector<int>& y) const;
  std::vector<double> loss_gradient(const EncodedMatrix& X, const std::vector<int>& y) const;
};

MlpModel fit_mlp(const MlpParams& params, std::uint64_t seed, const EncodedMatrix& X,
                 const std::vector<int>& y, int class_count);

}  // namespace anonkit

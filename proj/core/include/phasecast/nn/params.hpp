#ifndef PHASECAST_NN_PARAMS_HPP_
#define PHASECAST_NN_PARAMS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasecast::nn {

struct ShapeMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kOutputSize = 6;

/// All weights of the five-layer network: input -> peephole LSTM ->
/// dense ReLU -> linear 6-unit head. The cell carries 11 weight groups
/// (4 input, 4 recurrent, 3 elementwise peephole) and 4 biases.
struct LstmParams {
  int input_size = 0;
  int hidden_size = 0;

  Eigen::MatrixXd W_xi, W_xf, W_xc, W_xo;  // input_size x hidden
  Eigen::MatrixXd W_hi, W_hf, W_hc, W_ho;  // hidden x hidden
  Eigen::VectorXd w_ci, w_cf, w_co;        // peephole, elementwise
  Eigen::VectorXd b_i, b_f, b_c, b_o;

  Eigen::MatrixXd W_dense;  // hidden x hidden
  Eigen::VectorXd b_dense;
  Eigen::MatrixXd W_head;   // hidden x kOutputSize
  Eigen::VectorXd b_head;

  /// All tensors zero (gradient and moment buffers).
  static LstmParams zeros(int input_size, int hidden_size);

  /// Uniform fan-based init, forget-gate bias 1, deterministic per seed.
  static LstmParams init(int input_size, int hidden_size, std::uint64_t seed);

  long long parameter_count() const;
  bool all_finite() const;
  void set_zero();

  /// Flat element view in a fixed tensor order; parallel across instances
  /// with identical shapes. Used by the optimizer, checkpoints and tests.
  struct TensorRef {
    const char* name;
    double* data;
    std::size_t size;
  };
  struct ConstTensorRef {
    const char* name;
    const double* data;
    std::size_t size;
  };
  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;
};

}  // namespace phasecast::nn

#endif  // PHASECAST_NN_PARAMS_HPP_

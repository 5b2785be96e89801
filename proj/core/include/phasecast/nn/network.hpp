#ifndef PHASECAST_NN_NETWORK_HPP_
#define PHASECAST_NN_NETWORK_HPP_

#include <array>
#include <vector>

#include "phasecast/nn/params.hpp"

namespace phasecast::nn {

struct NonFiniteActivationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Which cell state the output gate peeks at. kCellPrev is the default
/// formulation this network implements; kCellCurrent is the common
/// alternative kept behind this flag.
enum class PeepholeVariant { kCellPrev, kCellCurrent };

struct LstmStepResult {
  Eigen::VectorXd h, c;
  Eigen::VectorXd i, f, g, o;  // gate activations (g = candidate tanh)
};

/// One cell step on a single timestep vector. Shapes must match `params`.
LstmStepResult lstm_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                         const Eigen::VectorXd& c_prev, const LstmParams& params,
                         PeepholeVariant variant = PeepholeVariant::kCellPrev);

/// Everything retained from a batched forward pass for exact BPTT.
/// All matrices are batch x width; one entry per timestep.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> x;       // inputs
  std::vector<Eigen::MatrixXd> i, f, g, o, c, tanh_c;
  std::vector<Eigen::MatrixXd> h;
  Eigen::MatrixXd z1, a1;               // dense pre/post activation
  Eigen::MatrixXd pred;                 // batch x 6
  PeepholeVariant variant = PeepholeVariant::kCellPrev;
};

/// Batched forward: x[t] is batch x input_size, oldest timestep first;
/// h0 = c0 = 0. Returns batch x 6 normalized predictions. Throws
/// NonFiniteActivationError when the output diverges.
Eigen::MatrixXd forward(const LstmParams& params, const std::vector<Eigen::MatrixXd>& x,
                        ForwardCache* cache = nullptr,
                        PeepholeVariant variant = PeepholeVariant::kCellPrev);

/// Single-window convenience: window is timesteps x input_size row-major.
Eigen::VectorXd forward_window(const LstmParams& params, const Eigen::MatrixXd& window,
                               ForwardCache* cache = nullptr,
                               PeepholeVariant variant = PeepholeVariant::kCellPrev);

/// Exact reverse-mode gradients for the cached forward pass, accumulated
/// into `grads` (+=). dpred is batch x 6. ReLU gradient at 0 is 0.
void backward(const LstmParams& params, const ForwardCache& cache, const Eigen::MatrixXd& dpred,
              LstmParams& grads);

/// clamp(prediction, 0, 1) * 200, rounded half-up to whole seconds.
std::array<int, kOutputSize> predict_seconds(const Eigen::VectorXd& normalized_prediction);

}  // namespace phasecast::nn

#endif  // PHASECAST_NN_NETWORK_HPP_

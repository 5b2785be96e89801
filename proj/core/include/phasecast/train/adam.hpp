#ifndef PHASECAST_TRAIN_ADAM_HPP_
#define PHASECAST_TRAIN_ADAM_HPP_

#include "phasecast/nn/params.hpp"

namespace phasecast::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction:
///   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
class AdamOptimizer {
 public:
  AdamOptimizer(int input_size, int hidden_size, AdamConfig config = {});

  /// One update over every parameter tensor. `grads` must share shapes with
  /// `params`. The step index advances by one per call.
  void step(nn::LstmParams& params, const nn::LstmParams& grads, double learning_rate);

  long long step_count() const { return t_; }

 private:
  AdamConfig config_;
  nn::LstmParams m_;
  nn::LstmParams v_;
  long long t_ = 0;
};

}  // namespace phasecast::train

#endif  // PHASECAST_TRAIN_ADAM_HPP_

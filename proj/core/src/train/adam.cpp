#include "phasecast/train/adam.hpp"

#include <cmath>

namespace phasecast::train {

AdamOptimizer::AdamOptimizer(int input_size, int hidden_size, AdamConfig config)
    : config_(config),
      m_(nn::LstmParams::zeros(input_size, hidden_size)),
      v_(nn::LstmParams::zeros(input_size, hidden_size)) {}

void AdamOptimizer::step(nn::LstmParams& params, const nn::LstmParams& grads,
                         double learning_rate) {
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));

  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = m_.tensors();
  auto v = v_.tensors();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].size != g[i].size) throw nn::ShapeMismatchError("adam: gradient shape mismatch");
    double* theta = p[i].data;
    const double* grad = g[i].data;
    double* mm = m[i].data;
    double* vv = v[i].data;
    for (std::size_t k = 0; k < p[i].size; ++k) {
      const double gk = grad[k];
      mm[k] = config_.beta1 * mm[k] + (1.0 - config_.beta1) * gk;
      vv[k] = config_.beta2 * vv[k] + (1.0 - config_.beta2) * gk * gk;
      const double m_hat = mm[k] / bc1;
      const double v_hat = vv[k] / bc2;
      theta[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace phasecast::train

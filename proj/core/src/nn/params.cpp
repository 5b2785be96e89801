#include "phasecast/nn/params.hpp"

#include <cmath>

#include "phasecast/util/rng.hpp"

namespace phasecast::nn {

LstmParams LstmParams::zeros(int input_size, int hidden_size) {
  LstmParams p;
  p.input_size = input_size;
  p.hidden_size = hidden_size;
  p.W_xi = Eigen::MatrixXd::Zero(input_size, hidden_size);
  p.W_xf = p.W_xi;
  p.W_xc = p.W_xi;
  p.W_xo = p.W_xi;
  p.W_hi = Eigen::MatrixXd::Zero(hidden_size, hidden_size);
  p.W_hf = p.W_hi;
  p.W_hc = p.W_hi;
  p.W_ho = p.W_hi;
  p.w_ci = Eigen::VectorXd::Zero(hidden_size);
  p.w_cf = p.w_ci;
  p.w_co = p.w_ci;
  p.b_i = p.w_ci;
  p.b_f = p.w_ci;
  p.b_c = p.w_ci;
  p.b_o = p.w_ci;
  p.W_dense = Eigen::MatrixXd::Zero(hidden_size, hidden_size);
  p.b_dense = Eigen::VectorXd::Zero(hidden_size);
  p.W_head = Eigen::MatrixXd::Zero(hidden_size, kOutputSize);
  p.b_head = Eigen::VectorXd::Zero(kOutputSize);
  return p;
}

LstmParams LstmParams::init(int input_size, int hidden_size, std::uint64_t seed) {
  if (hidden_size < 1 || input_size < 1) {
    throw ShapeMismatchError("init_params needs positive sizes");
  }
  LstmParams p = zeros(input_size, hidden_size);
  Rng rng(seed);
  auto fill = [&rng](double* data, std::size_t n, int fan_in, int fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t k = 0; k < n; ++k) data[k] = rng.uniform(-limit, limit);
  };
  const int in = input_size, hid = hidden_size;
  for (Eigen::MatrixXd* m : {&p.W_xi, &p.W_xf, &p.W_xc, &p.W_xo}) {
    fill(m->data(), static_cast<std::size_t>(m->size()), in, hid);
  }
  for (Eigen::MatrixXd* m : {&p.W_hi, &p.W_hf, &p.W_hc, &p.W_ho}) {
    fill(m->data(), static_cast<std::size_t>(m->size()), hid, hid);
  }
  for (Eigen::VectorXd* v : {&p.w_ci, &p.w_cf, &p.w_co}) {
    fill(v->data(), static_cast<std::size_t>(v->size()), hid, hid);
  }
  fill(p.W_dense.data(), static_cast<std::size_t>(p.W_dense.size()), hid, hid);
  fill(p.W_head.data(), static_cast<std::size_t>(p.W_head.size()), hid, kOutputSize);
  // Biases start at zero except the forget gate, which opens the cell so
  // early training does not erase state.
  p.b_f.setOnes();
  return p;
}

long long LstmParams::parameter_count() const {
  long long total = 0;
  for (const auto& t : tensors()) total += static_cast<long long>(t.size);
  return total;
}

bool LstmParams::all_finite() const {
  for (const auto& t : tensors()) {
    for (std::size_t k = 0; k < t.size; ++k) {
      if (!std::isfinite(t.data[k])) return false;
    }
  }
  return true;
}

void LstmParams::set_zero() {
  for (auto& t : tensors()) {
    for (std::size_t k = 0; k < t.size; ++k) t.data[k] = 0.0;
  }
}

std::vector<LstmParams::TensorRef> LstmParams::tensors() {
  std::vector<TensorRef> out;
  auto add_m = [&out](const char* name, Eigen::MatrixXd& m) {
    out.push_back({name, m.data(), static_cast<std::size_t>(m.size())});
  };
  auto add_v = [&out](const char* name, Eigen::VectorXd& v) {
    out.push_back({name, v.data(), static_cast<std::size_t>(v.size())});
  };
  add_m("W_xi", W_xi); add_m("W_xf", W_xf); add_m("W_xc", W_xc); add_m("W_xo", W_xo);
  add_m("W_hi", W_hi); add_m("W_hf", W_hf); add_m("W_hc", W_hc); add_m("W_ho", W_ho);
  add_v("w_ci", w_ci); add_v("w_cf", w_cf); add_v("w_co", w_co);
  add_v("b_i", b_i); add_v("b_f", b_f); add_v("b_c", b_c); add_v("b_o", b_o);
  add_m("W_dense", W_dense); add_v("b_dense", b_dense);
  add_m("W_head", W_head); add_v("b_head", b_head);
  return out;
}

std::vector<LstmParams::ConstTensorRef> LstmParams::tensors() const {
  std::vector<ConstTensorRef> out;
  for (const auto& t : const_cast<LstmParams*>(this)->tensors()) {
    out.push_back({t.name, t.data, t.size});
  }
  return out;
}

}  // namespace phasecast::nn

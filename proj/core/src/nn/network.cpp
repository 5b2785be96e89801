#include "phasecast/nn/network.hpp"

#include <cmath>

namespace phasecast::nn {

namespace {

inline Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& m) {
  return ((-m.array()).exp() + 1.0).inverse().matrix();
}

// pre-activation of one gate: X W_x + H W_h [+ C diag(w_c)] + b
Eigen::MatrixXd gate_pre(const Eigen::MatrixXd& x, const Eigen::MatrixXd& Wx,
                         const Eigen::MatrixXd& h, const Eigen::MatrixXd& Wh,
                         const Eigen::MatrixXd* c, const Eigen::VectorXd* wc,
                         const Eigen::VectorXd& b) {
  Eigen::MatrixXd pre = x * Wx;
  pre.noalias() += h * Wh;
  if (c && wc) pre.array() += c->array().rowwise() * wc->transpose().array();
  pre.array().rowwise() += b.transpose().array();
  return pre;
}

// The four gates share their input and recurrent products; one fused GEMM
// per timestep instead of four. Column blocks: [i | f | g | o].
struct FusedGates {
  Eigen::MatrixXd Wx4;       // input_size x 4N
  Eigen::MatrixXd Wh4;       // N x 4N
  Eigen::RowVectorXd bias4;  // 4N

  explicit FusedGates(const LstmParams& p) {
    const int N = p.hidden_size;
    Wx4.resize(p.input_size, 4 * N);
    Wx4 << p.W_xi, p.W_xf, p.W_xc, p.W_xo;
    Wh4.resize(N, 4 * N);
    Wh4 << p.W_hi, p.W_hf, p.W_hc, p.W_ho;
    bias4.resize(4 * N);
    bias4 << p.b_i.transpose(), p.b_f.transpose(), p.b_c.transpose(), p.b_o.transpose();
  }
};

}  // namespace

LstmStepResult lstm_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                         const Eigen::VectorXd& c_prev, const LstmParams& params,
                         PeepholeVariant variant) {
  if (x.size() != params.input_size || h_prev.size() != params.hidden_size ||
      c_prev.size() != params.hidden_size) {
    throw ShapeMismatchError("lstm_step: input/state shapes do not match params");
  }
  Eigen::MatrixXd xr = x.transpose();
  Eigen::MatrixXd h0 = h_prev.transpose();
  Eigen::MatrixXd c0 = c_prev.transpose();

  Eigen::MatrixXd pre_i = gate_pre(xr, params.W_xi, h0, params.W_hi, &c0, &params.w_ci, params.b_i);
  Eigen::MatrixXd pre_f = gate_pre(xr, params.W_xf, h0, params.W_hf, &c0, &params.w_cf, params.b_f);
  Eigen::MatrixXd pre_g = gate_pre(xr, params.W_xc, h0, params.W_hc, nullptr, nullptr, params.b_c);

  Eigen::MatrixXd i = sigmoid(pre_i);
  Eigen::MatrixXd f = sigmoid(pre_f);
  Eigen::MatrixXd g = pre_g.array().tanh().matrix();
  Eigen::MatrixXd c = (f.array() * c0.array() + i.array() * g.array()).matrix();

  const Eigen::MatrixXd& c_peek = variant == PeepholeVariant::kCellPrev ? c0 : c;
  Eigen::MatrixXd pre_o =
      gate_pre(xr, params.W_xo, h0, params.W_ho, &c_peek, &params.w_co, params.b_o);
  Eigen::MatrixXd o = sigmoid(pre_o);
  Eigen::MatrixXd h = (o.array() * c.array().tanh()).matrix();

  LstmStepResult out;
  out.h = h.row(0).transpose();
  out.c = c.row(0).transpose();
  out.i = i.row(0).transpose();
  out.f = f.row(0).transpose();
  out.g = g.row(0).transpose();
  out.o = o.row(0).transpose();
  return out;
}

Eigen::MatrixXd forward(const LstmParams& params, const std::vector<Eigen::MatrixXd>& x,
                        ForwardCache* cache, PeepholeVariant variant) {
  if (x.empty()) throw ShapeMismatchError("forward: empty window");
  const Eigen::Index batch = x.front().rows();
  const int T = static_cast<int>(x.size());
  const int N = params.hidden_size;
  for (const auto& xt : x) {
    if (xt.cols() != params.input_size || xt.rows() != batch) {
      throw ShapeMismatchError("forward: timestep shape mismatch");
    }
  }

  const FusedGates fused(params);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(batch, N);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(batch, N);
  Eigen::MatrixXd gates(batch, 4 * N);

  if (cache) {
    cache->x = x;
    cache->i.resize(T); cache->f.resize(T); cache->g.resize(T); cache->o.resize(T);
    cache->c.resize(T); cache->tanh_c.resize(T); cache->h.resize(T);
    cache->variant = variant;
  }

  for (int t = 0; t < T; ++t) {
    gates.noalias() = x[static_cast<std::size_t>(t)] * fused.Wx4;
    gates.noalias() += h * fused.Wh4;
    gates.rowwise() += fused.bias4;
    gates.block(0, 0, batch, N).array() += c.array().rowwise() * params.w_ci.transpose().array();
    gates.block(0, N, batch, N).array() += c.array().rowwise() * params.w_cf.transpose().array();

    Eigen::MatrixXd i = sigmoid(gates.block(0, 0, batch, N));
    Eigen::MatrixXd f = sigmoid(gates.block(0, N, batch, N));
    Eigen::MatrixXd g = gates.block(0, 2 * N, batch, N).array().tanh().matrix();
    Eigen::MatrixXd c_new = (f.array() * c.array() + i.array() * g.array()).matrix();

    const Eigen::MatrixXd& c_peek = variant == PeepholeVariant::kCellPrev ? c : c_new;
    gates.block(0, 3 * N, batch, N).array() +=
        c_peek.array().rowwise() * params.w_co.transpose().array();
    Eigen::MatrixXd o = sigmoid(gates.block(0, 3 * N, batch, N));
    Eigen::MatrixXd tanh_c = c_new.array().tanh().matrix();
    Eigen::MatrixXd h_new = (o.array() * tanh_c.array()).matrix();

    if (cache) {
      cache->i[t] = std::move(i);
      cache->f[t] = std::move(f);
      cache->g[t] = std::move(g);
      cache->o[t] = std::move(o);
      cache->c[t] = c_new;
      cache->tanh_c[t] = std::move(tanh_c);
      cache->h[t] = h_new;
    }
    c = std::move(c_new);
    h = std::move(h_new);
  }

  Eigen::MatrixXd z1 = h * params.W_dense;
  z1.array().rowwise() += params.b_dense.transpose().array();
  Eigen::MatrixXd a1 = z1.array().max(0.0).matrix();
  Eigen::MatrixXd pred = a1 * params.W_head;
  pred.array().rowwise() += params.b_head.transpose().array();

  if (!pred.allFinite()) {
    throw NonFiniteActivationError("forward produced a non-finite prediction");
  }
  if (cache) {
    cache->z1 = std::move(z1);
    cache->a1 = std::move(a1);
    cache->pred = pred;
  }
  return pred;
}

Eigen::VectorXd forward_window(const LstmParams& params, const Eigen::MatrixXd& window,
                               ForwardCache* cache, PeepholeVariant variant) {
  std::vector<Eigen::MatrixXd> x;
  x.reserve(static_cast<std::size_t>(window.rows()));
  for (Eigen::Index t = 0; t < window.rows(); ++t) x.push_back(window.row(t));
  return forward(params, x, cache, variant).row(0).transpose();
}

void backward(const LstmParams& params, const ForwardCache& cache, const Eigen::MatrixXd& dpred,
              LstmParams& grads) {
  const int T = static_cast<int>(cache.x.size());
  if (T == 0) throw ShapeMismatchError("backward: cache is empty");
  const Eigen::Index batch = cache.x.front().rows();
  const int N = params.hidden_size;
  if (dpred.rows() != batch || dpred.cols() != kOutputSize) {
    throw ShapeMismatchError("backward: dpred shape mismatch");
  }

  const Eigen::MatrixXd& h_T = cache.h[static_cast<std::size_t>(T - 1)];

  // Head and dense layer.
  grads.W_head.noalias() += cache.a1.transpose() * dpred;
  grads.b_head.noalias() += dpred.colwise().sum().transpose();
  Eigen::MatrixXd da1 = dpred * params.W_head.transpose();
  Eigen::MatrixXd dz1 =
      (da1.array() * (cache.z1.array() > 0.0).cast<double>()).matrix();  // ReLU'(0) = 0
  grads.W_dense.noalias() += h_T.transpose() * dz1;
  grads.b_dense.noalias() += dz1.colwise().sum().transpose();

  const FusedGates fused(params);
  Eigen::MatrixXd dWx4 = Eigen::MatrixXd::Zero(params.input_size, 4 * N);
  Eigen::MatrixXd dWh4 = Eigen::MatrixXd::Zero(N, 4 * N);
  Eigen::RowVectorXd db4 = Eigen::RowVectorXd::Zero(4 * N);

  Eigen::MatrixXd dh = dz1 * params.W_dense.transpose();
  Eigen::MatrixXd dc_carry = Eigen::MatrixXd::Zero(batch, N);
  const Eigen::MatrixXd zero_state = Eigen::MatrixXd::Zero(batch, N);
  Eigen::MatrixXd dpre4(batch, 4 * N);

  for (int t = T - 1; t >= 0; --t) {
    const std::size_t ti = static_cast<std::size_t>(t);
    const Eigen::MatrixXd& c_prev = t > 0 ? cache.c[ti - 1] : zero_state;
    const Eigen::MatrixXd& h_prev = t > 0 ? cache.h[ti - 1] : zero_state;

    const Eigen::MatrixXd& i = cache.i[ti];
    const Eigen::MatrixXd& f = cache.f[ti];
    const Eigen::MatrixXd& g = cache.g[ti];
    const Eigen::MatrixXd& o = cache.o[ti];
    const Eigen::MatrixXd& tanh_c = cache.tanh_c[ti];

    auto dpre_i = dpre4.block(0, 0, batch, N);
    auto dpre_f = dpre4.block(0, N, batch, N);
    auto dpre_g = dpre4.block(0, 2 * N, batch, N);
    auto dpre_o = dpre4.block(0, 3 * N, batch, N);

    dpre_o = (dh.array() * tanh_c.array() * o.array() * (1.0 - o.array())).matrix();

    Eigen::MatrixXd dc =
        (dh.array() * o.array() * (1.0 - tanh_c.array().square())).matrix() + dc_carry;
    if (cache.variant == PeepholeVariant::kCellCurrent) {
      dc.array() += dpre_o.array().rowwise() * params.w_co.transpose().array();
    }

    dpre_i = (dc.array() * g.array() * i.array() * (1.0 - i.array())).matrix();
    dpre_f = (dc.array() * c_prev.array() * f.array() * (1.0 - f.array())).matrix();
    dpre_g = (dc.array() * i.array() * (1.0 - g.array().square())).matrix();

    dWx4.noalias() += cache.x[ti].transpose() * dpre4;
    dWh4.noalias() += h_prev.transpose() * dpre4;
    db4 += dpre4.colwise().sum();

    grads.w_ci.noalias() += (dpre_i.array() * c_prev.array()).colwise().sum().matrix().transpose();
    grads.w_cf.noalias() += (dpre_f.array() * c_prev.array()).colwise().sum().matrix().transpose();
    const Eigen::MatrixXd& c_peek =
        cache.variant == PeepholeVariant::kCellPrev ? c_prev : cache.c[ti];
    grads.w_co.noalias() += (dpre_o.array() * c_peek.array()).colwise().sum().matrix().transpose();

    Eigen::MatrixXd dc_prev = (dc.array() * f.array()).matrix();
    dc_prev.array() += dpre_i.array().rowwise() * params.w_ci.transpose().array();
    dc_prev.array() += dpre_f.array().rowwise() * params.w_cf.transpose().array();
    if (cache.variant == PeepholeVariant::kCellPrev) {
      dc_prev.array() += dpre_o.array().rowwise() * params.w_co.transpose().array();
    }

    dh.noalias() = dpre4 * fused.Wh4.transpose();
    dc_carry = std::move(dc_prev);
  }

  grads.W_xi.noalias() += dWx4.block(0, 0, params.input_size, N);
  grads.W_xf.noalias() += dWx4.block(0, N, params.input_size, N);
  grads.W_xc.noalias() += dWx4.block(0, 2 * N, params.input_size, N);
  grads.W_xo.noalias() += dWx4.block(0, 3 * N, params.input_size, N);
  grads.W_hi.noalias() += dWh4.block(0, 0, N, N);
  grads.W_hf.noalias() += dWh4.block(0, N, N, N);
  grads.W_hc.noalias() += dWh4.block(0, 2 * N, N, N);
  grads.W_ho.noalias() += dWh4.block(0, 3 * N, N, N);
  grads.b_i.noalias() += db4.segment(0, N).transpose();
  grads.b_f.noalias() += db4.segment(N, N).transpose();
  grads.b_c.noalias() += db4.segment(2 * N, N).transpose();
  grads.b_o.noalias() += db4.segment(3 * N, N).transpose();
}

std::array<int, kOutputSize> predict_seconds(const Eigen::VectorXd& normalized_prediction) {
  std::array<int, kOutputSize> out{};
  for (int k = 0; k < kOutputSize; ++k) {
    double v = std::clamp(normalized_prediction[k], 0.0, 1.0) * 200.0;
    out[static_cast<std::size_t>(k)] = static_cast<int>(std::floor(v + 0.5));
  }
  return out;
}

}  // namespace phasecast::nn

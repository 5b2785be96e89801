#include "phasecast/train/loss.hpp"

#include <cmath>

namespace phasecast::train {

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "mse") return LossKind::kMse;
  if (s == "mae") return LossKind::kMae;
  if (s == "mape") return LossKind::kMape;
  if (s == "tdse") return LossKind::kTdse;
  throw std::invalid_argument("unknown loss kind: " + s);
}

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kMse: return "mse";
    case LossKind::kMae: return "mae";
    case LossKind::kMape: return "mape";
    case LossKind::kTdse: return "tdse";
  }
  return "?";
}

PointLoss loss_pointwise(LossKind kind, double pred, double truth, double mape_floor) {
  const double e = pred - truth;
  PointLoss out;
  switch (kind) {
    case LossKind::kMse:
      out.value = e * e;
      out.dvalue_dpred = 2.0 * e;
      break;
    case LossKind::kMae:
      out.value = std::abs(e);
      out.dvalue_dpred = e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
      break;
    case LossKind::kMape: {
      const double denom = std::max(truth, mape_floor);
      out.value = 100.0 * std::abs(e) / denom;
      out.dvalue_dpred = e > 0.0 ? 100.0 / denom : (e < 0.0 ? -100.0 / denom : 0.0);
      break;
    }
    case LossKind::kTdse: {
      const double discount = (1.0 - truth) * (1.0 - truth);
      out.value = e * e * discount;
      out.dvalue_dpred = 2.0 * e * discount;
      break;
    }
  }
  return out;
}

double compute_loss(LossKind kind, const Eigen::VectorXd& pred, const Eigen::VectorXd& truth,
                    const Eigen::VectorXd& mask, Eigen::VectorXd* dpred, double mape_floor) {
  const Eigen::Index n = pred.size();
  if (dpred) *dpred = Eigen::VectorXd::Zero(n);
  double sum = 0.0;
  int valid = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (mask[k] == 0.0) continue;
    ++valid;
    PointLoss pl = loss_pointwise(kind, pred[k], truth[k], mape_floor);
    sum += pl.value;
    if (dpred) (*dpred)[k] = pl.dvalue_dpred;
  }
  if (valid == 0) {
    throw NoValidEntriesError("compute_loss: every entry masked (sequencer bug)");
  }
  if (dpred) *dpred /= static_cast<double>(valid);
  return sum / static_cast<double>(valid);
}

}  // namespace phasecast::train

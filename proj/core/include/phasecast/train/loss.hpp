#ifndef PHASECAST_TRAIN_LOSS_HPP_
#define PHASECAST_TRAIN_LOSS_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace phasecast::train {

struct NoValidEntriesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LossKind { kMse, kMae, kMape, kTdse };

LossKind loss_kind_from_string(const std::string& s);
const char* to_string(LossKind kind);

/// Floor on the MAPE denominator, in normalized target units. 0.005 is the
/// quantization step of the target (one second over the 200 s horizon), the
/// smallest ground truth that can occur.
constexpr double kDefaultMapeFloor = 0.005;

struct PointLoss {
  double value = 0.0;
  double dvalue_dpred = 0.0;
};

/// Loss kernel on one (pred, truth) entry, truth normalized to [0,1]:
///   mse:  (p-y)^2
///   mae:  |p-y|              (subgradient 0 at p = y)
///   mape: 100 |p-y| / max(y, floor)
///   tdse: (p-y)^2 (1-y)^2    (squared error discounted toward the horizon)
PointLoss loss_pointwise(LossKind kind, double pred, double truth,
                         double mape_floor = kDefaultMapeFloor);

/// Mean over the valid entries of one sample, with gradient w.r.t. pred.
/// Masked entries contribute nothing to value or gradient. Throws
/// NoValidEntriesError when the mask is all zero.
double compute_loss(LossKind kind, const Eigen::VectorXd& pred, const Eigen::VectorXd& truth,
                    const Eigen::VectorXd& mask, Eigen::VectorXd* dpred = nullptr,
                    double mape_floor = kDefaultMapeFloor);

}  // namespace phasecast::train

#endif  // PHASECAST_TRAIN_LOSS_HPP_

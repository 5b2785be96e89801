#ifndef PHASECAST_NN_CHECKPOINT_HPP_
#define PHASECAST_NN_CHECKPOINT_HPP_

#include <cstdint>
#include <string>

#include "phasecast/nn/params.hpp"

namespace phasecast::nn {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Versioned container for a trained model. Save -> load -> save round-trips
/// bit-exactly (doubles are stored as raw little-endian bytes, fixed tensor
/// order, no timestamps).
struct Checkpoint {
  LstmParams params;
  std::uint64_t manifest_hash = 0;
  std::string loss_kind;  // mse | mae | mape | tdse
  int epoch = 0;
  double validation_loss = 0.0;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace phasecast::nn

#endif  // PHASECAST_NN_CHECKPOINT_HPP_

#ifndef PHASECAST_TRAIN_TRAINER_HPP_
#define PHASECAST_TRAIN_TRAINER_HPP_

#include <functional>
#include <string>
#include <vector>

#include "phasecast/nn/checkpoint.hpp"
#include "phasecast/seq/sequencer.hpp"
#include "phasecast/train/adam.hpp"
#include "phasecast/train/loss.hpp"

namespace phasecast::train {

struct TrainConfig {
  LossKind loss = LossKind::kMse;
  int neurons = 47;
  double learning_rate = 0.01;
  AdamConfig adam;
  double plateau_factor = 0.3;   // lr *= factor per epoch without improvement
  int plateau_patience = 1;      // epochs without improvement before decaying
  int epochs = 10;
  std::size_t batch_size = seq::kDefaultBatchSize;
  std::uint64_t seed = 0;
  double mape_floor = kDefaultMapeFloor;
};

struct EpochStats {
  int epoch = 0;           // 1-based
  double train_loss = 0.0; // mean over valid entries of the epoch
  double val_loss = 0.0;
  double learning_rate = 0.0;  // rate used DURING this epoch
  std::string checkpoint;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;
  std::string best_checkpoint;
  double baseline_val_loss = 0.0;  // untrained model, before epoch 1

  void save_tsv(const std::string& path) const;
};

/// Test seams; production runs leave these empty.
struct TrainHooks {
  /// Replaces the validation-loss computation (plateau-decay tests).
  std::function<double(const nn::LstmParams&)> validation_override;
  std::function<void(const EpochStats&)> on_epoch;
};

/// Epoch loop: one Adam step per batch on the batch-mean loss (mean over
/// valid (sample, phase) entries), full validation pass after each epoch,
/// plateau decay against the best validation loss seen (the untrained
/// model's validation loss is the baseline), checkpoint per epoch, best
/// checkpoint flagged. Deterministic per seed.
class Trainer {
 public:
  Trainer(const seq::SequenceDataset& train_data, const seq::SequenceDataset& val_data,
          TrainConfig config);

  TrainReport run(const std::string& out_dir, const TrainHooks& hooks = {});

  /// Entry-mean loss of `params` over a whole dataset (no shuffling).
  double dataset_loss(const seq::SequenceDataset& data, const nn::LstmParams& params) const;

  /// Mean loss and gradient accumulation for one batch; returns the batch
  /// mean loss over valid entries and the number of valid entries.
  std::pair<double, long long> batch_gradients(const seq::SequenceBatch& batch,
                                               const nn::LstmParams& params,
                                               nn::LstmParams& grads) const;

 private:
  const seq::SequenceDataset& train_data_;
  const seq::SequenceDataset& val_data_;
  TrainConfig config_;
};

}  // namespace phasecast::train

#endif  // PHASECAST_TRAIN_TRAINER_HPP_

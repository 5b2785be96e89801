#include "phasecast/train/trainer.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "phasecast/nn/network.hpp"

namespace phasecast::train {

namespace {

// Samples processed together through the batched forward/backward. Keeps the
// BPTT cache comfortably in cache-friendly territory.
constexpr std::size_t kChunk = 64;

// Convert one chunk of float32 windows into per-timestep double matrices.
void chunk_to_timesteps(const seq::SequenceBatch& batch, std::size_t first, std::size_t count,
                        std::vector<Eigen::MatrixXd>& x) {
  const int window = batch.window;
  const int width = batch.feature_width;
  const std::size_t window_elems = static_cast<std::size_t>(window) * width;
  x.assign(static_cast<std::size_t>(window), Eigen::MatrixXd(count, width));
  for (std::size_t s = 0; s < count; ++s) {
    const float* src = batch.windows.data() + (first + s) * window_elems;
    for (int t = 0; t < window; ++t) {
      x[static_cast<std::size_t>(t)].row(static_cast<Eigen::Index>(s)) =
          Eigen::Map<const Eigen::VectorXf>(src + static_cast<std::size_t>(t) * width, width)
              .cast<double>();
    }
  }
}

long long count_valid(const seq::SequenceBatch& batch) {
  long long valid = 0;
  for (double m : batch.masks) {
    if (m != 0.0) ++valid;
  }
  return valid;
}

}  // namespace

Trainer::Trainer(const seq::SequenceDataset& train_data, const seq::SequenceDataset& val_data,
                 TrainConfig config)
    : train_data_(train_data), val_data_(val_data), config_(config) {
  if (train_data_.feature_width() != val_data_.feature_width()) {
    throw seq::WidthMismatchError("training and validation widths differ");
  }
}

std::pair<double, long long> Trainer::batch_gradients(const seq::SequenceBatch& batch,
                                                      const nn::LstmParams& params,
                                                      nn::LstmParams& grads) const {
  const long long valid_total = count_valid(batch);
  if (valid_total == 0) throw NoValidEntriesError("batch has no valid target entries");

  double loss_sum = 0.0;
  std::vector<Eigen::MatrixXd> x;
  for (std::size_t first = 0; first < static_cast<std::size_t>(batch.count); first += kChunk) {
    const std::size_t count = std::min(kChunk, static_cast<std::size_t>(batch.count) - first);
    chunk_to_timesteps(batch, first, count, x);

    nn::ForwardCache cache;
    Eigen::MatrixXd pred = nn::forward(params, x, &cache);

    // Batch loss is the mean over valid entries of the whole batch, so each
    // entry's gradient carries 1/valid_total.
    Eigen::MatrixXd dpred = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count),
                                                  nn::kOutputSize);
    for (std::size_t s = 0; s < count; ++s) {
      const double* truth = batch.targets.data() + (first + s) * nn::kOutputSize;
      const double* mask = batch.masks.data() + (first + s) * nn::kOutputSize;
      for (int p = 0; p < nn::kOutputSize; ++p) {
        if (mask[p] == 0.0) continue;
        PointLoss pl = loss_pointwise(config_.loss, pred(static_cast<Eigen::Index>(s), p),
                                      truth[p], config_.mape_floor);
        loss_sum += pl.value;
        dpred(static_cast<Eigen::Index>(s), p) =
            pl.dvalue_dpred / static_cast<double>(valid_total);
      }
    }
    nn::backward(params, cache, dpred, grads);
  }
  return {loss_sum / static_cast<double>(valid_total), valid_total};
}

double Trainer::dataset_loss(const seq::SequenceDataset& data,
                             const nn::LstmParams& params) const {
  seq::BatchStream stream(data, config_.batch_size, /*seed=*/0, /*epoch=*/0, /*shuffle=*/false);
  seq::SequenceBatch batch;
  double loss_sum = 0.0;
  long long valid_total = 0;
  std::vector<Eigen::MatrixXd> x;
  while (stream.next(batch)) {
    for (std::size_t first = 0; first < static_cast<std::size_t>(batch.count); first += kChunk) {
      const std::size_t count = std::min(kChunk, static_cast<std::size_t>(batch.count) - first);
      chunk_to_timesteps(batch, first, count, x);
      Eigen::MatrixXd pred = nn::forward(params, x);
      for (std::size_t s = 0; s < count; ++s) {
        const double* truth = batch.targets.data() + (first + s) * nn::kOutputSize;
        const double* mask = batch.masks.data() + (first + s) * nn::kOutputSize;
        for (int p = 0; p < nn::kOutputSize; ++p) {
          if (mask[p] == 0.0) continue;
          loss_sum += loss_pointwise(config_.loss, pred(static_cast<Eigen::Index>(s), p),
                                     truth[p], config_.mape_floor)
                          .value;
          ++valid_total;
        }
      }
    }
  }
  if (valid_total == 0) throw NoValidEntriesError("dataset has no valid target entries");
  return loss_sum / static_cast<double>(valid_total);
}

TrainReport Trainer::run(const std::string& out_dir, const TrainHooks& hooks) {
  std::filesystem::create_directories(out_dir);
  nn::LstmParams params =
      nn::LstmParams::init(train_data_.feature_width(), config_.neurons, config_.seed);
  AdamOptimizer optimizer(train_data_.feature_width(), config_.neurons, config_.adam);

  auto validation_loss = [&](const nn::LstmParams& p) {
    return hooks.validation_override ? hooks.validation_override(p) : dataset_loss(val_data_, p);
  };

  TrainReport report;
  // The untrained model sets the plateau baseline: an epoch only counts as
  // an improvement if it beats the best validation loss seen so far.
  report.baseline_val_loss = validation_loss(params);
  double best_val = report.baseline_val_loss;
  double lr = config_.learning_rate;
  int epochs_since_improvement = 0;

  for (int epoch = 1; epoch <= config_.epochs; ++epoch) {
    seq::BatchStream stream(train_data_, config_.batch_size, config_.seed,
                            static_cast<std::uint64_t>(epoch), /*shuffle=*/true);
    seq::SequenceBatch batch;
    nn::LstmParams grads = nn::LstmParams::zeros(train_data_.feature_width(), config_.neurons);
    double epoch_loss_sum = 0.0;
    long long epoch_valid = 0;
    long long batch_id = 0;
    while (stream.next(batch)) {
      grads.set_zero();
      try {
        auto [batch_loss, valid] = batch_gradients(batch, params, grads);
        epoch_loss_sum += batch_loss * static_cast<double>(valid);
        epoch_valid += valid;
      } catch (const nn::NonFiniteActivationError& e) {
        throw nn::NonFiniteActivationError(std::string(e.what()) + " (epoch " +
                                           std::to_string(epoch) + ", batch " +
                                           std::to_string(batch_id) + ")");
      }
      optimizer.step(params, grads, lr);
      ++batch_id;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = lr;
    stats.train_loss = epoch_valid > 0 ? epoch_loss_sum / static_cast<double>(epoch_valid) : 0.0;
    stats.val_loss = validation_loss(params);

    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%02d.ckpt", epoch);
    stats.checkpoint = (std::filesystem::path(out_dir) / name).string();
    nn::Checkpoint ck;
    ck.params = params;
    ck.manifest_hash = train_data_.manifest_hash();
    ck.loss_kind = to_string(config_.loss);
    ck.epoch = epoch;
    ck.validation_loss = stats.val_loss;
    ck.save(stats.checkpoint);

    if (stats.val_loss < best_val) {
      best_val = stats.val_loss;
      report.best_epoch = epoch;
      report.best_checkpoint = stats.checkpoint;
      epochs_since_improvement = 0;
    } else {
      ++epochs_since_improvement;
      if (epochs_since_improvement >= config_.plateau_patience) {
        lr *= config_.plateau_factor;
        epochs_since_improvement = 0;
      }
    }

    if (hooks.on_epoch) hooks.on_epoch(stats);
    report.epochs.push_back(std::move(stats));
  }

  if (report.best_epoch == 0 && !report.epochs.empty()) {
    // No epoch beat the untrained baseline; the best checkpoint is still the
    // best epoch among those trained.
    int best = 0;
    for (std::size_t i = 1; i < report.epochs.size(); ++i) {
      if (report.epochs[i].val_loss < report.epochs[static_cast<std::size_t>(best)].val_loss) {
        best = static_cast<int>(i);
      }
    }
    report.best_epoch = report.epochs[static_cast<std::size_t>(best)].epoch;
    report.best_checkpoint = report.epochs[static_cast<std::size_t>(best)].checkpoint;
  }

  // Flag the winner with a stable name.
  const std::string best_path = (std::filesystem::path(out_dir) / "best.ckpt").string();
  std::filesystem::copy_file(report.best_checkpoint, best_path,
                             std::filesystem::copy_options::overwrite_existing);
  report.best_checkpoint = best_path;
  report.save_tsv((std::filesystem::path(out_dir) / "train_report.tsv").string());
  return report;
}

void TrainReport::save_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write train report: " + path);
  char line[256];
  std::snprintf(line, sizeof(line), "# baseline_val_loss\t%.12g\n", baseline_val_loss);
  out << line;
  out << "epoch\ttrain_loss\tval_loss\tlearning_rate\tcheckpoint\tbest\n";
  for (const auto& e : epochs) {
    std::snprintf(line, sizeof(line), "%d\t%.12g\t%.12g\t%.12g\t", e.epoch, e.train_loss,
                  e.val_loss, e.learning_rate);
    out << line << std::filesystem::path(e.checkpoint).filename().string() << "\t"
        << (e.epoch == best_epoch ? 1 : 0) << "\n";
  }
}

}  // namespace phasecast::train

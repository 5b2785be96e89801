#ifndef PHASECAST_TRAIN_GRID_SEARCH_HPP_
#define PHASECAST_TRAIN_GRID_SEARCH_HPP_

#include <string>
#include <vector>

#include "phasecast/train/trainer.hpp"

namespace phasecast::train {

struct GridSearchConfig {
  std::vector<double> learning_rates;
  std::vector<int> neuron_counts;
  long long budget_samples = 0;       // max training samples per cell
  long long eval_every = 250000;      // validation checks per samples processed
  std::size_t batch_size = seq::kDefaultBatchSize;
  std::uint64_t seed = 0;
  double mape_floor = kDefaultMapeFloor;
};

struct GridCell {
  double learning_rate = 0.0;
  int neurons = 0;
  double best_val_mape = 0.0;  // minimum validation MAPE reached
  bool failed = false;
  std::string error;
};

struct GridResult {
  std::vector<GridCell> cells;  // row-major: learning_rates x neuron_counts

  const GridCell& at(std::size_t lr_idx, std::size_t n_idx, std::size_t n_cols) const {
    return cells[lr_idx * n_cols + n_idx];
  }
  /// Table-formatted text: one row per learning rate, one column per N.
  std::string to_table(const GridSearchConfig& config) const;
};

/// Short MAPE-trained runs per (learning rate, N) cell, checking validation
/// MAPE every `eval_every` samples and recording the minimum reached.
/// A failing cell is flagged without aborting the others.
GridResult grid_search(const seq::SequenceDataset& train_data,
                       const seq::SequenceDataset& val_data, const GridSearchConfig& config);

}  // namespace phasecast::train

#endif  // PHASECAST_TRAIN_GRID_SEARCH_HPP_

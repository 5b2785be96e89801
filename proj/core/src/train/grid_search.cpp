#include "phasecast/train/grid_search.hpp"

#include <cstdio>
#include <sstream>

#include "phasecast/nn/network.hpp"

namespace phasecast::train {

namespace {

double run_cell(const seq::SequenceDataset& train_data, const seq::SequenceDataset& val_data,
                const GridSearchConfig& config, double lr, int neurons) {
  TrainConfig tc;
  tc.loss = LossKind::kMape;
  tc.neurons = neurons;
  tc.learning_rate = lr;
  tc.batch_size = config.batch_size;
  tc.seed = config.seed;
  tc.mape_floor = config.mape_floor;
  Trainer trainer(train_data, val_data, tc);

  nn::LstmParams params = nn::LstmParams::init(train_data.feature_width(), neurons, config.seed);
  AdamOptimizer optimizer(train_data.feature_width(), neurons, tc.adam);

  double best_mape = trainer.dataset_loss(val_data, params);
  long long processed = 0;
  long long next_eval = config.eval_every;
  std::uint64_t epoch = 1;
  nn::LstmParams grads = nn::LstmParams::zeros(train_data.feature_width(), neurons);

  while (processed < config.budget_samples) {
    seq::BatchStream stream(train_data, config.batch_size, config.seed, epoch++, true);
    seq::SequenceBatch batch;
    while (processed < config.budget_samples && stream.next(batch)) {
      grads.set_zero();
      trainer.batch_gradients(batch, params, grads);
      optimizer.step(params, grads, lr);
      processed += batch.count;
      if (processed >= next_eval || processed >= config.budget_samples) {
        best_mape = std::min(best_mape, trainer.dataset_loss(val_data, params));
        next_eval += config.eval_every;
      }
    }
  }
  return best_mape;
}

}  // namespace

GridResult grid_search(const seq::SequenceDataset& train_data,
                       const seq::SequenceDataset& val_data, const GridSearchConfig& config) {
  GridResult result;
  for (double lr : config.learning_rates) {
    for (int n : config.neuron_counts) {
      GridCell cell;
      cell.learning_rate = lr;
      cell.neurons = n;
      try {
        cell.best_val_mape = run_cell(train_data, val_data, config, lr, n);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::string GridResult::to_table(const GridSearchConfig& config) const {
  std::ostringstream out;
  out << "# validation MAPE by (learning rate, neurons)\n";
  out << "learning_rate";
  for (int n : config.neuron_counts) out << "\tN=" << n;
  out << "\n";
  char buf[64];
  const std::size_t cols = config.neuron_counts.size();
  for (std::size_t r = 0; r < config.learning_rates.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%g", config.learning_rates[r]);
    out << buf;
    for (std::size_t c = 0; c < cols; ++c) {
      const GridCell& cell = at(r, c, cols);
      if (cell.failed) {
        out << "\tFAIL";
      } else {
        std::snprintf(buf, sizeof(buf), "\t%.2f", cell.best_val_mape);
        out << buf;
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace phasecast::train

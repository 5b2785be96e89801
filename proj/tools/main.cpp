// phasecast command line: simulate -> prepare -> train -> evaluate/compare
// -> predict, plus the one-config `experiment` orchestrator.

#include <CLI11.hpp>
#include <sstream>
#include <fstream>

#include <deque>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "phasecast/eval/compare.hpp"
#include "phasecast/eval/report.hpp"
#include "phasecast/experiment/experiment.hpp"
#include "phasecast/ingest/day_container.hpp"
#include "phasecast/ingest/encode.hpp"
#include "phasecast/ingest/schema.hpp"
#include "phasecast/nn/checkpoint.hpp"
#include "phasecast/nn/network.hpp"
#include "phasecast/seq/sequencer.hpp"
#include "phasecast/sim/config.hpp"
#include "phasecast/train/grid_search.hpp"
#include "phasecast/train/trainer.hpp"
#include "phasecast/util/hash.hpp"
#include "phasecast/util/time.hpp"

namespace fs = std::filesystem;
using namespace phasecast;

namespace {

std::pair<std::string, std::string> split_day_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) {
    throw CLI::ValidationError("--day", "expected DATE=RECORDS_FILE, got " + arg);
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

seq::SequenceDataset load_dataset(const std::vector<std::string>& paths,
                                  std::deque<ingest::DayContainer>& storage) {
  // deque: element addresses stay stable across later loads
  std::vector<const ingest::DayContainer*> refs;
  for (const auto& p : paths) {
    storage.push_back(ingest::DayContainer::load(p));
    refs.push_back(&storage.back());
  }
  return seq::SequenceDataset(refs);
}

int run(int argc, char** argv) {
  CLI::App app{"Switching-time prediction toolkit for coordinated-actuated signals"};
  app.require_subcommand(1);

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "Generate one day of per-second telemetry");
  std::string sim_config, sim_date, sim_out;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--config", sim_config, "intersection config file")->required();
  simulate->add_option("--date", sim_date, "YYYY-MM-DD")->required();
  simulate->add_option("--seed", sim_seed, "simulation seed")->required();
  simulate->add_option("--out", sim_out, "output directory")->required();
  simulate->callback([&] {
    sim::IntersectionConfig config = sim::load_intersection_config(sim_config);
    fs::create_directories(sim_out);
    const std::string path =
        (fs::path(sim_out) / ("records_" + sim_date + "_seed" + std::to_string(sim_seed) +
                              ".jsonl"))
            .string();
    experiment::write_day_records(config, parse_date(sim_date), sim_seed, path);
    std::cout << path << "\n";
  });

  // ---- prepare ----
  auto* prepare = app.add_subcommand(
      "prepare", "Freeze a schema manifest from sample days and encode day files");
  std::string prep_config, prep_hints, prep_manifest_out, prep_manifest_in, prep_out_dir;
  std::vector<std::string> prep_sample_days, prep_days;
  prepare->add_option("--config", prep_config, "intersection config file")->required();
  prepare->add_option("--hints", prep_hints, "variable-kind hints json");
  prepare->add_option("--sample-day", prep_sample_days,
                      "DATE=RECORDS_FILE used for schema bounds (repeatable)");
  prepare->add_option("--manifest-out", prep_manifest_out, "where to write the frozen manifest");
  prepare->add_option("--manifest", prep_manifest_in, "reuse an existing manifest");
  prepare->add_option("--day", prep_days, "DATE=RECORDS_FILE to encode (repeatable)")->required();
  prepare->add_option("--out-dir", prep_out_dir, "directory for encoded day containers")
      ->required();
  prepare->callback([&] {
    sim::IntersectionConfig config = sim::load_intersection_config(prep_config);
    ingest::SchemaManifest manifest;
    if (!prep_manifest_in.empty()) {
      manifest = ingest::SchemaManifest::load(prep_manifest_in);
    } else {
      if (prep_hints.empty() || prep_sample_days.empty()) {
        throw CLI::ValidationError("prepare",
                                   "need --hints and --sample-day (or --manifest) to build a schema");
      }
      std::vector<std::string> sample_paths;
      for (const auto& arg : prep_sample_days) sample_paths.push_back(split_day_arg(arg).second);
      manifest = experiment::schema_from_record_files(sample_paths,
                                                      ingest::SchemaHints::load(prep_hints));
      if (prep_manifest_out.empty()) {
        throw CLI::ValidationError("prepare", "--manifest-out is required when building a schema");
      }
      manifest.save(prep_manifest_out);
      std::cout << "manifest " << prep_manifest_out << " features " << manifest.feature_count
                << " hash " << hash_hex(manifest.content_hash()) << "\n";
    }
    ingest::Encoder encoder(manifest, [](const std::string& w) { std::cerr << "warning: " << w << "\n"; });
    fs::create_directories(prep_out_dir);
    for (const auto& arg : prep_days) {
      auto [date, records] = split_day_arg(arg);
      ingest::DayContainer day =
          experiment::prepare_day(records, encoder, config, parse_date(date));
      const std::string path = (fs::path(prep_out_dir) / (date + ".bin")).string();
      day.save(path);
      std::cout << path << " rows " << day.rows() << "\n";
    }
  });

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "Train one model with one loss");
  std::string tr_loss = "mse", tr_out, tr_val, tr_manifest;
  std::vector<std::string> tr_data;
  train::TrainConfig tr_config;
  train_cmd->add_option("--loss", tr_loss, "mse|mae|mape|tdse")->required();
  train_cmd->add_option("--lr", tr_config.learning_rate, "initial learning rate");
  train_cmd->add_option("--neurons", tr_config.neurons, "LSTM units N");
  train_cmd->add_option("--epochs", tr_config.epochs, "training epochs");
  train_cmd->add_option("--seed", tr_config.seed, "training seed");
  train_cmd->add_option("--batch-size", tr_config.batch_size, "sequences per batch");
  train_cmd->add_option("--data", tr_data, "encoded training day files")->required();
  train_cmd->add_option("--val", tr_val, "encoded validation day file")->required();
  train_cmd->add_option("--out", tr_out, "output directory")->required();
  train_cmd->add_option("--manifest", tr_manifest, "manifest to hash-check against the data");
  train_cmd->callback([&] {
    tr_config.loss = train::loss_kind_from_string(tr_loss);
    std::deque<ingest::DayContainer> storage;
    seq::SequenceDataset train_set = load_dataset(tr_data, storage);
    seq::SequenceDataset val_set = load_dataset({tr_val}, storage);
    if (!tr_manifest.empty()) {
      const auto manifest = ingest::SchemaManifest::load(tr_manifest);
      if (manifest.content_hash() != train_set.manifest_hash()) {
        throw eval::HashMismatchError("manifest does not match the encoded training data");
      }
    }
    fs::create_directories(tr_out);
    train_set.save_index((fs::path(tr_out) / "train_index.tsv").string(), tr_data);
    train::Trainer trainer(train_set, val_set, tr_config);
    train::TrainHooks hooks;
    hooks.on_epoch = [](const train::EpochStats& e) {
      std::cerr << "epoch " << e.epoch << ": train " << e.train_loss << " val " << e.val_loss
                << " lr " << e.learning_rate << "\n";
    };
    train::TrainReport report = trainer.run(tr_out, hooks);
    std::cout << "best epoch " << report.best_epoch << " checkpoint " << report.best_checkpoint
              << "\n";
  });

  // ---- grid-search ----
  auto* grid = app.add_subcommand("grid-search", "Learning-rate x neurons exploration");
  std::string gs_lrs = "0.01", gs_neurons = "12", gs_out, gs_val;
  std::vector<std::string> gs_data;
  train::GridSearchConfig gs_config;
  grid->add_option("--lrs", gs_lrs, "comma-separated learning rates");
  grid->add_option("--neurons", gs_neurons, "comma-separated N values");
  grid->add_option("--budget", gs_config.budget_samples, "max training samples per cell")
      ->required();
  grid->add_option("--eval-every", gs_config.eval_every, "validation check interval (samples)");
  grid->add_option("--seed", gs_config.seed, "seed");
  grid->add_option("--batch-size", gs_config.batch_size, "sequences per batch");
  grid->add_option("--data", gs_data, "encoded training day files")->required();
  grid->add_option("--val", gs_val, "encoded validation day file")->required();
  grid->add_option("--out", gs_out, "table output file (stdout when omitted)");
  grid->callback([&] {
    gs_config.learning_rates = parse_double_list(gs_lrs);
    gs_config.neuron_counts = parse_int_list(gs_neurons);
    std::deque<ingest::DayContainer> storage;
    seq::SequenceDataset train_set = load_dataset(gs_data, storage);
    seq::SequenceDataset val_set = load_dataset({gs_val}, storage);
    train::GridResult result = train::grid_search(train_set, val_set, gs_config);
    const std::string table = result.to_table(gs_config);
    if (gs_out.empty()) {
      std::cout << table;
    } else {
      std::ofstream out(gs_out);
      out << table;
      std::cout << gs_out << "\n";
    }
  });

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand("evaluate", "Horizon-bucketed report on test data");
  std::string ev_checkpoint, ev_out;
  std::vector<std::string> ev_data;
  evaluate->add_option("--checkpoint", ev_checkpoint, "trained checkpoint")->required();
  evaluate->add_option("--data", ev_data, "encoded test day files")->required();
  evaluate->add_option("--out", ev_out, "output path prefix (.report.tsv/.cdf.tsv)")->required();
  evaluate->callback([&] {
    nn::Checkpoint ck = nn::Checkpoint::load(ev_checkpoint);
    std::deque<ingest::DayContainer> storage;
    seq::SequenceDataset test_set = load_dataset(ev_data, storage);
    eval::HorizonReport report = eval::evaluate_model(ck, test_set);
    report.save(ev_out);
    std::cout << ev_out << ".report.tsv overall_mae " << report.overall_mae << "\n";
  });

  // ---- compare ----
  auto* compare = app.add_subcommand("compare", "Rank models from saved reports");
  std::vector<std::string> cmp_reports;
  std::string cmp_out;
  compare->add_option("--reports", cmp_reports, "report path prefixes (repeatable)")->required();
  compare->add_option("--out", cmp_out, "comparison table file (stdout when omitted)");
  compare->callback([&] {
    std::map<std::string, eval::HorizonReport> reports;
    for (const auto& prefix : cmp_reports) {
      eval::HorizonReport r = eval::HorizonReport::load(prefix);
      reports.emplace(r.loss_kind, std::move(r));
    }
    eval::ModelComparison cmp = eval::compare_models(reports);
    const std::string table = cmp.to_table(reports);
    if (cmp_out.empty()) {
      std::cout << table;
    } else {
      std::ofstream out(cmp_out);
      out << table;
      std::cout << cmp_out << "\n";
    }
  });

  // ---- predict ----
  auto* predict = app.add_subcommand("predict", "Integer second predictions for one window");
  std::string pr_checkpoint, pr_window;
  predict->add_option("--checkpoint", pr_checkpoint, "trained checkpoint")->required();
  predict->add_option("--window-file", pr_window,
                      "encoded day container; the last 120 rows form the window")
      ->required();
  predict->callback([&] {
    nn::Checkpoint ck = nn::Checkpoint::load(pr_checkpoint);
    ingest::DayContainer day = ingest::DayContainer::load(pr_window);
    if (day.manifest_hash() != ck.manifest_hash) {
      throw eval::HashMismatchError("window file was encoded against a different manifest");
    }
    if (day.rows() < seq::kWindowSeconds) {
      throw std::runtime_error("window file has fewer than 120 rows");
    }
    Eigen::MatrixXd window(seq::kWindowSeconds, day.feature_width());
    const std::size_t first = day.rows() - seq::kWindowSeconds;
    for (int t = 0; t < seq::kWindowSeconds; ++t) {
      const float* src = day.features(first + static_cast<std::size_t>(t));
      for (int c = 0; c < day.feature_width(); ++c) window(t, c) = src[c];
    }
    const Eigen::VectorXd pred = nn::forward_window(ck.params, window);
    const auto seconds = nn::predict_seconds(pred);
    for (int p = 0; p < nn::kOutputSize; ++p) {
      std::cout << seconds[static_cast<std::size_t>(p)] << (p + 1 < nn::kOutputSize ? " " : "\n");
    }
  });

  // ---- experiment ----
  auto* experiment_cmd =
      app.add_subcommand("experiment", "Full multi-loss study from one config file");
  std::string ex_config;
  bool ex_progress = false;
  experiment_cmd->add_option("--config", ex_config, "experiment config json")->required();
  experiment_cmd->add_flag("--progress", ex_progress, "log progress to stderr");
  experiment_cmd->callback([&] {
    experiment::ExperimentConfig config = experiment::ExperimentConfig::load(ex_config);
    experiment::ExperimentResult result = experiment::run_experiment(config, ex_progress);
    std::cout << result.comparison.to_table(result.reports);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e);  // --help
    }
    app.exit(e);
    return 2;  // usage error
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

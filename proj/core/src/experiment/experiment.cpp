#include "phasecast/experiment/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "phasecast/label/targets.hpp"
#include "phasecast/seq/sequencer.hpp"
#include "phasecast/sim/simulator.hpp"

namespace phasecast::experiment {

namespace fs = std::filesystem;

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ExperimentError("cannot open experiment config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ExperimentError(std::string("bad experiment config json: ") + e.what());
  }

  ExperimentConfig cfg;
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&base](const std::string& p) {
    return fs::path(p).is_absolute() ? p : (base / p).string();
  };
  cfg.intersection_config = resolve(j.at("intersection_config").get<std::string>());
  cfg.hints = resolve(j.at("hints").get<std::string>());
  cfg.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("span")) {
    cfg.span_override = {parse_time_of_day(j["span"].at("start").get<std::string>()),
                         parse_time_of_day(j["span"].at("end").get<std::string>())};
  }
  if (j.contains("corruption")) {
    sim::FeedCorruption c;
    c.dropout_prob = j["corruption"].value("dropout_prob", 0.0);
    c.duplicate_prob = j["corruption"].value("duplicate_prob", 0.0);
    cfg.corruption_override = c;
  }
  for (const auto& d : j.at("days")) {
    cfg.days.push_back({d.at("date").get<std::string>(), d.at("seed").get<std::uint64_t>()});
  }
  cfg.schema_sample_days = j.at("schema_sample_days").get<std::vector<std::string>>();
  cfg.train_days = j.at("train_days").get<std::vector<std::string>>();
  cfg.val_day = j.at("val_day").get<std::string>();
  cfg.test_day = j.at("test_day").get<std::string>();
  cfg.losses = j.value("losses", std::vector<std::string>{"mse", "mae", "mape", "tdse"});

  const auto& t = j.at("training");
  cfg.training.neurons = t.value("neurons", 47);
  cfg.training.learning_rate = t.value("learning_rate", 0.01);
  cfg.training.epochs = t.value("epochs", 10);
  cfg.training.batch_size = t.value("batch_size", std::size_t{seq::kDefaultBatchSize});
  cfg.training.seed = t.value("seed", std::uint64_t{0});
  cfg.training.plateau_factor = t.value("plateau_factor", 0.3);

  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (days.empty()) throw ExperimentError("no simulated days listed");
  std::set<std::string> all;
  for (const auto& d : days) {
    if (!all.insert(d.date).second) throw ExperimentError("duplicate day " + d.date);
  }
  auto known = [&](const std::string& d) {
    if (!all.count(d)) throw ExperimentError("day " + d + " not in the simulated day list");
  };
  std::set<std::string> train_set(train_days.begin(), train_days.end());
  for (const auto& d : train_days) known(d);
  for (const auto& d : schema_sample_days) known(d);
  known(val_day);
  known(test_day);
  if (train_set.count(val_day) || train_set.count(test_day) || val_day == test_day) {
    throw ExperimentError("train/val/test day sets must be disjoint");
  }
  // Generalization to the future: holdout days come after every training day.
  for (const auto& d : train_days) {
    if (parse_date(val_day) <= parse_date(d) || parse_date(test_day) <= parse_date(d)) {
      throw ExperimentError("val/test days must be chronologically after all training days");
    }
  }
  for (const auto& loss : losses) train::loss_kind_from_string(loss);
  if (losses.empty()) throw ExperimentError("no losses listed");
}

void write_day_records(const sim::IntersectionConfig& config, UnixSeconds date,
                       std::uint64_t seed, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ExperimentError("cannot write records: " + path);
  sim::FeedCorruptor corruptor(config.corruption.dropout_prob, config.corruption.duplicate_prob,
                               seed ^ 0x7fb5d329728ea185ULL);
  sim::simulate_day(config, date, seed, [&](const sim::PerSecondRecord& r) {
    const int copies = corruptor.copies_for_next();
    for (int i = 0; i < copies; ++i) out << r.to_json_line() << "\n";
  });
  if (!out) throw ExperimentError("short write: " + path);
}

ingest::SchemaManifest schema_from_record_files(const std::vector<std::string>& paths,
                                                const ingest::SchemaHints& hints) {
  if (paths.empty()) throw ExperimentError("schema needs at least one sample day");
  ingest::SchemaBuilder builder(hints);
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw ExperimentError("cannot open records: " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) builder.observe(ingest::flatten_record(line));
    }
  }
  return builder.finalize();
}

ingest::DayContainer prepare_day(const std::string& records_path,
                                 const ingest::Encoder& encoder,
                                 const sim::IntersectionConfig& config, UnixSeconds date) {
  const UnixSeconds start = date + config.span_start;
  const UnixSeconds end = date + config.span_end;  // exclusive
  const std::size_t n = static_cast<std::size_t>(end - start);

  // Phase ids in ascending order give the target column order.
  std::vector<int> phase_ids;
  for (const auto& p : config.phases) phase_ids.push_back(p.id);
  std::sort(phase_ids.begin(), phase_ids.end());
  if (phase_ids.size() != ingest::kPhaseCount) {
    throw ExperimentError("prepare_day expects exactly 6 phases");
  }

  std::vector<ingest::FeatureVector> features(
      n, ingest::FeatureVector{});
  std::vector<bool> filled(n, false);
  label::DayStates states;
  states.start = start;
  states.states.assign(n, {});
  for (auto& row : states.states) row.fill(label::PhaseObservation::kMissing);

  std::ifstream in(records_path);
  if (!in) throw ExperimentError("cannot open records: " + records_path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ingest::FlatRow row = ingest::flatten_record(line);
    if (row.timestamp < start || row.timestamp >= end) continue;
    const std::size_t idx = static_cast<std::size_t>(row.timestamp - start);
    if (filled[idx]) continue;  // duplicate: first record wins
    filled[idx] = true;
    features[idx] = encoder.encode(row);
    for (int p = 0; p < ingest::kPhaseCount; ++p) {
      const std::string key =
          "signal.phases." + std::to_string(phase_ids[static_cast<std::size_t>(p)]) + ".state";
      const ingest::LeafValue* leaf = row.find(key);
      if (leaf && leaf->label) {
        states.states[idx][static_cast<std::size_t>(p)] =
            *leaf->label == "green" ? label::PhaseObservation::kGreen
                                    : label::PhaseObservation::kNotGreen;
      }
    }
  }

  const auto targets = label::compute_targets(states);

  ingest::DayContainer day(encoder.width(), start, encoder.manifest().content_hash());
  std::vector<float> target_buf(ingest::kPhaseCount), mask_buf(ingest::kPhaseCount);
  for (std::size_t i = 0; i < n; ++i) {
    const ingest::FeatureVector& fv =
        filled[i] ? features[i] : encoder.all_missing(start + static_cast<UnixSeconds>(i));
    if (!filled[i]) features[i] = fv;
    for (int p = 0; p < ingest::kPhaseCount; ++p) {
      const bool valid = targets[i].valid[static_cast<std::size_t>(p)];
      mask_buf[static_cast<std::size_t>(p)] = valid ? 1.0f : 0.0f;
      target_buf[static_cast<std::size_t>(p)] =
          valid ? static_cast<float>(targets[i].normalized[static_cast<std::size_t>(p)])
                : ingest::kMissingValue;
    }
    day.append_row(features[i].features.data(), target_buf.data(), mask_buf.data());
  }
  return day;
}

TrendChecks check_trends(const std::map<std::string, eval::HorizonReport>& reports) {
  TrendChecks trends;
  if (!reports.count("mse") || !reports.count("mae") || !reports.count("mape") ||
      !reports.count("tdse")) {
    return trends;
  }
  auto mae_of = [&](const std::string& loss, int bucket) {
    return reports.at(loss).buckets[static_cast<std::size_t>(bucket)].mae;
  };
  const std::vector<std::string> all = {"mse", "mae", "mape", "tdse"};

  trends.mape_wins_short = true;
  for (const auto& loss : all) {
    if (loss != "mape" && mae_of(loss, 0) <= mae_of("mape", 0)) trends.mape_wins_short = false;
  }

  auto mean_short = [&](const std::string& loss) {
    double sum = 0.0;
    for (int b = 0; b < 5; ++b) sum += mae_of(loss, b);
    return sum / 5.0;
  };
  trends.tdse_wins_mean_0_100 = true;
  for (const auto& loss : all) {
    if (loss != "tdse" && mean_short(loss) <= mean_short("tdse")) {
      trends.tdse_wins_mean_0_100 = false;
    }
  }

  trends.mse_beats_mape_long = true;
  for (int b = 5; b < eval::kBucketCount; ++b) {
    if (mae_of("mse", b) >= mae_of("mape", b)) trends.mse_beats_mape_long = false;
  }
  return trends;
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool log_progress) {
  auto log = [&](const std::string& msg) {
    if (log_progress) std::cerr << "[experiment] " << msg << "\n";
  };

  sim::IntersectionConfig intersection = sim::load_intersection_config(config.intersection_config);
  if (config.span_override) {
    intersection.span_start = config.span_override->first;
    intersection.span_end = config.span_override->second;
    intersection.validate();
  }
  if (config.corruption_override) intersection.corruption = *config.corruption_override;

  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir / "records");
  fs::create_directories(out_dir / "encoded");
  fs::create_directories(out_dir / "runs");
  fs::create_directories(out_dir / "reports");

  // 1. Simulate the telemetry feed.
  std::map<std::string, std::string> record_files;
  for (const auto& day : config.days) {
    const std::string path = (out_dir / "records" / (day.date + ".jsonl")).string();
    write_day_records(intersection, parse_date(day.date), day.seed, path);
    record_files[day.date] = path;
    log("simulated " + day.date);
  }

  // 2. Freeze the schema on the sample days.
  std::vector<std::string> sample_paths;
  for (const auto& d : config.schema_sample_days) sample_paths.push_back(record_files.at(d));
  const ingest::SchemaHints hints = ingest::SchemaHints::load(config.hints);
  ingest::SchemaManifest manifest = schema_from_record_files(sample_paths, hints);
  manifest.save((out_dir / "manifest.json").string());
  log("schema frozen: " + std::to_string(manifest.feature_count) + " features");

  // 3. Encode every day against the frozen manifest.
  ingest::Encoder encoder(manifest);
  std::map<std::string, ingest::DayContainer> encoded;
  for (const auto& day : config.days) {
    ingest::DayContainer container =
        prepare_day(record_files.at(day.date), encoder, intersection, parse_date(day.date));
    container.save((out_dir / "encoded" / (day.date + ".bin")).string());
    encoded.emplace(day.date, std::move(container));
    log("encoded " + day.date);
  }

  auto dataset_for = [&](const std::vector<std::string>& dates) {
    std::vector<const ingest::DayContainer*> days;
    for (const auto& d : dates) days.push_back(&encoded.at(d));
    return seq::SequenceDataset(days);
  };
  seq::SequenceDataset train_set = dataset_for(config.train_days);
  seq::SequenceDataset val_set = dataset_for({config.val_day});
  seq::SequenceDataset test_set = dataset_for({config.test_day});
  train_set.save_index((out_dir / "train_index.tsv").string(), config.train_days);
  log("train samples: " + std::to_string(train_set.size()));

  // 4. Train one model per loss; 5. evaluate on the held-out test day.
  ExperimentResult result;
  for (const auto& loss_name : config.losses) {
    train::TrainConfig tc = config.training;
    tc.loss = train::loss_kind_from_string(loss_name);
    train::Trainer trainer(train_set, val_set, tc);
    train::TrainHooks hooks;
    if (log_progress) {
      hooks.on_epoch = [&](const train::EpochStats& e) {
        std::ostringstream ss;
        ss << loss_name << " epoch " << e.epoch << ": train " << e.train_loss << ", val "
           << e.val_loss << ", lr " << e.learning_rate;
        log(ss.str());
      };
    }
    train::TrainReport report = trainer.run((out_dir / "runs" / loss_name).string(), hooks);
    nn::Checkpoint best = nn::Checkpoint::load(report.best_checkpoint);
    eval::HorizonReport horizon = eval::evaluate_model(best, test_set);
    horizon.save((out_dir / "reports" / loss_name).string());
    result.train_reports.emplace(loss_name, std::move(report));
    result.reports.emplace(loss_name, std::move(horizon));
    log("trained+evaluated " + loss_name);
  }

  // 6. Four-way comparison and the qualitative trend summary.
  result.comparison = eval::compare_models(result.reports);
  result.trends = check_trends(result.reports);
  std::ofstream summary((out_dir / "comparison.tsv").string());
  summary << result.comparison.to_table(result.reports);
  if (result.reports.size() == 4) {
    summary << "# trend mape_wins_short: " << (result.trends.mape_wins_short ? "yes" : "no")
            << "\n";
    summary << "# trend tdse_wins_mean_0_100: "
            << (result.trends.tdse_wins_mean_0_100 ? "yes" : "no") << "\n";
    summary << "# trend mse_beats_mape_long: "
            << (result.trends.mse_beats_mape_long ? "yes" : "no") << "\n";
  }
  return result;
}

}  // namespace phasecast::experiment

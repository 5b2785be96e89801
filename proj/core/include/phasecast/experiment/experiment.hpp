#ifndef PHASECAST_EXPERIMENT_EXPERIMENT_HPP_
#define PHASECAST_EXPERIMENT_EXPERIMENT_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phasecast/eval/compare.hpp"
#include "phasecast/eval/report.hpp"
#include "phasecast/ingest/day_container.hpp"
#include "phasecast/ingest/encode.hpp"
#include "phasecast/ingest/schema.hpp"
#include "phasecast/sim/config.hpp"
#include "phasecast/train/trainer.hpp"

namespace phasecast::experiment {

struct ExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DaySpec {
  std::string date;       // YYYY-MM-DD
  std::uint64_t seed = 0; // simulation seed
};

/// One config file reproducing the full loss-function study end to end.
struct ExperimentConfig {
  std::string intersection_config;
  std::string hints;
  std::string output_dir;
  std::optional<std::pair<int, int>> span_override;  // (start, end) seconds of day
  std::optional<sim::FeedCorruption> corruption_override;
  std::vector<DaySpec> days;
  std::vector<std::string> schema_sample_days;
  std::vector<std::string> train_days;
  std::string val_day;
  std::string test_day;
  std::vector<std::string> losses;  // subset of mse|mae|mape|tdse
  train::TrainConfig training;      // loss field is overridden per run

  static ExperimentConfig load(const std::string& path);
  void validate() const;
};

/// Simulate one day, apply feed corruption, write one JSON record per line.
void write_day_records(const sim::IntersectionConfig& config, UnixSeconds date,
                       std::uint64_t seed, const std::string& path);

/// Stream record files through the schema builder.
ingest::SchemaManifest schema_from_record_files(const std::vector<std::string>& paths,
                                                const ingest::SchemaHints& hints);

/// Records -> gapless encoded day with targets and masks appended.
ingest::DayContainer prepare_day(const std::string& records_path,
                                 const ingest::Encoder& encoder,
                                 const sim::IntersectionConfig& config, UnixSeconds date);

/// Qualitative loss-comparison flags over the horizon buckets.
struct TrendChecks {
  bool mape_wins_short = false;        // lowest MAE in [0,20)
  bool tdse_wins_mean_0_100 = false;   // lowest mean bucket MAE over [0,100)
  bool mse_beats_mape_long = false;    // lower MAE than mape on every bucket >= [100,120)
};
TrendChecks check_trends(const std::map<std::string, eval::HorizonReport>& reports);

struct ExperimentResult {
  std::map<std::string, train::TrainReport> train_reports;  // by loss
  std::map<std::string, eval::HorizonReport> reports;       // by loss
  eval::ModelComparison comparison;
  TrendChecks trends;
};

/// simulate -> prepare -> train (per loss) -> evaluate -> compare, all under
/// config.output_dir. Byte-identical outputs for identical configs.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                bool log_progress = false);

}  // namespace phasecast::experiment

#endif  // PHASECAST_EXPERIMENT_EXPERIMENT_HPP_

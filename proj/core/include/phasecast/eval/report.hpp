#ifndef PHASECAST_EVAL_REPORT_HPP_
#define PHASECAST_EVAL_REPORT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "phasecast/nn/checkpoint.hpp"
#include "phasecast/seq/sequencer.hpp"

namespace phasecast::eval {

struct HashMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kBucketCount = 10;
constexpr int kBucketWidth = 20;  // seconds of true horizon per bucket

/// One (second, phase) test entry.
struct ErrorEntry {
  int true_seconds = 0;  // ground-truth remaining time, 1..200
  int pred_seconds = 0;  // rounded prediction, 0..200
};

struct BucketStats {
  long long count = 0;
  double mae = 0.0;
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  double whisker_low = 0.0, whisker_high = 0.0;  // Tukey, 1.5 IQR
  long long outliers = 0;
};

/// Per-horizon-bucket MAE table plus the absolute-error CDF for one model on
/// one test set. Buckets partition the TRUE remaining time: [0,20) ... [180,200].
struct HorizonReport {
  std::string loss_kind;
  std::uint64_t test_fingerprint = 0;  // guards compare() against mixed test sets
  std::vector<BucketStats> buckets;    // kBucketCount entries
  std::vector<std::pair<double, double>> cdf;  // (abs error s, cumulative fraction)
  double overall_mae = 0.0;
  long long total_entries = 0;
  double total_abs_error = 0.0;

  void save(const std::string& path_prefix) const;  // .report.tsv / .cdf.tsv
  static HorizonReport load(const std::string& path_prefix);
};

/// Bucket index for a true remaining time in [0, 200]; 200 folds into the
/// last bucket so the partition is exhaustive.
int bucket_of(int true_seconds);

/// Pure aggregation from entries (unit-testable without a model).
HorizonReport report_from_entries(std::vector<ErrorEntry> entries, const std::string& loss_kind,
                                  std::uint64_t test_fingerprint);

/// Run the checkpoint over every valid (second, phase) of the test days.
/// Throws HashMismatchError when the checkpoint was trained against a
/// different manifest than the data.
HorizonReport evaluate_model(const nn::Checkpoint& checkpoint,
                             const seq::SequenceDataset& test_data);

}  // namespace phasecast::eval

#endif  // PHASECAST_EVAL_REPORT_HPP_

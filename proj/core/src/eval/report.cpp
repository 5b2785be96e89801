#include "phasecast/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "phasecast/nn/network.hpp"
#include "phasecast/util/hash.hpp"

namespace phasecast::eval {

int bucket_of(int true_seconds) {
  int b = true_seconds / kBucketWidth;
  if (b >= kBucketCount) b = kBucketCount - 1;  // 200 belongs to [180, 200]
  return b;
}

namespace {

double percentile_sorted(const std::vector<int>& sorted, double q) {
  // Linear interpolation between closest ranks.
  if (sorted.empty()) return 0.0;
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return static_cast<double>(sorted[lo]) * (1.0 - frac) + static_cast<double>(sorted[hi]) * frac;
}

}  // namespace

HorizonReport report_from_entries(std::vector<ErrorEntry> entries, const std::string& loss_kind,
                                  std::uint64_t test_fingerprint) {
  HorizonReport report;
  report.loss_kind = loss_kind;
  report.test_fingerprint = test_fingerprint;
  report.buckets.assign(kBucketCount, BucketStats{});

  std::vector<std::vector<int>> bucket_errors(kBucketCount);
  std::vector<int> all_errors;
  all_errors.reserve(entries.size());
  for (const auto& e : entries) {
    const int err = std::abs(e.pred_seconds - e.true_seconds);
    bucket_errors[static_cast<std::size_t>(bucket_of(e.true_seconds))].push_back(err);
    all_errors.push_back(err);
  }

  double total_abs = 0.0;
  for (int b = 0; b < kBucketCount; ++b) {
    auto& errors = bucket_errors[static_cast<std::size_t>(b)];
    BucketStats& stats = report.buckets[static_cast<std::size_t>(b)];
    stats.count = static_cast<long long>(errors.size());
    if (errors.empty()) continue;
    std::sort(errors.begin(), errors.end());
    double sum = 0.0;
    for (int e : errors) sum += e;
    total_abs += sum;
    stats.mae = sum / static_cast<double>(errors.size());
    stats.q1 = percentile_sorted(errors, 0.25);
    stats.median = percentile_sorted(errors, 0.50);
    stats.q3 = percentile_sorted(errors, 0.75);
    const double iqr = stats.q3 - stats.q1;
    const double lo_fence = stats.q1 - 1.5 * iqr;
    const double hi_fence = stats.q3 + 1.5 * iqr;
    // Whiskers end at the most extreme points inside the fences.
    stats.whisker_low = stats.q1;
    stats.whisker_high = stats.q3;
    for (int e : errors) {
      if (e >= lo_fence) {
        stats.whisker_low = e;
        break;
      }
    }
    for (auto it = errors.rbegin(); it != errors.rend(); ++it) {
      if (*it <= hi_fence) {
        stats.whisker_high = *it;
        break;
      }
    }
    for (int e : errors) {
      if (e < lo_fence || e > hi_fence) ++stats.outliers;
    }
  }

  report.total_entries = static_cast<long long>(all_errors.size());
  report.total_abs_error = total_abs;
  report.overall_mae =
      all_errors.empty() ? 0.0 : total_abs / static_cast<double>(all_errors.size());

  // CDF over deduplicated error values; non-decreasing and ends at 1.
  std::sort(all_errors.begin(), all_errors.end());
  std::size_t i = 0;
  while (i < all_errors.size()) {
    std::size_t j = i;
    while (j < all_errors.size() && all_errors[j] == all_errors[i]) ++j;
    report.cdf.emplace_back(static_cast<double>(all_errors[i]),
                            static_cast<double>(j) / static_cast<double>(all_errors.size()));
    i = j;
  }
  return report;
}

HorizonReport evaluate_model(const nn::Checkpoint& checkpoint,
                             const seq::SequenceDataset& test_data) {
  if (checkpoint.manifest_hash != test_data.manifest_hash()) {
    throw HashMismatchError("checkpoint manifest hash does not match the test data");
  }
  std::vector<ErrorEntry> entries;
  const int window = test_data.window();
  const int width = test_data.feature_width();

  // Fingerprint ties compare() to an identical set of prediction points.
  std::string fp;
  fp.reserve(test_data.size() * 8);

  constexpr std::size_t kChunk = 256;
  std::vector<Eigen::MatrixXd> x;
  std::vector<double> window_buf;
  for (std::size_t first = 0; first < test_data.size(); first += kChunk) {
    const std::size_t count = std::min(kChunk, test_data.size() - first);
    x.assign(static_cast<std::size_t>(window), Eigen::MatrixXd(count, width));
    window_buf.resize(static_cast<std::size_t>(window) * width);
    for (std::size_t s = 0; s < count; ++s) {
      const auto& ref = test_data.samples()[first + s];
      test_data.fill_window(ref, window_buf.data());
      for (int t = 0; t < window; ++t) {
        for (int c = 0; c < width; ++c) {
          x[static_cast<std::size_t>(t)](static_cast<Eigen::Index>(s), c) =
              window_buf[static_cast<std::size_t>(t) * width + c];
        }
      }
    }
    Eigen::MatrixXd pred = nn::forward(checkpoint.params, x);
    for (std::size_t s = 0; s < count; ++s) {
      const auto& ref = test_data.samples()[first + s];
      const auto seconds = nn::predict_seconds(pred.row(static_cast<Eigen::Index>(s)).transpose());
      for (int p = 0; p < nn::kOutputSize; ++p) {
        const int truth = test_data.true_seconds(ref, p);
        if (truth < 0) continue;
        entries.push_back({truth, seconds[static_cast<std::size_t>(p)]});
        fp += std::to_string(ref.day) + "," + std::to_string(ref.t) + "," + std::to_string(p) + ";";
      }
    }
  }
  return report_from_entries(std::move(entries), checkpoint.loss_kind, fnv1a64(fp));
}

void HorizonReport::save(const std::string& path_prefix) const {
  {
    std::ofstream out(path_prefix + ".report.tsv");
    if (!out) throw std::runtime_error("cannot write report: " + path_prefix);
    out << "# loss\t" << loss_kind << "\n";
    out << "# test_fingerprint\t" << hash_hex(test_fingerprint) << "\n";
    char line[256];
    std::snprintf(line, sizeof(line), "# overall_mae\t%.6f\n# total_entries\t%lld\n",
                  overall_mae, total_entries);
    out << line;
    std::snprintf(line, sizeof(line), "# total_abs_error\t%.1f\n", total_abs_error);
    out << line;
    out << "bucket_lo\tbucket_hi\tcount\tmae\tq1\tmedian\tq3\twhisker_low\twhisker_high\toutliers\n";
    for (int b = 0; b < kBucketCount; ++b) {
      const BucketStats& s = buckets[static_cast<std::size_t>(b)];
      std::snprintf(line, sizeof(line),
                    "%d\t%d\t%lld\t%.6f\t%.2f\t%.2f\t%.2f\t%.2f\t%.2f\t%lld\n", b * kBucketWidth,
                    (b + 1) * kBucketWidth, s.count, s.mae, s.q1, s.median, s.q3, s.whisker_low,
                    s.whisker_high, s.outliers);
      out << line;
    }
  }
  {
    std::ofstream out(path_prefix + ".cdf.tsv");
    if (!out) throw std::runtime_error("cannot write cdf: " + path_prefix);
    out << "abs_error\tcumulative_fraction\n";
    char line[64];
    for (const auto& [e, f] : cdf) {
      std::snprintf(line, sizeof(line), "%.1f\t%.9f\n", e, f);
      out << line;
    }
  }
}

HorizonReport HorizonReport::load(const std::string& path_prefix) {
  std::ifstream in(path_prefix + ".report.tsv");
  if (!in) throw std::runtime_error("cannot open report: " + path_prefix + ".report.tsv");
  HorizonReport report;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "loss") {
        ss >> report.loss_kind;
      } else if (key == "test_fingerprint") {
        std::string hex;
        ss >> hex;
        report.test_fingerprint = std::stoull(hex, nullptr, 16);
      } else if (key == "overall_mae") {
        ss >> report.overall_mae;
      } else if (key == "total_entries") {
        ss >> report.total_entries;
      } else if (key == "total_abs_error") {
        ss >> report.total_abs_error;
      }
      continue;
    }
    if (line.rfind("bucket_lo", 0) == 0) continue;
    std::istringstream ss(line);
    int lo = 0, hi = 0;
    BucketStats s;
    ss >> lo >> hi >> s.count >> s.mae >> s.q1 >> s.median >> s.q3 >> s.whisker_low >>
        s.whisker_high >> s.outliers;
    report.buckets.push_back(s);
  }
  if (report.buckets.size() != kBucketCount) {
    throw std::runtime_error("report has wrong bucket count: " + path_prefix);
  }
  std::ifstream cdf_in(path_prefix + ".cdf.tsv");
  if (cdf_in) {
    std::getline(cdf_in, line);  // header
    double e = 0.0, f = 0.0;
    while (cdf_in >> e >> f) report.cdf.emplace_back(e, f);
  }
  return report;
}

}  // namespace phasecast::eval

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "phasecast/eval/compare.hpp"
#include "phasecast/eval/report.hpp"
#include "phasecast/util/rng.hpp"

using namespace phasecast;
using namespace phasecast::eval;

TEST_CASE("bucket partition is exhaustive and disjoint over [0, 200]") {
  for (int t = 0; t <= 200; ++t) {
    const int b = bucket_of(t);
    CHECK(b >= 0);
    CHECK(b < kBucketCount);
    if (t < 200) CHECK(b == t / 20);
  }
  CHECK(bucket_of(200) == 9);  // 200 folds into [180, 200]
}

TEST_CASE("perfect predictor: all bucket MAEs zero, CDF is a step at 0") {
  std::vector<ErrorEntry> entries;
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const int truth = 1 + static_cast<int>(rng.next_below(200));
    entries.push_back({truth, truth});
  }
  HorizonReport r = report_from_entries(entries, "mse", 1);
  CHECK(r.overall_mae == 0.0);
  CHECK(r.total_entries == 500);
  for (const auto& b : r.buckets) CHECK(b.mae == 0.0);
  REQUIRE(r.cdf.size() == 1);
  CHECK(r.cdf[0].first == 0.0);
  CHECK(r.cdf[0].second == 1.0);
}

TEST_CASE("single entry: pred 10 truth 15 lands in [0,20) with MAE 5") {
  HorizonReport r = report_from_entries({{15, 10}}, "mae", 2);
  CHECK(r.buckets[0].count == 1);
  CHECK(r.buckets[0].mae == doctest::Approx(5.0));
  for (int b = 1; b < kBucketCount; ++b) CHECK(r.buckets[b].count == 0);
  CHECK(r.overall_mae == doctest::Approx(5.0));
}

TEST_CASE("bucket counts sum to the number of valid entries") {
  Rng rng(7);
  std::vector<ErrorEntry> entries;
  for (int i = 0; i < 3000; ++i) {
    entries.push_back({1 + static_cast<int>(rng.next_below(200)),
                       static_cast<int>(rng.next_below(201))});
  }
  HorizonReport r = report_from_entries(entries, "mse", 3);
  long long total = 0;
  for (const auto& b : r.buckets) total += b.count;
  CHECK(total == 3000);
  CHECK(r.total_entries == 3000);
}

TEST_CASE("cdf equals a brute-force count at every point and ends at 1") {
  Rng rng(11);
  std::vector<ErrorEntry> entries;
  for (int i = 0; i < 1000; ++i) {
    entries.push_back({1 + static_cast<int>(rng.next_below(200)),
                       static_cast<int>(rng.next_below(201))});
  }
  HorizonReport r = report_from_entries(entries, "mse", 4);
  REQUIRE(!r.cdf.empty());
  CHECK(r.cdf.back().second == doctest::Approx(1.0));
  double prev = -1.0;
  for (const auto& [err, frac] : r.cdf) {
    long long count = 0;
    for (const auto& e : entries) {
      if (std::abs(e.pred_seconds - e.true_seconds) <= err) ++count;
    }
    CHECK(frac == doctest::Approx(static_cast<double>(count) / 1000.0));
    CHECK(frac > prev);
    prev = frac;
  }
}

TEST_CASE("quartiles and Tukey whiskers on a known sample") {
  // Bucket [0,20): errors 0..9 plus one far outlier.
  std::vector<ErrorEntry> entries;
  for (int e = 0; e < 10; ++e) entries.push_back({5, 5 + e});
  entries.push_back({5, 5 + 100});
  HorizonReport r = report_from_entries(entries, "mse", 5);
  const BucketStats& b = r.buckets[0];
  CHECK(b.count == 11);
  CHECK(b.median == doctest::Approx(5.0));
  CHECK(b.outliers == 1);
  CHECK(b.whisker_high <= 100.0 - 1.0);  // outlier excluded from the whisker
  CHECK(b.whisker_low == 0.0);
}

TEST_CASE("report save/load round-trips the table") {
  Rng rng(13);
  std::vector<ErrorEntry> entries;
  for (int i = 0; i < 400; ++i) {
    entries.push_back({1 + static_cast<int>(rng.next_below(200)),
                       static_cast<int>(rng.next_below(201))});
  }
  HorizonReport r = report_from_entries(entries, "tdse", 0xabc);
  r.save("/tmp/phasecast_eval_roundtrip");
  HorizonReport loaded = HorizonReport::load("/tmp/phasecast_eval_roundtrip");
  CHECK(loaded.loss_kind == "tdse");
  CHECK(loaded.test_fingerprint == 0xabc);
  CHECK(loaded.total_entries == r.total_entries);
  CHECK(loaded.overall_mae == doctest::Approx(r.overall_mae));
  for (int b = 0; b < kBucketCount; ++b) {
    CHECK(loaded.buckets[b].count == r.buckets[b].count);
    CHECK(loaded.buckets[b].mae == doctest::Approx(r.buckets[b].mae).epsilon(1e-5));
  }
}

namespace {

HorizonReport shifted_report(const std::string& loss, double mae_scale, std::uint64_t fp) {
  // Deterministic synthetic entries whose error grows with the scale knob.
  std::vector<ErrorEntry> entries;
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const int truth = 1 + static_cast<int>(rng.next_below(200));
    const int err = static_cast<int>(mae_scale * (1 + rng.next_below(10)));
    entries.push_back({truth, std::min(200, truth + err)});
  }
  return report_from_entries(entries, loss, fp);
}

}  // namespace

TEST_CASE("compare: identical reports tie; lower total error ranks first") {
  std::map<std::string, HorizonReport> reports;
  reports.emplace("mse", shifted_report("mse", 2.0, 9));
  reports.emplace("tdse", shifted_report("tdse", 1.0, 9));
  reports.emplace("mae", shifted_report("mae", 3.0, 9));
  ModelComparison cmp = compare_models(reports);
  CHECK(cmp.overall_ranking.front() == "tdse");
  CHECK(cmp.overall_ranking.back() == "mae");
  const std::string table = cmp.to_table(reports);
  CHECK(table.find("overall ranking: tdse") != std::string::npos);

  std::map<std::string, HorizonReport> same;
  same.emplace("a", shifted_report("a", 1.0, 10));
  same.emplace("b", shifted_report("b", 1.0, 10));
  ModelComparison tie = compare_models(same);
  // Equal stats: stable sort keeps insertion (alphabetical map) order.
  CHECK(tie.overall_ranking == std::vector<std::string>{"a", "b"});
}

TEST_CASE("compare refuses reports over different test sets") {
  std::map<std::string, HorizonReport> reports;
  reports.emplace("mse", shifted_report("mse", 1.0, 1));
  reports.emplace("mae", shifted_report("mae", 1.0, 2));
  CHECK_THROWS_AS(compare_models(reports), MismatchedTestSetsError);
}

#include "phasecast/eval/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace phasecast::eval {

ModelComparison compare_models(const std::map<std::string, HorizonReport>& reports) {
  if (reports.empty()) throw MismatchedTestSetsError("no reports to compare");
  const std::uint64_t fingerprint = reports.begin()->second.test_fingerprint;
  for (const auto& [name, report] : reports) {
    if (report.test_fingerprint != fingerprint) {
      throw MismatchedTestSetsError("report " + name + " covers a different test set");
    }
  }

  ModelComparison cmp;
  for (const auto& [name, report] : reports) cmp.losses.push_back(name);

  auto rank_by = [&](auto&& key) {
    std::vector<std::string> order = cmp.losses;
    std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
      return key(reports.at(a)) < key(reports.at(b));
    });
    return order;
  };

  for (int b = 0; b < kBucketCount; ++b) {
    cmp.bucket_ranking.push_back(rank_by([b](const HorizonReport& r) {
      return r.buckets[static_cast<std::size_t>(b)].mae;
    }));
  }
  cmp.overall_ranking = rank_by([](const HorizonReport& r) { return r.total_abs_error; });
  cmp.short_horizon_winner = cmp.bucket_ranking.front().front();
  cmp.long_horizon_winner = cmp.bucket_ranking.back().front();
  return cmp;
}

std::string ModelComparison::to_table(const std::map<std::string, HorizonReport>& reports) const {
  std::ostringstream out;
  out << "# per-bucket MAE (s) by loss\n";
  out << "bucket";
  for (const auto& name : losses) out << "\t" << name;
  out << "\tbest\n";
  char buf[64];
  for (int b = 0; b < kBucketCount; ++b) {
    out << b * kBucketWidth << "-" << (b + 1) * kBucketWidth;
    for (const auto& name : losses) {
      std::snprintf(buf, sizeof(buf), "\t%.3f",
                    reports.at(name).buckets[static_cast<std::size_t>(b)].mae);
      out << buf;
    }
    out << "\t" << bucket_ranking[static_cast<std::size_t>(b)].front() << "\n";
  }
  out << "overall_total_abs_error";
  for (const auto& name : losses) {
    std::snprintf(buf, sizeof(buf), "\t%.1f", reports.at(name).total_abs_error);
    out << buf;
  }
  out << "\t" << overall_ranking.front() << "\n";
  out << "# overall ranking:";
  for (const auto& name : overall_ranking) out << " " << name;
  out << "\n# short horizon [0,20) winner: " << short_horizon_winner;
  out << "\n# long horizon [180,200] winner: " << long_horizon_winner << "\n";
  return out.str();
}

}  // namespace phasecast::eval

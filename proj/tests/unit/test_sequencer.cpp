#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "phasecast/seq/sequencer.hpp"
#include "phasecast/util/rng.hpp"

using namespace phasecast;
using namespace phasecast::seq;

namespace {

// Synthetic day: features encode (row, column) so window slices are checkable.
ingest::DayContainer synthetic_day(std::size_t rows, int width, float mask_pattern_mod,
                                   std::uint64_t manifest_hash = 42) {
  ingest::DayContainer day(width, 10000, manifest_hash);
  std::vector<float> f(static_cast<std::size_t>(width));
  std::vector<float> t(ingest::kPhaseCount), m(ingest::kPhaseCount);
  for (std::size_t r = 0; r < rows; ++r) {
    for (int c = 0; c < width; ++c) {
      f[static_cast<std::size_t>(c)] = static_cast<float>(r % 97) / 100.0f +
                                       static_cast<float>(c) * 1e-4f;
    }
    for (int p = 0; p < ingest::kPhaseCount; ++p) {
      const bool valid =
          mask_pattern_mod == 0.0f ||
          static_cast<float>((r + static_cast<std::size_t>(p)) %
                             static_cast<std::size_t>(mask_pattern_mod)) != 0.0f;
      m[static_cast<std::size_t>(p)] = valid ? 1.0f : 0.0f;
      t[static_cast<std::size_t>(p)] = valid ? 0.5f : -1.0f;
    }
    day.append_row(f.data(), t.data(), m.data());
  }
  return day;
}

}  // namespace

TEST_CASE("a 57,600 s day with window 120 yields 57,481 samples") {
  auto day = synthetic_day(57600, 4, 0.0f);
  SequenceDataset ds({&day});
  CHECK(ds.size() == 57481);
  CHECK(ds.window() == kWindowSeconds);
  CHECK(ds.samples().front().t == 119);
  CHECK(ds.samples().back().t == 57599);
}

TEST_CASE("seconds whose six targets are all masked are skipped") {
  ingest::DayContainer day(2, 500, 1);
  std::vector<float> f = {0.1f, 0.2f};
  std::vector<float> t(6, 0.5f), valid_mask(6, 1.0f), empty_mask(6, 0.0f);
  for (int r = 0; r < 200; ++r) {
    day.append_row(f.data(), t.data(), r % 2 == 0 ? valid_mask.data() : empty_mask.data());
  }
  SequenceDataset ds({&day}, 120);
  // Candidates are rows 119..199; only even rows carry a valid target.
  for (const auto& s : ds.samples()) CHECK(s.t % 2 == 0);
  CHECK(ds.size() == 40);  // 120, 122, ..., 198
}

TEST_CASE("windows are exact slices of the day matrix, missing rows included") {
  auto day = synthetic_day(400, 5, 0.0f);
  SequenceDataset ds({&day});
  Rng rng(5);
  std::vector<double> window(static_cast<std::size_t>(ds.window()) * 5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto& ref = ds.samples()[rng.next_below(ds.size())];
    ds.fill_window(ref, window.data());
    for (int r = 0; r < ds.window(); ++r) {
      const std::size_t day_row = ref.t - 119 + static_cast<std::size_t>(r);
      for (int c = 0; c < 5; ++c) {
        CHECK(window[static_cast<std::size_t>(r) * 5 + static_cast<std::size_t>(c)] ==
              doctest::Approx(static_cast<double>(day.features(day_row)[c])));
      }
    }
  }
}

TEST_CASE("windows never span day-file boundaries") {
  auto day1 = synthetic_day(300, 3, 0.0f);
  auto day2 = synthetic_day(150, 3, 0.0f);
  SequenceDataset ds({&day1, &day2});
  CHECK(ds.size() == (300 - 119) + (150 - 119));
  for (const auto& s : ds.samples()) CHECK(s.t >= 119);
}

TEST_CASE("datasets reject mixed widths or manifests") {
  auto day1 = synthetic_day(200, 3, 0.0f, 7);
  auto day2 = synthetic_day(200, 4, 0.0f, 7);
  CHECK_THROWS_AS(SequenceDataset({&day1, &day2}), WidthMismatchError);
  auto day3 = synthetic_day(200, 3, 0.0f, 8);
  CHECK_THROWS_AS(SequenceDataset({&day1, &day3}), WidthMismatchError);
}

TEST_CASE("2500 samples batch as 1000, 1000, 500") {
  auto day = synthetic_day(2619, 3, 0.0f);  // 2619 - 119 = 2500 samples
  SequenceDataset ds({&day});
  REQUIRE(ds.size() == 2500);
  BatchStream stream(ds, 1000, 1, 0);
  SequenceBatch batch;
  std::vector<int> sizes;
  while (stream.next(batch)) sizes.push_back(batch.count);
  CHECK(sizes == std::vector<int>{1000, 1000, 500});
  CHECK(stream.batches_total() == 3);
}

TEST_CASE("same (seed, epoch) reproduce the batch order; epochs differ but conserve samples") {
  auto day = synthetic_day(1000, 3, 0.0f);
  SequenceDataset ds({&day});

  auto order_of = [&](std::uint64_t seed, std::uint64_t epoch) {
    BatchStream stream(ds, 128, seed, epoch);
    SequenceBatch batch;
    std::vector<std::uint32_t> order;
    while (stream.next(batch)) {
      for (const auto& ref : batch.refs) order.push_back(ref.t);
    }
    return order;
  };

  auto a = order_of(9, 0);
  auto b = order_of(9, 0);
  CHECK(a == b);
  auto c = order_of(9, 1);
  CHECK(a != c);
  auto d = order_of(10, 0);
  CHECK(a != d);

  // Same multiset across epochs: every sample exactly once.
  auto a_sorted = a;
  auto c_sorted = c;
  std::sort(a_sorted.begin(), a_sorted.end());
  std::sort(c_sorted.begin(), c_sorted.end());
  CHECK(a_sorted == c_sorted);
  CHECK(a.size() == ds.size());
}

TEST_CASE("batch payloads match the dataset slices") {
  auto day = synthetic_day(300, 4, 3.0f);
  SequenceDataset ds({&day});
  BatchStream stream(ds, 64, 3, 2);
  SequenceBatch batch;
  REQUIRE(stream.next(batch));
  std::vector<double> expect_window(static_cast<std::size_t>(batch.window) * 4);
  for (int s = 0; s < batch.count; ++s) {
    ds.fill_window(batch.refs[static_cast<std::size_t>(s)], expect_window.data());
    for (std::size_t k = 0; k < expect_window.size(); ++k) {
      CHECK(static_cast<double>(
                batch.windows[static_cast<std::size_t>(s) * expect_window.size() + k]) ==
            doctest::Approx(expect_window[k]));
    }
    double targets[6], masks[6];
    ds.fill_targets(batch.refs[static_cast<std::size_t>(s)], targets, masks);
    for (int p = 0; p < 6; ++p) {
      CHECK(batch.targets[static_cast<std::size_t>(s) * 6 + static_cast<std::size_t>(p)] ==
            targets[p]);
      CHECK(batch.masks[static_cast<std::size_t>(s) * 6 + static_cast<std::size_t>(p)] ==
            masks[p]);
    }
  }
}

TEST_CASE("sample index file lists every (day, second) pair") {
  auto day = synthetic_day(130, 3, 0.0f);
  SequenceDataset ds({&day});
  const std::string path = "/tmp/phasecast_test_index.tsv";
  ds.save_index(path, {"day-one"});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  std::size_t count = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("day-one\t", 0) == 0);
    ++count;
  }
  CHECK(count == ds.size());
}

TEST_CASE("windows containing all-missing seconds are still emitted, rows pass through as -1") {
  ingest::DayContainer day(3, 0, 1);
  std::vector<float> normal = {0.5f, 0.5f, 0.5f};
  std::vector<float> missing = {-1.0f, -1.0f, -1.0f};
  std::vector<float> t(6, 0.5f), m(6, 1.0f);
  for (int r = 0; r < 200; ++r) {
    const bool gap = r >= 100 && r < 112;  // 12 missing seconds mid-day
    day.append_row(gap ? missing.data() : normal.data(), t.data(), m.data());
  }
  SequenceDataset ds({&day});
  CHECK(ds.size() == 200 - 119);
  // The window ending at second 150 spans the gap.
  std::vector<double> window(static_cast<std::size_t>(ds.window()) * 3);
  for (const auto& ref : ds.samples()) {
    if (ref.t != 150) continue;
    ds.fill_window(ref, window.data());
    int missing_rows = 0;
    for (int r = 0; r < ds.window(); ++r) {
      if (window[static_cast<std::size_t>(r) * 3] == -1.0) ++missing_rows;
    }
    CHECK(missing_rows == 12);
  }
}

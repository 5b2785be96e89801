#include <benchmark/benchmark.h>

#include "phasecast/label/targets.hpp"
#include "phasecast/seq/sequencer.hpp"
#include "phasecast/util/rng.hpp"

using namespace phasecast;

namespace {

void bm_compute_targets_day(benchmark::State& state) {
  // A full 16 h grid with realistic switching runs and missing holes.
  label::DayStates day;
  day.start = 0;
  Rng rng(7);
  day.states.reserve(57600);
  std::array<label::PhaseObservation, ingest::kPhaseCount> row;
  row.fill(label::PhaseObservation::kNotGreen);
  int flip = 0;
  while (day.states.size() < 57600) {
    if (--flip <= 0) {
      flip = 20 + static_cast<int>(rng.next_below(90));
      for (auto& s : row) {
        s = rng.bernoulli(0.4) ? label::PhaseObservation::kGreen
                               : label::PhaseObservation::kNotGreen;
      }
    }
    auto r = row;
    for (auto& s : r) {
      if (rng.bernoulli(0.1)) s = label::PhaseObservation::kMissing;
    }
    day.states.push_back(r);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(label::compute_targets(day));
  }
  state.SetItemsProcessed(state.iterations() * 57600 * ingest::kPhaseCount);
}
BENCHMARK(bm_compute_targets_day)->Unit(benchmark::kMillisecond);

void bm_batch_stream(benchmark::State& state) {
  // Window slicing and batch materialization throughput.
  const int width = 122;
  ingest::DayContainer day(width, 0, 1);
  Rng rng(9);
  std::vector<float> f(width), t(6, 0.5f), m(6, 1.0f);
  for (int r = 0; r < 4000; ++r) {
    for (auto& v : f) v = static_cast<float>(rng.uniform(0.0, 1.0));
    day.append_row(f.data(), t.data(), m.data());
  }
  seq::SequenceDataset ds({&day});
  for (auto _ : state) {
    seq::BatchStream stream(ds, 1000, 1, 0);
    seq::SequenceBatch batch;
    long long total = 0;
    while (stream.next(batch)) total += batch.count;
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(ds.size()));
}
BENCHMARK(bm_batch_stream)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

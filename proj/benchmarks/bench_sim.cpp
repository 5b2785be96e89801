#include <benchmark/benchmark.h>

#include "phasecast/sim/simulator.hpp"

using namespace phasecast;

namespace {

void bm_simulate_hour(benchmark::State& state) {
  auto config = sim::load_intersection_config(std::string(PHASECAST_CONFIG_DIR) +
                                              "/reference-intersection.cfg");
  config.span_start = parse_time_of_day("07:00");
  config.span_end = parse_time_of_day("08:00");
  const UnixSeconds date = parse_date("2019-09-02");
  std::uint64_t seed = 1;
  for (auto _ : state) {
    long long count = 0;
    sim::simulate_day(config, date, seed++, [&](const sim::PerSecondRecord&) { ++count; });
    benchmark::DoNotOptimize(count);
  }
  state.SetItemsProcessed(state.iterations() * 3600);  // ticks
}
BENCHMARK(bm_simulate_hour)->Unit(benchmark::kMillisecond);

void bm_record_serialization(benchmark::State& state) {
  auto config = sim::load_intersection_config(std::string(PHASECAST_CONFIG_DIR) +
                                              "/reference-intersection.cfg");
  config.span_start = parse_time_of_day("07:00");
  config.span_end = parse_time_of_day("07:01");
  auto records = sim::simulate_day(config, parse_date("2019-09-02"), 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(records[i % records.size()].to_json_line());
    ++i;
  }
}
BENCHMARK(bm_record_serialization);

}  // namespace

BENCHMARK_MAIN();

#include "phasecast/ingest/day_container.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace phasecast::ingest {

namespace {

constexpr char kMagic[8] = {'P', 'C', 'D', 'A', 'Y', 'B', 'I', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

DayContainer::DayContainer(int feature_width, std::int64_t start_timestamp,
                           std::uint64_t manifest_hash)
    : feature_width_(feature_width),
      start_timestamp_(start_timestamp),
      manifest_hash_(manifest_hash) {}

void DayContainer::append_row(const float* features, const float* targets, const float* masks) {
  data_.insert(data_.end(), features, features + feature_width_);
  data_.insert(data_.end(), targets, targets + kPhaseCount);
  data_.insert(data_.end(), masks, masks + kPhaseCount);
  ++rows_;
}

int DayContainer::true_seconds(std::size_t r, int phase_idx) const {
  if (masks(r)[phase_idx] == 0.0f) return -1;
  return static_cast<int>(std::lround(static_cast<double>(targets(r)[phase_idx]) * 200.0));
}

void DayContainer::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContainerError("cannot write day container: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint32_t>(feature_width_));
  write_pod(out, static_cast<std::uint32_t>(total_width()));
  write_pod(out, static_cast<std::uint64_t>(rows_));
  write_pod(out, start_timestamp_);
  write_pod(out, manifest_hash_);
  out.write(reinterpret_cast<const char*>(data_.data()),
            static_cast<std::streamsize>(data_.size() * sizeof(float)));
  if (!out) throw ContainerError("short write: " + path);
}

DayContainer DayContainer::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContainerError("cannot open day container: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw ContainerError("not a day container: " + path);
  }
  std::uint32_t version = 0, feature_width = 0, total_width = 0;
  std::uint64_t rows = 0;
  std::int64_t start_timestamp = 0;
  std::uint64_t manifest_hash = 0;
  read_pod(in, version);
  read_pod(in, feature_width);
  read_pod(in, total_width);
  read_pod(in, rows);
  read_pod(in, start_timestamp);
  read_pod(in, manifest_hash);
  if (version != kVersion) throw ContainerError("unsupported container version");
  if (total_width != feature_width + kTargetColumns) {
    throw ContainerError("container width fields inconsistent");
  }
  DayContainer day(static_cast<int>(feature_width), start_timestamp, manifest_hash);
  day.rows_ = rows;
  day.data_.resize(rows * total_width);
  in.read(reinterpret_cast<char*>(day.data_.data()),
          static_cast<std::streamsize>(day.data_.size() * sizeof(float)));
  if (!in) throw ContainerError("truncated day container: " + path);
  return day;
}

}  // namespace phasecast::ingest

#include "phasecast/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace phasecast::nn {

namespace {

constexpr char kMagic[8] = {'P', 'C', 'L', 'S', 'T', 'M', 'C', 'K'};
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

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint32_t>(params.input_size));
  write_pod(out, static_cast<std::uint32_t>(params.hidden_size));
  write_pod(out, manifest_hash);
  std::uint32_t loss_len = static_cast<std::uint32_t>(loss_kind.size());
  write_pod(out, loss_len);
  out.write(loss_kind.data(), loss_len);
  write_pod(out, static_cast<std::uint32_t>(epoch));
  write_pod(out, validation_loss);
  for (const auto& t : params.tensors()) {
    write_pod(out, static_cast<std::uint64_t>(t.size));
    out.write(reinterpret_cast<const char*>(t.data),
              static_cast<std::streamsize>(t.size * sizeof(double)));
  }
  if (!out) throw CheckpointError("short write: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw CheckpointError("not a checkpoint file: " + path);
  }
  std::uint32_t version = 0, input = 0, hidden = 0, loss_len = 0, epoch = 0;
  read_pod(in, version);
  if (version != kVersion) throw CheckpointError("unsupported checkpoint version");
  read_pod(in, input);
  read_pod(in, hidden);
  Checkpoint ck;
  read_pod(in, ck.manifest_hash);
  read_pod(in, loss_len);
  if (loss_len > 16) throw CheckpointError("implausible loss kind length");
  ck.loss_kind.resize(loss_len);
  in.read(ck.loss_kind.data(), loss_len);
  read_pod(in, epoch);
  ck.epoch = static_cast<int>(epoch);
  read_pod(in, ck.validation_loss);
  ck.params = LstmParams::zeros(static_cast<int>(input), static_cast<int>(hidden));
  for (auto& t : ck.params.tensors()) {
    std::uint64_t n = 0;
    read_pod(in, n);
    if (n != t.size) throw CheckpointError(std::string("tensor size mismatch for ") + t.name);
    in.read(reinterpret_cast<char*>(t.data),
            static_cast<std::streamsize>(t.size * sizeof(double)));
  }
  if (!in) throw CheckpointError("truncated checkpoint: " + path);
  return ck;
}

}  // namespace phasecast::nn

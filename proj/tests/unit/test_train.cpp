#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <filesystem>
#include <fstream>

#include "phasecast/experiment/experiment.hpp"
#include "phasecast/nn/network.hpp"
#include "phasecast/seq/sequencer.hpp"
#include "phasecast/train/adam.hpp"
#include "phasecast/train/grid_search.hpp"
#include "phasecast/train/loss.hpp"
#include "phasecast/train/trainer.hpp"
#include "phasecast/util/rng.hpp"

using namespace phasecast;
using namespace phasecast::train;

namespace {

Eigen::VectorXd vec6(std::initializer_list<double> v) {
  Eigen::VectorXd out(6);
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Constant-target day: features are a low-dimensional noise pattern, every
// phase target is 0.5. A trainable sanity fixture.
ingest::DayContainer constant_target_day(std::size_t rows, int width, std::uint64_t seed) {
  ingest::DayContainer day(width, 0, 1);
  Rng rng(seed);
  std::vector<float> f(static_cast<std::size_t>(width));
  std::vector<float> t(6, 0.5f), m(6, 1.0f);
  for (std::size_t r = 0; r < rows; ++r) {
    for (auto& v : f) v = static_cast<float>(rng.uniform(0.0, 1.0));
    day.append_row(f.data(), t.data(), m.data());
  }
  return day;
}

}  // namespace

TEST_CASE("loss kernels: zero at p == y, correct values and gradients") {
  for (LossKind kind : {LossKind::kMse, LossKind::kMae, LossKind::kMape, LossKind::kTdse}) {
    auto pl = loss_pointwise(kind, 0.37, 0.37);
    CHECK(pl.value == 0.0);
    CHECK(pl.dvalue_dpred == 0.0);
  }
  CHECK(loss_pointwise(LossKind::kMse, 0.5, 0.25).value == doctest::Approx(0.0625));
  CHECK(loss_pointwise(LossKind::kMae, 0.5, 0.25).value == doctest::Approx(0.25));
  CHECK(loss_pointwise(LossKind::kMape, 0.5, 0.25).value == doctest::Approx(100.0));
}

TEST_CASE("tdse: exact scalar example and the horizon-end annihilation") {
  CHECK(loss_pointwise(LossKind::kTdse, 0.5, 0.25).value == 0.03515625);  // exact
  for (double p : {0.0, 0.3, 0.9, 1.0, 7.0}) {
    CHECK(loss_pointwise(LossKind::kTdse, p, 1.0).value == 0.0);
  }
  // At y = 0 the discount is 1: tdse == mse.
  for (double p : {0.0, 0.2, 0.77, 1.0}) {
    CHECK(loss_pointwise(LossKind::kTdse, p, 0.0).value ==
          loss_pointwise(LossKind::kMse, p, 0.0).value);
  }
}

TEST_CASE("pointwise dominance: tdse <= mse on the whole grid, equality iff y=0 or p=y") {
  for (int pi = 0; pi <= 100; ++pi) {
    for (int yi = 0; yi <= 100; ++yi) {
      const double p = pi / 100.0, y = yi / 100.0;
      const double tdse = loss_pointwise(LossKind::kTdse, p, y).value;
      const double mse = loss_pointwise(LossKind::kMse, p, y).value;
      CHECK(tdse <= mse);
      if (y == 0.0 || p == y) {
        CHECK(tdse == mse);
      } else {
        CHECK(tdse < mse);
      }
    }
  }
}

TEST_CASE("all four losses are nonnegative and vanish only at p == y") {
  Rng rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const double p = rng.uniform(0.0, 1.0);
    const double y = rng.uniform(0.0, 1.0);
    for (LossKind kind : {LossKind::kMse, LossKind::kMae, LossKind::kMape, LossKind::kTdse}) {
      const double v = loss_pointwise(kind, p, y).value;
      CHECK(v >= 0.0);
      if (kind == LossKind::kTdse && y == 1.0) continue;  // discount annihilates
      if (std::abs(p - y) > 1e-12) CHECK(v > 0.0);
    }
  }
}

TEST_CASE("loss gradients match central finite differences to 1e-6") {
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const double p = rng.uniform(0.0, 1.0);
    const double y = rng.uniform(0.0, 1.0);
    for (LossKind kind : {LossKind::kMse, LossKind::kMae, LossKind::kMape, LossKind::kTdse}) {
      if (std::abs(p - y) < 1e-4) continue;  // keep clear of the |.| kink
      const double eps = 1e-7;
      const double fd = (loss_pointwise(kind, p + eps, y).value -
                         loss_pointwise(kind, p - eps, y).value) /
                        (2 * eps);
      CHECK(std::abs(fd - loss_pointwise(kind, p, y).dvalue_dpred) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("compute_loss: masking excludes entries from sum, count and gradient") {
  Eigen::VectorXd pred = vec6({0.5, 0.9, 0.1, 0.7, 0.2, 0.4});
  Eigen::VectorXd truth = vec6({0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  Eigen::VectorXd mask = vec6({1, 1, 0, 0, 1, 1});
  Eigen::VectorXd dpred;
  const double loss = compute_loss(LossKind::kMse, pred, truth, mask, &dpred);
  const double expect = (0.0 + 0.16 + 0.09 + 0.01) / 4.0;
  CHECK(loss == doctest::Approx(expect));
  CHECK(dpred[2] == 0.0);
  CHECK(dpred[3] == 0.0);
  CHECK(dpred[1] == doctest::Approx(2 * 0.4 / 4.0));

  // Perturbing a masked truth entry changes nothing.
  truth[2] = 0.123;
  Eigen::VectorXd dpred2;
  CHECK(compute_loss(LossKind::kMse, pred, truth, mask, &dpred2) == doctest::Approx(loss));
  CHECK((dpred - dpred2).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(compute_loss(LossKind::kMse, pred, truth, vec6({0, 0, 0, 0, 0, 0})),
                  NoValidEntriesError);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  nn::LstmParams params = nn::LstmParams::init(4, 3, 5);
  nn::LstmParams before = params;
  nn::LstmParams grads = nn::LstmParams::zeros(4, 3);
  AdamOptimizer opt(4, 3);
  opt.step(params, grads, 0.01);
  auto a = params.tensors();
  auto b = before.tensors();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].size; ++k) CHECK(a[i].data[k] == b[i].data[k]);
  }
}

TEST_CASE("adam first step: magnitude ~ lr, direction opposite the gradient") {
  nn::LstmParams params = nn::LstmParams::zeros(1, 1);
  nn::LstmParams grads = nn::LstmParams::zeros(1, 1);
  grads.b_head[0] = 0.37;
  grads.b_head[1] = -2.5;
  AdamOptimizer opt(1, 1);
  opt.step(params, grads, 0.01);
  // First-step closed form: lr * g / (|g| + eps) with bias correction exact.
  CHECK(params.b_head[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(params.b_head[1] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(params.b_head[2] == 0.0);
}

TEST_CASE("adam treats every element independently") {
  nn::LstmParams params = nn::LstmParams::zeros(2, 2);
  nn::LstmParams grads = nn::LstmParams::zeros(2, 2);
  grads.W_xi(0, 0) = 1.0;
  grads.W_xi(1, 1) = 1.0;
  AdamOptimizer opt(2, 2);
  opt.step(params, grads, 0.05);
  CHECK(params.W_xi(0, 0) == params.W_xi(1, 1));
  CHECK(params.W_xi(0, 1) == 0.0);
}

TEST_CASE("plateau decay: frozen validation loss yields lr 0.01, 0.003, 0.0009, ...") {
  auto day = constant_target_day(400, 6, 3);
  auto val = constant_target_day(200, 6, 4);
  seq::SequenceDataset train_set({&day});
  seq::SequenceDataset val_set({&val});
  TrainConfig config;
  config.loss = LossKind::kMse;
  config.neurons = 3;
  config.epochs = 4;
  config.batch_size = 128;
  config.seed = 5;
  Trainer trainer(train_set, val_set, config);
  TrainHooks hooks;
  hooks.validation_override = [](const nn::LstmParams&) { return 0.125; };  // frozen
  TrainReport report = trainer.run("/tmp/phasecast_plateau", hooks);
  REQUIRE(report.epochs.size() == 4);
  CHECK(report.epochs[0].learning_rate == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(report.epochs[1].learning_rate == doctest::Approx(0.003).epsilon(1e-12));
  CHECK(report.epochs[2].learning_rate == doctest::Approx(0.0009).epsilon(1e-12));
  CHECK(report.epochs[3].learning_rate == doctest::Approx(0.00027).epsilon(1e-12));
  CHECK(report.baseline_val_loss == 0.125);
}

TEST_CASE("training pushes predictions to a constant target (sanity oracle)") {
  auto day = constant_target_day(1200, 4, 31);
  auto val = constant_target_day(300, 4, 32);
  seq::SequenceDataset train_set({&day});
  seq::SequenceDataset val_set({&val});
  TrainConfig config;
  config.loss = LossKind::kMse;
  config.neurons = 4;
  config.epochs = 60;
  config.batch_size = 64;
  config.learning_rate = 0.02;
  config.seed = 17;
  Trainer trainer(train_set, val_set, config);
  TrainReport report = trainer.run("/tmp/phasecast_const");
  nn::Checkpoint best = nn::Checkpoint::load(report.best_checkpoint);

  // Held-out windows: predictions should sit within 0.01 of 0.5.
  auto held = constant_target_day(260, 4, 33);
  seq::SequenceDataset held_set({&held});
  std::vector<double> window(static_cast<std::size_t>(held_set.window()) * 4);
  for (std::size_t s = 0; s < held_set.size(); s += 17) {
    held_set.fill_window(held_set.samples()[s], window.data());
    Eigen::MatrixXd w(held_set.window(), 4);
    for (int r = 0; r < held_set.window(); ++r) {
      for (int c = 0; c < 4; ++c) w(r, c) = window[static_cast<std::size_t>(r) * 4 + c];
    }
    Eigen::VectorXd pred = nn::forward_window(best.params, w);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(pred[k] - 0.5) < 0.01);
  }
}

TEST_CASE("same seed and data give byte-identical best checkpoints") {
  auto day = constant_target_day(500, 5, 77);
  auto val = constant_target_day(200, 5, 78);
  seq::SequenceDataset train_set({&day});
  seq::SequenceDataset val_set({&val});
  TrainConfig config;
  config.neurons = 3;
  config.epochs = 2;
  config.batch_size = 100;
  config.seed = 99;

  std::string bytes[2];
  for (int run = 0; run < 2; ++run) {
    Trainer trainer(train_set, val_set, config);
    const std::string dir = "/tmp/phasecast_det_" + std::to_string(run);
    TrainReport report = trainer.run(dir);
    std::ifstream f(report.best_checkpoint, std::ios::binary);
    bytes[run].assign((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  }
  CHECK(bytes[0] == bytes[1]);
  CHECK(!bytes[0].empty());
}

TEST_CASE("train report TSV lists per-epoch loss, lr and the best flag") {
  auto day = constant_target_day(300, 4, 1);
  auto val = constant_target_day(200, 4, 2);
  seq::SequenceDataset train_set({&day});
  seq::SequenceDataset val_set({&val});
  TrainConfig config;
  config.neurons = 2;
  config.epochs = 2;
  config.batch_size = 64;
  Trainer trainer(train_set, val_set, config);
  TrainReport report = trainer.run("/tmp/phasecast_report");
  std::ifstream in("/tmp/phasecast_report/train_report.tsv");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("epoch\ttrain_loss\tval_loss\tlearning_rate") != std::string::npos);
  CHECK(text.find("baseline_val_loss") != std::string::npos);
  CHECK(std::filesystem::exists("/tmp/phasecast_report/best.ckpt"));
  CHECK(std::filesystem::exists("/tmp/phasecast_report/epoch_01.ckpt"));
  CHECK(std::filesystem::exists("/tmp/phasecast_report/epoch_02.ckpt"));
  CHECK(report.best_epoch >= 1);
}

TEST_CASE("grid search: 1x1 grid gives one cell; table formats") {
  auto day = constant_target_day(400, 4, 11);
  auto val = constant_target_day(150, 4, 12);
  seq::SequenceDataset train_set({&day});
  seq::SequenceDataset val_set({&val});
  GridSearchConfig config;
  config.learning_rates = {0.01};
  config.neuron_counts = {3};
  config.budget_samples = 400;
  config.eval_every = 200;
  config.batch_size = 100;
  GridResult result = grid_search(train_set, val_set, config);
  REQUIRE(result.cells.size() == 1);
  CHECK_FALSE(result.cells[0].failed);
  CHECK(result.cells[0].best_val_mape >= 0.0);
  const std::string table = result.to_table(config);
  CHECK(table.find("N=3") != std::string::npos);
  CHECK(table.find("0.01") != std::string::npos);
}

TEST_CASE("training aborts with the offending batch recorded when activations diverge") {
  // A non-finite feature value is the deterministic way to poison the
  // forward pass; the trainer must name the epoch and batch that died.
  ingest::DayContainer day(4, 0, 1);
  Rng rng(51);
  std::vector<float> f(4), t(6, 0.5f), m(6, 1.0f);
  for (int r = 0; r < 400; ++r) {
    for (auto& v : f) v = static_cast<float>(rng.uniform(0.0, 1.0));
    if (r == 350) f[2] = std::numeric_limits<float>::quiet_NaN();
    day.append_row(f.data(), t.data(), m.data());
  }
  auto val = constant_target_day(200, 4, 52);
  seq::SequenceDataset train_set({&day});
  seq::SequenceDataset val_set({&val});
  TrainConfig config;
  config.neurons = 3;
  config.epochs = 1;
  config.batch_size = 64;
  Trainer trainer(train_set, val_set, config);
  try {
    trainer.run("/tmp/phasecast_diverge");
    FAIL("expected NonFiniteActivationError");
  } catch (const nn::NonFiniteActivationError& e) {
    CHECK(std::string(e.what()).find("batch") != std::string::npos);
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("grid search on simulated data: the 1e-2 column dominates the 1e-4 column") {
  // Short simulated desk days, tiny budget: the sane learning rate reaches a
  // lower validation MAPE at every width.
  auto config = sim::load_intersection_config(std::string(PHASECAST_CONFIG_DIR) +
                                              "/desk-intersection.cfg");
  config.span_start = parse_time_of_day("07:00");
  config.span_end = parse_time_of_day("07:30");
  config.corruption = {0.0, 0.0};
  const UnixSeconds date = parse_date("2019-09-02");

  auto prepare = [&](UnixSeconds d, std::uint64_t seed) {
    const std::string rec = "/tmp/phasecast_grid_" + std::to_string(seed) + ".jsonl";
    experiment::write_day_records(config, d, seed, rec);
    auto hints = ingest::SchemaHints::load(std::string(PHASECAST_CONFIG_DIR) +
                                           "/desk-hints.json");
    static ingest::SchemaManifest manifest;
    static bool built = false;
    if (!built) {
      manifest = experiment::schema_from_record_files({rec}, hints);
      built = true;
    }
    ingest::Encoder encoder(manifest);
    return experiment::prepare_day(rec, encoder, config, d);
  };
  auto train_day = prepare(date, 301);
  auto val_day = prepare(date + kSecondsPerDay, 302);
  seq::SequenceDataset train_set({&train_day});
  seq::SequenceDataset val_set({&val_day});

  GridSearchConfig gs;
  gs.learning_rates = {1e-2, 1e-4};
  gs.neuron_counts = {6, 12};
  gs.budget_samples = 4000;
  gs.eval_every = 2000;
  gs.batch_size = 500;
  gs.seed = 5;
  GridResult result = grid_search(train_set, val_set, gs);
  REQUIRE(result.cells.size() == 4);
  for (std::size_t n_idx = 0; n_idx < gs.neuron_counts.size(); ++n_idx) {
    const GridCell& fast = result.at(0, n_idx, gs.neuron_counts.size());
    const GridCell& slow = result.at(1, n_idx, gs.neuron_counts.size());
    REQUIRE_FALSE(fast.failed);
    REQUIRE_FALSE(slow.failed);
    CHECK(fast.best_val_mape < slow.best_val_mape);
  }
}

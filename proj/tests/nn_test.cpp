#include <doctest.h>

#include <cmath>
#include <set>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/data/example.hpp"
#include "pawnprint/data/reconstruct.hpp"
#include "pawnprint/encode/planes.hpp"
#include "pawnprint/nn/checkpoint.hpp"
#include "pawnprint/nn/net.hpp"
#include "pawnprint/nn/schedule.hpp"
#include "pawnprint/util/rng.hpp"

using namespace pawnprint;
using namespace pawnprint::chess;
using namespace pawnprint::nn;

namespace {

NetConfig tiny_config() {
  NetConfig c;
  c.blocks = 2;
  c.filters = 8;
  c.se_ratio = 4;
  c.policy_hidden = 8;
  c.value_hidden = 16;
  return c;
}

struct TestBatch {
  std::vector<encode::InputPlanes> planes;
  std::vector<std::uint16_t> targets;
  std::vector<encode::LegalMask> masks;

  int size() const { return static_cast<int>(planes.size()); }

  // Channel-major assembly in the requested precision.
  template <typename T>
  std::vector<T> channel_major() const {
    const int batch = size();
    const std::size_t n = static_cast<std::size_t>(batch) * 64;
    std::vector<T> out(static_cast<std::size_t>(NetConfig::kInputPlanes) * n,
                       T(0));
    for (int b = 0; b < batch; ++b) {
      const auto& p = planes[static_cast<std::size_t>(b)];
      for (int plane = 0; plane < NetConfig::kInputPlanes; ++plane) {
        for (int cell = 0; cell < 64; ++cell) {
          out[static_cast<std::size_t>(plane) * n + b * 64 + cell] =
              static_cast<T>(p.at(plane, cell / 8, cell % 8));
        }
      }
    }
    return out;
  }
};

// Positions a few random plies into a game, targets drawn from the legal
// moves.
TestBatch make_batch(int batch, std::uint64_t seed) {
  TestBatch out;
  Rng rng(seed);
  while (out.size() < batch) {
    Board b = Board::start_position();
    const int depth = 2 + static_cast<int>(rng.next_below(16));
    for (int i = 0; i < depth; ++i) {
      const auto moves = b.legal_moves();
      if (moves.empty()) break;
      b = b.apply_trusted(moves[rng.next_below(moves.size())]);
    }
    const auto moves = b.legal_moves();
    if (moves.empty()) continue;
    const Move target = moves[rng.next_below(moves.size())];
    out.planes.push_back(encode::encode_position(b));
    out.targets.push_back(
        static_cast<std::uint16_t>(encode::move_index(b, target)));
    out.masks.push_back(encode::legal_mask(b));
  }
  return out;
}

template <typename T>
void load_checkpoint_as(BasicNet<T>& net, const ModelCheckpoint& ckpt) {
  for (std::size_t i = 0; i < ckpt.tensors.size(); ++i) {
    auto& dst = net.params()[i];
    const auto& src = ckpt.tensors[i].values;
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = static_cast<T>(src[j]);
  }
}

}  // namespace

TEST_SUITE_BEGIN("nnet");

TEST_CASE("uniform predictor cross-entropy at the start position is ln 20") {
  const NetConfig cfg = tiny_config();
  PolicyValueNet net(cfg);
  ModelCheckpoint ckpt = init_random(cfg, 7);
  // Zero the policy dense layer: all logits identical, softmax uniform.
  ckpt.tensors[net.param_index("policy/fc/w")].values.assign(
      ckpt.tensors[net.param_index("policy/fc/w")].values.size(), 0.0f);
  ckpt.tensors[net.param_index("policy/fc/b")].values.assign(1858, 0.0f);
  load_into_net(net, ckpt);

  TestBatch batch;
  const Board start = Board::start_position();
  for (int i = 0; i < 4; ++i) {
    batch.planes.push_back(encode::encode_position(start));
    batch.targets.push_back(
        static_cast<std::uint16_t>(encode::move_index(
            start, Move::from_uci(i % 2 ? "e2e4" : "g1f3"))));
    batch.masks.push_back(encode::legal_mask(start));
  }
  const auto planes = batch.channel_major<float>();
  const float loss = net.train_loss_and_grad(planes.data(), batch.size(),
                                             batch.targets.data(),
                                             batch.masks.data(), cfg.blocks);
  CHECK(std::abs(loss - std::log(20.0)) < 1e-6);
}

TEST_CASE("masked_policy: uniform over legal slots, shift invariant") {
  const Board start = Board::start_position();
  const auto mask = encode::legal_mask(start);
  std::vector<float> logits(1858, 0.4f);
  const auto probs = masked_policy(logits, mask);
  double sum = 0.0;
  int nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    sum += probs[i];
    if (probs[i] != 0.0f) {
      ++nonzero;
      CHECK(probs[i] == doctest::Approx(1.0 / 20).epsilon(1e-6));
      CHECK(mask.test(static_cast<int>(i)));
    }
  }
  CHECK(nonzero == 20);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));

  // Adding a constant to every logit changes nothing.
  Rng rng(3);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    logits[i] = static_cast<float>(rng.next_gaussian());
  }
  const auto base = masked_policy(logits, mask);
  for (auto& v : logits) v += 7.25f;
  const auto shifted = masked_policy(logits, mask);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(shifted[i] == doctest::Approx(base[i]).epsilon(1e-6));
  }

  encode::LegalMask empty;
  CHECK_THROWS_AS(masked_policy(logits, empty), std::invalid_argument);
}

TEST_CASE("gradients match a double-precision finite-difference oracle") {
  const NetConfig cfg = tiny_config();
  const ModelCheckpoint ckpt = init_random(cfg, 99);
  const TestBatch batch = make_batch(4, 1234);

  // Analytic gradients from the production float path.
  PolicyValueNet fnet(cfg);
  load_into_net(fnet, ckpt);
  const auto fplanes = batch.channel_major<float>();
  fnet.zero_grads();
  fnet.train_loss_and_grad(fplanes.data(), batch.size(), batch.targets.data(),
                           batch.masks.data(), cfg.blocks);

  // The oracle: identical math in double precision.
  BasicNet<double> dnet(cfg);
  load_checkpoint_as(dnet, ckpt);
  const auto dplanes = batch.channel_major<double>();
  auto loss_at = [&]() {
    dnet.zero_grads();
    return dnet.train_loss_and_grad(dplanes.data(), batch.size(),
                                    batch.targets.data(), batch.masks.data(),
                                    cfg.blocks);
  };
  // Double analytic gradients for the backward-math sanity check.
  loss_at();
  std::vector<std::vector<double>> dgrads = dnet.grads();

  Rng rng(777);
  std::vector<std::size_t> trainable;
  for (std::size_t i = 0; i < fnet.specs().size(); ++i) {
    if (!fnet.specs()[i].is_state()) trainable.push_back(i);
  }
  double worst_rel = 0.0;
  for (int probe = 0; probe < 200; ++probe) {
    const std::size_t pi =
        trainable[rng.next_below(trainable.size())];
    const std::size_t ei = rng.next_below(dnet.params()[pi].size());
    const double w = dnet.params()[pi][ei];
    const double h = std::max(1e-6, 1e-4 * std::abs(w));
    dnet.params()[pi][ei] = w + h;
    const double up = loss_at();
    dnet.params()[pi][ei] = w - h;
    const double down = loss_at();
    dnet.params()[pi][ei] = w;
    const double fd = (up - down) / (2 * h);

    const double analytic64 = dgrads[pi][ei];
    const double analytic32 =
        static_cast<double>(fnet.grads()[pi][ei]);

    // Backward math vs the oracle, in matching precision.
    if (std::abs(fd) > 1e-7 || std::abs(analytic64) > 1e-7) {
      const double rel64 = std::abs(fd - analytic64) /
                           std::max(std::abs(fd), std::abs(analytic64));
      CHECK(rel64 < 1e-5);
    }
    // Production float gradients against the double oracle.
    if (std::abs(fd) > 1e-6 || std::abs(analytic32) > 1e-6) {
      const double rel32 = std::abs(fd - analytic32) /
                           std::max(std::abs(fd), std::abs(analytic32));
      worst_rel = std::max(worst_rel, rel32);
      if (rel32 >= 1e-3) {
        CAPTURE(fnet.specs()[pi].name);
        CAPTURE(ei);
        CHECK(rel32 < 1e-3);
      }
    } else {
      CHECK(std::abs(fd - analytic32) < 1e-6);
    }
  }
  MESSAGE("worst float-vs-oracle relative error: ", worst_rel);
  CHECK(worst_rel < 1e-3);
}

TEST_CASE("value head: tanh output layer differentiates correctly") {
  // The value head never joins the policy loss, so it is exercised with its
  // own finite-difference check: d(sum of values)/d(final bias) must equal
  // sum(1 - value^2).
  const NetConfig cfg = tiny_config();
  const ModelCheckpoint ckpt = init_random(cfg, 5);
  BasicNet<double> net(cfg);
  load_checkpoint_as(net, ckpt);
  const TestBatch batch = make_batch(5, 88);
  const auto planes = batch.channel_major<double>();

  auto value_sum = [&]() {
    const auto out = net.forward(planes.data(), batch.size(), false);
    double sum = 0.0;
    for (double v : out.value) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    return sum;
  };
  const auto out = net.forward(planes.data(), batch.size(), false);
  double analytic = 0.0;
  for (double v : out.value) analytic += 1.0 - v * v;

  const std::size_t bias_idx = net.param_index("value/fc2/b");
  const double h = 1e-6;
  net.params()[bias_idx][0] += h;
  const double up = value_sum();
  net.params()[bias_idx][0] -= 2 * h;
  const double down = value_sum();
  const double fd = (up - down) / (2 * h);
  CHECK(fd == doctest::Approx(analytic).epsilon(1e-6));
}

TEST_CASE("forward: eval mode is row independent and deterministic") {
  const NetConfig cfg = tiny_config();
  PolicyValueNet net(cfg);
  load_into_net(net, init_random(cfg, 31));
  const TestBatch batch = make_batch(5, 555);
  const auto planes = batch.channel_major<float>();
  const auto full = net.forward(planes.data(), batch.size(), false);

  for (int b = 0; b < batch.size(); ++b) {
    TestBatch single;
    single.planes.push_back(batch.planes[static_cast<std::size_t>(b)]);
    single.targets.push_back(batch.targets[static_cast<std::size_t>(b)]);
    single.masks.push_back(batch.masks[static_cast<std::size_t>(b)]);
    const auto sp = single.channel_major<float>();
    const auto one = net.forward(sp.data(), 1, false);
    for (int s = 0; s < 1858; ++s) {
      const float a = full.policy[static_cast<std::size_t>(b) * 1858 + s];
      const float o = one.policy[static_cast<std::size_t>(s)];
      CHECK(std::abs(a - o) <=
            1e-5f * std::max({1.0f, std::abs(a), std::abs(o)}));
    }
    CHECK(std::abs(full.value[static_cast<std::size_t>(b)] - one.value[0]) <
          1e-5f);
  }

  const auto again = net.forward(planes.data(), batch.size(), false);
  CHECK(again.policy == full.policy);
  CHECK(again.value == full.value);

  // Non-finite input rejected.
  auto bad = planes;
  bad[100] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(net.forward(bad.data(), batch.size(), false),
                  std::invalid_argument);
}

TEST_CASE("gradient stop: zero block gradients below the boundary") {
  const NetConfig cfg = tiny_config();
  const ModelCheckpoint ckpt = init_random(cfg, 11);
  const TestBatch batch = make_batch(4, 2020);
  const auto planes = batch.channel_major<float>();

  auto grads_at_depth = [&](int depth) {
    PolicyValueNet net(cfg);
    load_into_net(net, ckpt);
    net.zero_grads();
    net.train_loss_and_grad(planes.data(), batch.size(), batch.targets.data(),
                            batch.masks.data(), depth);
    std::set<std::string> nonzero;
    for (std::size_t i = 0; i < net.specs().size(); ++i) {
      for (float g : net.grads()[i]) {
        if (g != 0.0f) {
          nonzero.insert(net.specs()[i].name);
          break;
        }
      }
    }
    return nonzero;
  };

  const auto at0 = grads_at_depth(0);
  for (const auto& name : at0) {
    CHECK((name.rfind("policy/", 0) == 0 || name.rfind("value/", 0) == 0));
  }
  CHECK(at0.count("policy/fc/w") == 1);
  CHECK(at0.count("block1/conv1/w") == 0);
  CHECK(at0.count("input/conv/w") == 0);

  // Structural monotonicity: deeper flow trains a superset of parameters.
  auto prev = at0;
  for (int depth = 1; depth <= cfg.blocks; ++depth) {
    const auto cur = grads_at_depth(depth);
    CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    CHECK(cur.size() > prev.size());
    prev = cur;
  }
  CHECK(prev.count("input/conv/w") == 1);
  // Value head stays out of the policy loss at every depth.
  CHECK(prev.count("value/fc2/w") == 0);
  CHECK(prev.count("value/conv/w") == 0);
}

TEST_CASE("sgd with momentum: closed forms") {
  const NetConfig cfg = tiny_config();
  PolicyValueNet net(cfg);
  load_into_net(net, init_random(cfg, 1));
  const std::size_t pi = net.param_index("policy/fc/b");
  net.zero_grads();

  const float w0 = net.params()[pi][5];
  const float g = 0.25f;

  SUBCASE("momentum zero is plain sgd") {
    net.grads()[pi][5] = g;
    net.sgd_momentum_step(0.1f, 0.0f);
    CHECK(net.params()[pi][5] == w0 - 0.1f * g);
  }
  SUBCASE("two steps with constant gradient accumulate (2 + mu)") {
    const float mu = 0.9f;
    net.grads()[pi][5] = g;
    net.sgd_momentum_step(0.1f, mu);
    net.grads()[pi][5] = g;  // same gradient again
    net.sgd_momentum_step(0.1f, mu);
    CHECK(net.params()[pi][5] ==
          doctest::Approx(w0 - 0.1f * g * (2.0f + mu)).epsilon(1e-6));
  }
  SUBCASE("invalid hyperparameters and gradients rejected") {
    CHECK_THROWS_AS(net.sgd_momentum_step(0.0f, 0.5f), std::invalid_argument);
    CHECK_THROWS_AS(net.sgd_momentum_step(0.1f, 1.0f), std::invalid_argument);
    net.grads()[pi][5] = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(net.sgd_momentum_step(0.1f, 0.5f), std::runtime_error);
  }
}

TEST_CASE("lr schedule: the production recipe") {
  const LrSchedule s;
  CHECK(s.lr_at_step(0) == doctest::Approx(1e-4));
  CHECK(s.lr_at_step(14999) == doctest::Approx(1e-4));
  CHECK(s.lr_at_step(15000) == doctest::Approx(1e-5));
  CHECK(s.lr_at_step(19999) == doctest::Approx(1e-5));
  CHECK(s.lr_at_step(20000) == doctest::Approx(1e-6));
  CHECK(s.lr_at_step(25000) == doctest::Approx(1e-7));
  CHECK(s.lr_at_step(29999) == doctest::Approx(1e-7));
  CHECK_THROWS_AS(s.lr_at_step(30000), std::out_of_range);
  CHECK_THROWS_AS(s.lr_at_step(-1), std::out_of_range);

  LrSchedule bad;
  bad.drop_steps = {20000, 15000};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  const LrSchedule scaled = s.scaled_to(3000);
  CHECK(scaled.drop_steps == std::vector<std::int64_t>{1500, 2000, 2500});
  CHECK(scaled.lr_at_step(1499) == doctest::Approx(1e-4));
  CHECK(scaled.lr_at_step(1500) == doctest::Approx(1e-5));
}

TEST_CASE("init modes: from_base copies, noise perturbs, random is seeded") {
  const NetConfig cfg = tiny_config();
  const ModelCheckpoint base = init_random(cfg, 42);

  const ModelCheckpoint copy = init_from_base(base);
  CHECK(copy.tensors == base.tensors);
  CHECK(copy.base_id == base.id());

  const ModelCheckpoint again = init_random(cfg, 42);
  CHECK(again.tensors == base.tensors);
  const ModelCheckpoint other = init_random(cfg, 43);
  CHECK(other.tensors != base.tensors);

  const double sigma = 0.01;
  const ModelCheckpoint noisy = init_noise(base, sigma, 9);
  const auto specs = param_specs(cfg);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].is_state()) {
      CHECK(noisy.tensors[i].values == base.tensors[i].values);
      continue;
    }
    if (specs[i].size() < 10000) continue;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t j = 0; j < specs[i].size(); ++j) {
      const double d = static_cast<double>(noisy.tensors[i].values[j]) -
                       static_cast<double>(base.tensors[i].values[j]);
      sum += d;
      sum2 += d * d;
    }
    const double n = static_cast<double>(specs[i].size());
    const double mean = sum / n;
    const double std_dev = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(mean) < 5.0 * sigma / std::sqrt(n));
    CHECK(std_dev == doctest::Approx(sigma).epsilon(0.05));
  }
}

TEST_CASE("checkpoint: byte-stable round trip and error paths") {
  const NetConfig cfg = tiny_config();
  ModelCheckpoint ckpt = init_random(cfg, 15);
  ckpt.player_id = "someone";
  ckpt.step = 1234;

  const auto bytes = ckpt.serialize();
  const ModelCheckpoint back = ModelCheckpoint::deserialize(bytes);
  CHECK(back == ckpt);
  CHECK(back.serialize() == bytes);
  CHECK(back.id() == ckpt.id());

  SUBCASE("truncation") {
    auto cut = bytes;
    cut.resize(cut.size() - 5);
    CHECK_THROWS_WITH_AS(ModelCheckpoint::deserialize(cut),
                         "checkpoint: truncated tensor data",
                         std::runtime_error);
  }
  SUBCASE("corruption") {
    auto bad = bytes;
    bad[bad.size() / 2] ^= 0x10;
    CHECK_THROWS(ModelCheckpoint::deserialize(bad));
  }
  SUBCASE("bad magic") {
    auto bad = bytes;
    bad[0] = 'Z';
    CHECK_THROWS_WITH_AS(ModelCheckpoint::deserialize(bad),
                         "checkpoint: bad magic", std::runtime_error);
  }
  SUBCASE("config mismatch names the offender") {
    ModelCheckpoint tampered = ckpt;
    tampered.config.filters = 16;  // tensors no longer match
    try {
      tampered.validate();
      FAIL("expected a shape mismatch");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("input/conv/w") != std::string::npos);
    }
    PolicyValueNet net(cfg);
    CHECK_THROWS(load_into_net(net, tampered));
  }
}

TEST_CASE("training on a fixed batch drives the loss down") {
  NetConfig cfg;
  cfg.blocks = 1;
  cfg.filters = 8;
  cfg.se_ratio = 4;
  cfg.policy_hidden = 4;
  cfg.value_hidden = 8;
  PolicyValueNet net(cfg);
  load_into_net(net, init_random(cfg, 3));

  const TestBatch batch = make_batch(32, 777);
  const auto planes = batch.channel_major<float>();

  int improved = 0;
  float prev = std::numeric_limits<float>::max();
  const int steps = 200;
  std::vector<float> losses;
  for (int i = 0; i < steps; ++i) {
    net.zero_grads();
    const float loss = net.train_loss_and_grad(
        planes.data(), batch.size(), batch.targets.data(), batch.masks.data(),
        cfg.blocks);
    net.sgd_momentum_step(1e-3f, 0.9f);
    losses.push_back(loss);
    if (loss < prev) ++improved;
    prev = loss;
  }
  CHECK(improved >= static_cast<int>(steps * 0.95));
  CHECK(losses.back() < losses.front());
}

#include "pawnprint/nn/checkpoint.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "pawnprint/util/hash.hpp"
#include "pawnprint/util/io.hpp"
#include "pawnprint/util/rng.hpp"

namespace pawnprint::nn {

namespace {

constexpr char kMagic[4] = {'M', 'P', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

nlohmann::json manifest_of(const std::vector<NamedTensor>& tensors) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : tensors) {
    out.push_back({{"name", t.name}, {"shape", t.shape}});
  }
  return out;
}

void read_manifest(const nlohmann::json& j, std::vector<NamedTensor>& out) {
  for (const auto& entry : j) {
    NamedTensor t;
    t.name = entry.at("name").get<std::string>();
    t.shape = entry.at("shape").get<std::vector<int>>();
    std::size_t n = 1;
    for (int d : t.shape) n *= static_cast<std::size_t>(d);
    t.values.resize(n);
    out.push_back(std::move(t));
  }
}

}  // namespace

void ModelCheckpoint::validate() const {
  const auto specs = param_specs(config);
  if (tensors.size() != specs.size()) {
    throw std::runtime_error("checkpoint: expected " +
                             std::to_string(specs.size()) + " tensors, found " +
                             std::to_string(tensors.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (tensors[i].name != specs[i].name) {
      throw std::runtime_error("checkpoint: tensor order mismatch at '" +
                               tensors[i].name + "' (expected '" +
                               specs[i].name + "')");
    }
    if (tensors[i].shape != specs[i].shape ||
        tensors[i].values.size() != specs[i].size()) {
      throw std::runtime_error("checkpoint: shape mismatch for tensor '" +
                               tensors[i].name + "'");
    }
  }
  for (const auto& t : tensors) {
    for (float v : t.values) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("checkpoint: non-finite value in '" + t.name +
                                 "'");
      }
    }
  }
}

std::vector<std::uint8_t> ModelCheckpoint::serialize() const {
  nlohmann::json header;
  header["config"] = {{"blocks", config.blocks},
                      {"filters", config.filters},
                      {"se_ratio", config.se_ratio},
                      {"policy_hidden", config.policy_hidden},
                      {"value_hidden", config.value_hidden}};
  header["step"] = step;
  header["base_id"] = base_id;
  header["player_id"] = player_id;
  header["seed"] = seed;
  header["tensors"] = manifest_of(tensors);
  header["momentum"] = manifest_of(momentum);
  const std::string header_text = header.dump();

  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.insert(out.end(), header_text.begin(), header_text.end());
  auto put_values = [&](const std::vector<NamedTensor>& list) {
    for (const auto& t : list) {
      for (float v : t.values) put_f32(out, v);
    }
  };
  put_values(tensors);
  put_values(momentum);
  put_u64(out, fnv1a64(out.data(), out.size()));
  return out;
}

ModelCheckpoint ModelCheckpoint::deserialize(
    std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw std::runtime_error("checkpoint: truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  ByteReader reader(bytes.subspan(4));
  if (reader.u32() != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version");
  }
  const std::uint32_t header_len = reader.u32();
  if (reader.remaining() < header_len + 8) {
    throw std::runtime_error("checkpoint: truncated header");
  }
  const auto header_bytes = reader.take(header_len);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_bytes.begin(), header_bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: bad header: ") +
                             e.what());
  }

  ModelCheckpoint ckpt;
  const auto& cfg = header.at("config");
  ckpt.config.blocks = cfg.at("blocks").get<int>();
  ckpt.config.filters = cfg.at("filters").get<int>();
  ckpt.config.se_ratio = cfg.at("se_ratio").get<int>();
  ckpt.config.policy_hidden = cfg.at("policy_hidden").get<int>();
  ckpt.config.value_hidden = cfg.at("value_hidden").get<int>();
  ckpt.step = header.at("step").get<std::int64_t>();
  ckpt.base_id = header.at("base_id").get<std::string>();
  ckpt.player_id = header.at("player_id").get<std::string>();
  ckpt.seed = header.at("seed").get<std::uint64_t>();
  read_manifest(header.at("tensors"), ckpt.tensors);
  read_manifest(header.at("momentum"), ckpt.momentum);

  std::size_t floats = 0;
  for (const auto& t : ckpt.tensors) floats += t.values.size();
  for (const auto& t : ckpt.momentum) floats += t.values.size();
  if (reader.remaining() != floats * 4 + 8) {
    throw std::runtime_error("checkpoint: truncated tensor data");
  }
  const std::uint64_t stored =
      ByteReader(bytes.subspan(bytes.size() - 8)).u64();
  if (fnv1a64(bytes.data(), bytes.size() - 8) != stored) {
    throw std::runtime_error("checkpoint: checksum mismatch");
  }
  for (auto& t : ckpt.tensors) {
    for (auto& v : t.values) v = reader.f32();
  }
  for (auto& t : ckpt.momentum) {
    for (auto& v : t.values) v = reader.f32();
  }
  ckpt.validate();
  return ckpt;
}

std::string ModelCheckpoint::id() const {
  const auto bytes = serialize();
  return hex64(fnv1a64(bytes.data(), bytes.size()));
}

void ModelCheckpoint::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  write_file(path, bytes);
}

ModelCheckpoint ModelCheckpoint::load(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return deserialize(bytes);
}

ModelCheckpoint init_random(const NetConfig& config, std::uint64_t seed) {
  ModelCheckpoint ckpt;
  ckpt.config = config;
  ckpt.seed = seed;
  const auto specs = param_specs(config);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const ParamSpec& s = specs[i];
    NamedTensor t{s.name, s.shape, std::vector<float>(s.size(), 0.0f)};
    switch (s.kind) {
      case ParamKind::Weight: {
        Rng rng(derive_seed(seed, i, 0x1217));
        const double std_dev =
            std::sqrt(2.0 / static_cast<double>(fan_in(s)));
        for (auto& v : t.values) {
          v = static_cast<float>(rng.next_gaussian() * std_dev);
        }
        break;
      }
      case ParamKind::BnGamma:
      case ParamKind::BnVar:
        std::fill(t.values.begin(), t.values.end(), 1.0f);
        break;
      default:
        break;  // biases, beta, running mean stay zero
    }
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

ModelCheckpoint init_from_base(const ModelCheckpoint& base) {
  base.validate();
  ModelCheckpoint ckpt;
  ckpt.config = base.config;
  ckpt.tensors = base.tensors;
  ckpt.step = 0;
  ckpt.base_id = base.id();
  ckpt.seed = base.seed;
  return ckpt;
}

ModelCheckpoint init_noise(const ModelCheckpoint& base, double sigma,
                           std::uint64_t seed) {
  if (sigma < 0) throw std::invalid_argument("noise sigma must be >= 0");
  ModelCheckpoint ckpt = init_from_base(base);
  ckpt.seed = seed;
  const auto specs = param_specs(ckpt.config);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].is_state()) continue;  // leave running stats alone
    Rng rng(derive_seed(seed, i, 0x7015e));
    for (auto& v : ckpt.tensors[i].values) {
      v += static_cast<float>(rng.next_gaussian() * sigma);
    }
  }
  return ckpt;
}

void load_into_net(PolicyValueNet& net, const ModelCheckpoint& ckpt) {
  if (!(net.config() == ckpt.config)) {
    throw std::runtime_error("checkpoint config does not match network");
  }
  ckpt.validate();
  auto& params = net.params();
  for (std::size_t i = 0; i < ckpt.tensors.size(); ++i) {
    params[i].assign(ckpt.tensors[i].values.begin(),
                     ckpt.tensors[i].values.end());
  }
  auto& velocity = net.velocity();
  if (!ckpt.momentum.empty()) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < net.specs().size(); ++i) {
      if (net.specs()[i].is_state()) continue;
      if (m >= ckpt.momentum.size() ||
          ckpt.momentum[m].name != net.specs()[i].name) {
        throw std::runtime_error("checkpoint: momentum manifest mismatch at '" +
                                 net.specs()[i].name + "'");
      }
      velocity[i].assign(ckpt.momentum[m].values.begin(),
                         ckpt.momentum[m].values.end());
      ++m;
    }
  } else {
    for (std::size_t i = 0; i < velocity.size(); ++i) {
      std::fill(velocity[i].begin(), velocity[i].end(), 0.0f);
    }
  }
}

ModelCheckpoint checkpoint_from_net(const PolicyValueNet& net,
                                    std::int64_t step,
                                    const std::string& base_id,
                                    const std::string& player_id,
                                    std::uint64_t seed) {
  ModelCheckpoint ckpt;
  ckpt.config = net.config();
  ckpt.step = step;
  ckpt.base_id = base_id;
  ckpt.player_id = player_id;
  ckpt.seed = seed;
  const auto& specs = net.specs();
  const auto& params = net.params();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    ckpt.tensors.push_back(
        {specs[i].name, specs[i].shape,
         std::vector<float>(params[i].begin(), params[i].end())});
  }
  const auto& velocity = const_cast<PolicyValueNet&>(net).velocity();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].is_state()) continue;
    ckpt.momentum.push_back(
        {specs[i].name, specs[i].shape,
         std::vector<float>(velocity[i].begin(), velocity[i].end())});
  }
  return ckpt;
}

}  // namespace pawnprint::nn

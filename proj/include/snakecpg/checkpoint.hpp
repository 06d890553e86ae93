// Policy checkpoints. Layout, all integers little-endian:
//   8 bytes  magic "SNKCPGCK"
//   u32      format version
//   u64      config digest
//   u64      header length, then the JSON header (network specs, metadata)
//   per network: u64 parameter count, then that many IEEE-754 doubles
//   u64      FNV-1a of every parameter byte

#ifndef SNAKECPG_CHECKPOINT_HPP_
#define SNAKECPG_CHECKPOINT_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "snakecpg/game.hpp"
#include "snakecpg/policy.hpp"

namespace snakecpg::checkpoint {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

inline constexpr char kMagic[8] = {'S', 'N', 'K', 'C', 'P', 'G', 'C', 'K'};
inline constexpr std::uint32_t kVersion = 1;

using json = nlohmann::json;

inline json spec_to_json(const policy::NetSpec& s) {
  return {{"input", s.input},     {"hidden", s.hidden},           {"actions", s.actions},
          {"options", s.options}, {"termination", s.termination}, {"input_scale", s.input_scale},
          {"init_log_std", s.init_log_std}};
}

inline policy::NetSpec spec_from_json(const json& j) {
  policy::NetSpec s;
  s.input = j.at("input").get<std::size_t>();
  s.hidden = j.at("hidden").get<std::size_t>();
  s.actions = j.at("actions").get<std::size_t>();
  s.options = j.at("options").get<std::size_t>();
  s.termination = j.at("termination").get<bool>();
  s.input_scale = j.at("input_scale").get<std::vector<double>>();
  s.init_log_std = j.at("init_log_std").get<double>();
  s.validate();
  return s;
}

struct Checkpoint {
  game::JointPolicy joint;
  std::uint64_t config_digest = 0;
  json meta = json::object();  // free-form: role, task mode, iteration, ...
};

namespace detail {

template <class T>
void put(std::ostream& o, T v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("checkpoint truncated");
  return v;
}

}  // namespace detail

inline void save(const Checkpoint& c, const std::string& path) {
  std::vector<const policy::Network*> nets{&c.joint.pi1};
  if (c.joint.pi2) nets.push_back(&*c.joint.pi2);
  json h;
  h["nets"] = json::array();
  for (const auto* n : nets) h["nets"].push_back(spec_to_json(n->spec()));
  h["meta"] = c.meta;
  const std::string header = h.dump();

  std::ofstream o(path, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write checkpoint " + path);
  o.write(kMagic, sizeof kMagic);
  detail::put<std::uint32_t>(o, kVersion);
  detail::put<std::uint64_t>(o, c.config_digest);
  detail::put<std::uint64_t>(o, header.size());
  o.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::uint64_t sum = 14695981039346656037ULL;
  for (const auto* n : nets) {
    const auto& p = n->params();
    detail::put<std::uint64_t>(o, p.size());
    o.write(reinterpret_cast<const char*>(p.data()),
            static_cast<std::streamsize>(p.size() * sizeof(double)));
    sum = policy::fnv1a(p.data(), p.size() * sizeof(double), sum);
  }
  detail::put<std::uint64_t>(o, sum);
  if (!o) throw std::runtime_error("write failed for " + path);
}

inline Checkpoint load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error(path + " is not a checkpoint");
  const auto version = detail::get<std::uint32_t>(in);
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  Checkpoint c;
  c.config_digest = detail::get<std::uint64_t>(in);
  const auto hlen = detail::get<std::uint64_t>(in);
  if (hlen > (1u << 24)) throw std::runtime_error("checkpoint header too large");
  std::string header(hlen, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(hlen)))
    throw std::runtime_error("checkpoint truncated");
  const json h = json::parse(header);
  const auto& specs = h.at("nets");
  if (specs.empty() || specs.size() > 2) throw std::runtime_error("checkpoint needs 1 or 2 networks");
  std::vector<policy::Network> nets;
  std::uint64_t sum = 14695981039346656037ULL;
  for (const auto& js : specs) {
    policy::Network n(spec_from_json(js));
    const auto count = detail::get<std::uint64_t>(in);
    if (count != n.size()) throw std::runtime_error("parameter count does not match spec");
    auto& p = n.params();
    if (!in.read(reinterpret_cast<char*>(p.data()),
                 static_cast<std::streamsize>(p.size() * sizeof(double))))
      throw std::runtime_error("checkpoint truncated");
    sum = policy::fnv1a(p.data(), p.size() * sizeof(double), sum);
    nets.push_back(std::move(n));
  }
  if (detail::get<std::uint64_t>(in) != sum) throw std::runtime_error("checkpoint checksum mismatch");
  c.joint.pi1 = std::move(nets[0]);
  if (nets.size() > 1) c.joint.pi2 = std::move(nets[1]);
  c.meta = h.value("meta", json::object());
  return c;
}

}  // namespace snakecpg::checkpoint

#endif  // SNAKECPG_CHECKPOINT_HPP_

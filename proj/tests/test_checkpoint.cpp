#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "snakecpg/checkpoint.hpp"

using namespace snakecpg;

namespace {

std::string tmp(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

checkpoint::Checkpoint sample(bool with_regulator) {
  policy::NetSpec s1;
  s1.input = 6;
  s1.hidden = 8;
  s1.options = 3;
  s1.termination = true;
  checkpoint::Checkpoint c;
  c.joint.pi1 = policy::Network::random(s1, 11);
  if (with_regulator) {
    policy::NetSpec s2;
    s2.input = 9;
    s2.hidden = 5;
    c.joint.pi2 = policy::Network::random(s2, 12);
  }
  c.config_digest = 0x1234abcdULL;
  c.meta = {{"role", "joint"}, {"iteration", 3}};
  return c;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const std::string& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitExact) {
  for (bool reg : {false, true}) {
    const auto path = tmp("snakecpg_ck_rt.bin");
    const auto c = sample(reg);
    checkpoint::save(c, path);
    const auto d = checkpoint::load(path);
    EXPECT_EQ(d.joint.pi1.params(), c.joint.pi1.params());
    EXPECT_EQ(d.joint.pi1.digest(), c.joint.pi1.digest());
    ASSERT_EQ(d.joint.pi2.has_value(), reg);
    if (reg) {
      EXPECT_EQ(d.joint.pi2->params(), c.joint.pi2->params());
    }
    EXPECT_EQ(d.config_digest, c.config_digest);
    EXPECT_EQ(d.meta, c.meta);
    const std::vector<double> x(6, 0.3);
    EXPECT_EQ(d.joint.pi1.forward(x).mean, c.joint.pi1.forward(x).mean);
    std::remove(path.c_str());
  }
}

TEST(Checkpoint, DetectsCorruption) {
  const auto path = tmp("snakecpg_ck_bad.bin");
  checkpoint::save(sample(true), path);
  const std::string good = slurp(path);

  auto expect_bad = [&](std::string bytes) {
    spit(path, bytes);
    EXPECT_THROW(checkpoint::load(path), std::exception);
  };
  {
    auto b = good;
    b[0] = 'X';
    expect_bad(b);  // magic
  }
  {
    auto b = good;
    b[8] = 7;
    expect_bad(b);  // version
  }
  {
    auto b = good;
    b[b.size() - 20] ^= 0x01;  // a parameter bit
    expect_bad(b);
  }
  expect_bad(good.substr(0, good.size() - 3));
  expect_bad(good.substr(0, 30));
  expect_bad("");
  std::remove(path.c_str());
  EXPECT_THROW(checkpoint::load(path), std::runtime_error);
}

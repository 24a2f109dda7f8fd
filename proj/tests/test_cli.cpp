#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sek/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const std::string kData = SEK_SAMPLE_DATA;

struct Outcome {
  int code;
  std::string text;
  ordered_json doc;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sek::cli::run(std::move(args), out, err);
  return {code, out.str(), ordered_json::parse(out.str())};
}

std::string temp_file(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / ("sek_cli_" + name);
  std::ofstream(p) << body;
  return p.string();
}

}  // namespace

TEST(Cli, SuperenergyOfMaxwellForm) {
  const auto r = call({"se", "--in", kData + "/maxwell_F.json", "--no-meta"});
  ASSERT_EQ(r.code, 0);
  const auto& c = r.doc["result"]["superenergy"]["components"];
  const std::vector<double> want{0.5, -0.5, 0.5, 0.5};
  for (int a = 0; a < 4; ++a) EXPECT_DOUBLE_EQ(c[a * 4 + a].get<double>(), want[a]);
  EXPECT_FALSE(r.doc.contains("meta"));
  EXPECT_TRUE(r.doc.contains("provenance"));
}

TEST(Cli, DominantPropertyVerdicts) {
  auto r = call({"dp", "--in", kData + "/g.json", "--sign", "minus", "--no-meta"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.doc["result"]["verdict"]["member"].get<bool>());
  // A failed verdict is still a successful computation.
  r = call({"dp", "--in", kData + "/g.json", "--exact", "--no-meta"});
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(r.doc["result"]["verdict"]["member"].get<bool>());
  EXPECT_EQ(r.doc["result"]["verdict"]["method"], "exact_eigen");
}

TEST(Cli, PullbackStretch) {
  auto r = call({"pullback", "--q", "0.5", "--no-meta"});
  ASSERT_EQ(r.code, 0);
  const auto& p = r.doc["result"]["points"][0];
  EXPECT_FALSE(p["properly_related"].get<bool>());
  EXPECT_FALSE(p["witness"].is_null());
  r = call({"pullback", "--q", "2", "--no-meta"});
  EXPECT_TRUE(r.doc["result"]["points"][0]["properly_related"].get<bool>());
  r = call({"pullback", "--in", kData + "/stretch_base.json", "--no-meta"});
  ASSERT_EQ(r.code, 0);
  ASSERT_EQ(r.doc["result"]["points"].size(), 3u);
  EXPECT_FALSE(r.doc["result"]["points"][0]["properly_related"].get<bool>());
  EXPECT_TRUE(r.doc["result"]["points"][2]["properly_related"].get<bool>());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({"se", "--in", "/nonexistent/file.json"}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  EXPECT_EQ(call({"se", "--in", temp_file("bad.json", "{not json")}).code, 1);

  // Degree-3 blocks in dimension 3 on a double form are an unsupported case.
  std::vector<double> c(729, 0.0);
  const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      int k = 0;
      for (int x : perms[i]) k = k * 3 + x;
      for (int x : perms[j]) k = k * 3 + x;
      c[k] = (i < 3 ? 1 : -1) * (j < 3 ? 1 : -1);
    }
  ordered_json doc{{"dim", 3}, {"rank", 6}, {"structure", {{"degrees", {3, 3}}}}, {"components", c}};
  const auto r = call({"se", "--in", temp_file("nblock.json", doc.dump())});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.doc["error"]["code"], "UnsupportedNBlock");
  EXPECT_FALSE(r.doc["error"]["message"].get<std::string>().empty());
}

TEST(Cli, EmittedTensorRoundTrips) {
  const auto r = call({"se", "--in", kData + "/double_form.json", "--no-meta"});
  ASSERT_EQ(r.code, 0);
  const std::string path = temp_file("se_out.json", r.doc["result"]["superenergy"].dump());
  const auto again = call({"dp", "--in", path, "--no-meta"});
  ASSERT_EQ(again.code, 0);
  const auto reparsed = ordered_json::parse(r.doc["result"]["superenergy"].dump());
  const auto& a = reparsed["components"];
  const auto& b = r.doc["result"]["superenergy"]["components"];
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].get<double>(), b[i].get<double>());
  // The superenergy of a double form satisfies the dominant property.
  EXPECT_TRUE(again.doc["result"]["verdict"]["member"].get<bool>());
}

TEST(Cli, DeterministicWithoutMeta) {
  const std::vector<std::string> args{"dp", "--in", kData + "/fluid.json", "--samples", "64", "--seed", "7", "--no-meta"};
  EXPECT_EQ(call(args).text, call(args).text);
  const auto w = call({"wavefront", "--config", kData + "/wavefront.config.json"});
  EXPECT_EQ(w.text, call({"wavefront", "--config", kData + "/wavefront.config.json"}).text);
  EXPECT_LE(w.doc["result"]["max_rel_spread"].get<double>(), 1e-8);
}

TEST(Cli, SeedPrecedence) {
  const std::string in = kData + "/fluid.json";
  ::setenv("SEK_SEED", "99", 1);
  auto r = call({"dp", "--in", in, "--no-meta"});
  EXPECT_EQ(r.doc["provenance"]["seed"].get<std::uint64_t>(), 99u);
  r = call({"dp", "--in", in, "--seed", "5", "--no-meta"});
  EXPECT_EQ(r.doc["provenance"]["seed"].get<std::uint64_t>(), 5u);
  ::unsetenv("SEK_SEED");
  r = call({"dp", "--in", in, "--no-meta"});
  EXPECT_EQ(r.doc["provenance"]["seed"].get<std::uint64_t>(), sek::kDefaultSeed);
}

TEST(Cli, ConfigFileYieldsToCommandLine) {
  const std::string cfg = temp_file("cfg.json", R"({"seed": 11, "samples": 32, "sign": "minus", "no-meta": true})");
  auto r = call({"dp", "--in", kData + "/g.json", "--config", cfg});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.doc["provenance"]["seed"].get<std::uint64_t>(), 11u);
  EXPECT_EQ(r.doc["result"]["verdict"]["sign"], "minus");
  EXPECT_FALSE(r.doc.contains("meta"));
  r = call({"dp", "--in", kData + "/g.json", "--config", cfg, "--seed", "12"});
  EXPECT_EQ(r.doc["provenance"]["seed"].get<std::uint64_t>(), 12u);
  const auto& tol = r.doc["provenance"]["tolerances"];
  EXPECT_DOUBLE_EQ(tol["classification"].get<double>(), 1e-10);
  EXPECT_DOUBLE_EQ(tol["algebraic"].get<double>(), 1e-9);
}

TEST(Cli, ClassifySymmetryAndDecompose) {
  auto r = call({"classify", "--in", kData + "/fluid.json", "--no-meta"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.doc["result"]["classification"]["kind"], "perfect_fluid");
  r = call({"symmetry", "--builtin", "robertson_walker", "--adot", "-0.5", "--no-meta"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(r.doc["result"]["interval"]["upper"].get<double>(), -0.25, 1e-12);
  r = call({"decompose", "--in", kData + "/fluid.json", "--no-meta"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.doc["result"]["decomposition"]["terms"].size(), 2u);
  // The metric lies in DP- only, so there is nothing to decompose.
  r = call({"decompose", "--in", kData + "/g.json", "--no-meta"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.doc["error"]["code"], "NotDominant");
}

TEST(Cli, HelpExitsCleanly) {
  std::ostringstream out, err;
  EXPECT_EQ(sek::cli::run({"--help"}, out, err), 0);
  EXPECT_NE(out.str().find("--samples"), std::string::npos);
}

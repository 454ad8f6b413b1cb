// Copyright 2026 The dyngem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "dyngem/experiment.hpp"

using namespace dyngem;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("dyngem_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json small(const fs::path& out, const std::string& method = "optsvd") {
  json j = json::parse(R"({
    "seed": 5,
    "data": {"sbm": {"node_num": 30, "community_num": 2, "length": 4, "node_change_num": 2,
                     "p_in": 0.4, "p_out": 0.05}},
    "method": {"name": "optsvd", "d": 4, "enc_units": [16], "dec_units": [16], "n_iter": 5,
               "n_batch": 10},
    "tasks": {"k_grid": [1, 10, 100], "static_lp": true}
  })");
  j["output_dir"] = out.string();
  j["method"]["name"] = method;
  return j;
}

std::string field_of(const json& j) {
  try {
    parse_experiment_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DYNGEM_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsResolve) {
  const auto c = parse_experiment_config(json::parse(R"({"data": {"sbm": {}}})"));
  EXPECT_EQ(c.method.name, "optsvd");
  EXPECT_EQ(c.method.ae.d, 128);
  EXPECT_EQ(c.data.sbm->node_num, 1000);
  EXPECT_EQ(c.data.sbm->node_change_num, 10);
  EXPECT_EQ(c.tasks.lp_mode, "both");
  const json resolved = to_json(c);
  EXPECT_EQ(resolved["method"]["n_iter"], 250);
  EXPECT_EQ(resolved["method"]["xeta"], 1e-3);
  EXPECT_EQ(resolved["data"]["sbm"]["seed"], 0);
}

TEST(Config, ResolvedConfigRoundTrips) {
  const auto c = parse_experiment_config(small("/tmp/x", "rerunsvd"));
  const json once = to_json(c);
  EXPECT_EQ(to_json(parse_experiment_config(once)).dump(), once.dump());
}

TEST(Config, InfiniteThetaSurvivesRoundTrip) {
  json j = small("/tmp/x", "rerunsvd");
  j["method"]["theta"] = "inf";
  const auto c = parse_experiment_config(j);
  EXPECT_TRUE(std::isinf(c.method.theta));
  EXPECT_EQ(to_json(c)["method"]["theta"], "inf");
}

TEST(Config, ErrorsNameTheField) {
  const json base = small("/tmp/x");
  auto with = [&](const std::string& path, const json& v) {
    json j = base;
    j[json::json_pointer(path)] = v;
    return field_of(j);
  };
  EXPECT_EQ(with("/method/name", "word2vec"), "method.name");
  EXPECT_EQ(with("/method/d", -1), "method");
  EXPECT_EQ(with("/method/d", "big"), "method.d");
  EXPECT_EQ(with("/method/bogus", 1), "method.bogus");
  EXPECT_EQ(with("/tasks/k_grid", json::array()), "tasks.k_grid");
  EXPECT_EQ(with("/tasks/lp_mode", "sometimes"), "tasks.lp_mode");
  EXPECT_EQ(with("/tasks/train_frac", 1.5), "tasks.train_frac");
  EXPECT_EQ(with("/data/sbm/node_change_num", 100), "data.sbm");
  EXPECT_EQ(with("/method/theta", 0), "method.theta");
  EXPECT_EQ(with("/extra", 1), "extra");
  json both = base;
  both["data"]["file"] = "x.txt";
  EXPECT_EQ(field_of(both), "data");
  json d2v = base;
  d2v["method"]["name"] = "d2v_ae";
  d2v["method"]["lookback"] = 4;
  EXPECT_EQ(field_of(d2v), "method.lookback");
}

TEST(Run, WritesOutputsAndManifest) {
  const auto dir = scratch("run_svd");
  const auto cfg = parse_experiment_config(small(dir, "rerunsvd"));
  const auto outcome = run_experiment(cfg);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "embeddings" / "emb_t3.src"));
  EXPECT_TRUE(fs::exists(dir / "restart_log.txt"));
  EXPECT_TRUE(fs::exists(dir / "projections" / "proj_t2.txt"));
  EXPECT_TRUE(fs::exists(dir / "reports" / "temporal_lp_t0_new.json"));
  EXPECT_TRUE(fs::exists(dir / "reports" / "static_lp_t3.json"));
  EXPECT_TRUE(fs::exists(dir / "reports" / "classification_t0.json"));
  EXPECT_TRUE(fs::exists(dir / "reports" / "migration_t1_entering.json"));
  EXPECT_TRUE(fs::exists(dir / "reports" / "migration_t0_next.json"));
  EXPECT_TRUE(verify_manifest(dir).empty());
  const auto& m = outcome.manifest;
  EXPECT_EQ(m["config"]["method"]["name"], "rerunsvd");
  const std::string dump = m.dump();
  EXPECT_EQ(dump.find(fs::temp_directory_path().string() + "/dyngem_test_run_svd/"), std::string::npos);
  for (const auto& r : outcome.reports) EXPECT_EQ(r.config_digest, m["config_digest"]);
}

TEST(Run, RerunFromManifestReproducesOutputs) {
  const auto a = scratch("rerun_a");
  const auto b = scratch("rerun_b");
  run_experiment(parse_experiment_config(small(a, "dyngem")));
  json manifest = json::parse(text::read_file((a / "manifest.json").string()));
  manifest["config"]["output_dir"] = b.string();
  run_experiment(parse_experiment_config(manifest));
  const auto ma = json::parse(text::read_file((a / "manifest.json").string()));
  const auto mb = json::parse(text::read_file((b / "manifest.json").string()));
  EXPECT_EQ(ma["files"].dump(), mb["files"].dump());
}

TEST(Run, D2vSkipsStepsWithoutAWindow) {
  const auto dir = scratch("run_d2v");
  const auto outcome = run_experiment(parse_experiment_config(small(dir, "d2v_ae")));
  EXPECT_FALSE(fs::exists(dir / "embeddings" / "emb_t0.src"));
  EXPECT_TRUE(fs::exists(dir / "embeddings" / "emb_t1.src"));
  EXPECT_FALSE(fs::exists(dir / "reports" / "reconstruction_t1.json"));
  EXPECT_TRUE(fs::exists(dir / "reports" / "reconstruction_t2.json"));
  EXPECT_TRUE(fs::exists(dir / "reports" / "temporal_lp_t2_all.json"));
  EXPECT_TRUE(fs::exists(dir / "models" / "model_d2v.txt"));
}

TEST(Run, FileInputRecordsDigest) {
  const auto dir = scratch("run_file");
  const auto series = diminish_series(*parse_experiment_config(small(dir)).data.sbm);
  save_snapshots(series.sequence, (dir / "in.txt").string());
  json j = small(dir / "out");
  j["data"] = {{"file", (dir / "in.txt").string()}};
  const auto outcome = run_experiment(parse_experiment_config(j));
  EXPECT_EQ(outcome.manifest["inputs"]["sha256"], file_sha256((dir / "in.txt").string()));
  EXPECT_FALSE(fs::exists(dir / "out" / "reports" / "classification_t0.json"));
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  EXPECT_EQ(run_cli("--version"), 0);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("generate --nodes 40"), 2);
  EXPECT_EQ(run_cli("generate --nodes 40 --communities 2 --length 3 --migrate 30 --out " + dir.string()), 2);
  ASSERT_EQ(run_cli("generate --nodes 40 --communities 2 --length 3 --migrate 2 --seed 7 --out " +
                    dir.string()),
            0);
  const auto seq = load_snapshots((dir / "snapshots.txt").string());
  EXPECT_EQ(seq.length(), 3u);
  EXPECT_EQ(seq.num_nodes(), 40);

  ASSERT_EQ(run_cli("embed --input " + (dir / "snapshots.txt").string() +
                    " --method optsvd --d 4 --out " + (dir / "emb").string()),
            0);
  EXPECT_EQ(run_cli("embed --input " + (dir / "snapshots.txt").string() +
                    " --method magic --out " + (dir / "emb2").string()),
            2);
  EXPECT_EQ(run_cli("evaluate --embeddings " + (dir / "emb").string() + " --input " +
                    (dir / "snapshots.txt").string() + " --task temporal_lp --mode new --out " +
                    (dir / "lp.json").string()),
            0);
  EXPECT_EQ(json::parse(text::read_file((dir / "lp.json").string())).size(), 2u);
  EXPECT_EQ(run_cli("evaluate --embeddings " + (dir / "emb").string() + " --task classification --labels " +
                    (dir / "labels.txt").string() + " --out " + (dir / "cls.json").string()),
            0);
  EXPECT_EQ(run_cli("project --embeddings " + (dir / "emb").string() + " --t 1 --labels " +
                    (dir / "labels.txt").string() + " --migrations " +
                    (dir / "migrations.txt").string() + " --out " + (dir / "proj.txt").string()),
            0);

  text::write_file((dir / "bad.txt").string(), "2 3\n0 0 9 1\n");
  EXPECT_EQ(run_cli("embed --input " + (dir / "bad.txt").string() + " --method optsvd --d 2 --out " +
                    (dir / "emb3").string()),
            1);

  text::write_file((dir / "cfg.json").string(), small(dir / "run").dump());
  EXPECT_EQ(run_cli("run --quiet --config " + (dir / "cfg.json").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "run" / "manifest.json"));
  EXPECT_EQ(run_cli("run --config " + (dir / "cfg.json").string() + " --method nope"), 2);
  text::write_file((dir / "broken.json").string(), "{ not json");
  EXPECT_EQ(run_cli("run --config " + (dir / "broken.json").string()), 2);
}

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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dyngem/ae_embed.hpp"
#include "dyngem/digest.hpp"
#include "dyngem/embedding.hpp"
#include "dyngem/sbm.hpp"
#include "dyngem/snapshot_io.hpp"
#include "dyngem/svd_embed.hpp"
#include "dyngem/tasks.hpp"

#ifndef DYNGEM_VERSION
#define DYNGEM_VERSION "0.1.0"
#endif

namespace dyngem {

using json = nlohmann::ordered_json;

// Invalid experiment configuration; field names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& msg)
      : std::runtime_error("config field '" + field + "': " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"optsvd",  "incsvd",  "rerunsvd", "ae_static",
                                              "aealign", "dyngem", "d2v_ae"};
  return names;
}

inline bool is_svd_method(const std::string& m) {
  return m == "optsvd" || m == "incsvd" || m == "rerunsvd";
}

struct DataConfig {
  std::optional<SbmParams> sbm;
  std::string file;        // snapshot file, when sbm is absent
  std::string labels;      // optional labels file for a snapshot file
  std::string migrations;  // optional migrations file for a snapshot file
};

struct MethodConfig {
  std::string name = "optsvd";
  double theta = 0.1;
  int tracked_rank = 0;  // 0: default_tracked_rank
  AeConfig ae;           // ae.d is the embedding dimension for every method
};

struct TaskConfig {
  std::vector<std::size_t> k_grid{1, 10, 100, 1000, 10000};
  bool reconstruction = true;
  bool static_lp = false;
  double hide_fraction = 0.2;
  bool temporal_lp = true;
  std::string lp_mode = "both";  // all | new | both
  bool classification = true;
  double train_frac = 0.5;
  bool projection = true;
  bool migration = true;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  DataConfig data;
  MethodConfig method;
  TaskConfig tasks;
};

namespace detail {

inline void check_keys(const json& j, const std::string& path,
                       const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

template <typename T>
void read_field(const json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  const std::string field = path.empty() ? key : path + "." + key;
  try {
    const json& v = j.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(field, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
          throw ConfigError(field, "must be non-negative");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (v.is_string() && v.get<std::string>() == "inf") {
        out = std::numeric_limits<T>::infinity();
        return;
      }
      if (!v.is_number()) throw ConfigError(field, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(field, "expected a string");
    }
    out = v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

inline json number_or_inf(double x) { return std::isinf(x) ? json("inf") : json(x); }

}  // namespace detail

inline json to_json(const SbmParams& p) {
  return {{"node_num", p.node_num},       {"community_num", p.community_num},
          {"length", p.length},           {"diminish_community", p.diminish_community},
          {"node_change_num", p.node_change_num}, {"p_in", p.p_in},
          {"p_out", p.p_out},             {"seed", p.seed}};
}

// Fully resolved configuration, every default spelled out.
inline json to_json(const ExperimentConfig& c) {
  json data;
  if (c.data.sbm) {
    data["sbm"] = to_json(*c.data.sbm);
  } else {
    data["file"] = c.data.file;
    if (!c.data.labels.empty()) data["labels"] = c.data.labels;
    if (!c.data.migrations.empty()) data["migrations"] = c.data.migrations;
  }
  json method = {{"name", c.method.name},
                 {"theta", detail::number_or_inf(c.method.theta)},
                 {"tracked_rank", c.method.tracked_rank}};
  const json ae = to_json(c.method.ae);
  for (const auto& [k, v] : ae.items()) method[k] = v;
  method.erase("seed");
  json tasks = {{"k_grid", c.tasks.k_grid},
                {"reconstruction", c.tasks.reconstruction},
                {"static_lp", c.tasks.static_lp},
                {"hide_fraction", c.tasks.hide_fraction},
                {"temporal_lp", c.tasks.temporal_lp},
                {"lp_mode", c.tasks.lp_mode},
                {"classification", c.tasks.classification},
                {"train_frac", c.tasks.train_frac},
                {"projection", c.tasks.projection},
                {"migration", c.tasks.migration}};
  return {{"seed", c.seed},
          {"output_dir", c.output_dir},
          {"data", data},
          {"method", method},
          {"tasks", tasks}};
}

inline void validate(const ExperimentConfig& c) {
  const auto& m = c.method;
  if (std::find(method_names().begin(), method_names().end(), m.name) == method_names().end()) {
    throw ConfigError("method.name", "unknown method '" + m.name + "'");
  }
  if (c.data.sbm) {
    try {
      validate(*c.data.sbm);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("data.sbm", e.what());
    }
    if (m.ae.d > c.data.sbm->node_num) throw ConfigError("method.d", "exceeds node_num");
  } else if (c.data.file.empty()) {
    throw ConfigError("data", "exactly one of 'sbm' or 'file' is required");
  }
  if (!(m.theta > 0.0)) throw ConfigError("method.theta", "must be positive");
  if (m.tracked_rank != 0 && m.tracked_rank < m.ae.d) {
    throw ConfigError("method.tracked_rank", "must be 0 or at least d");
  }
  try {
    validate(m.ae);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("method", e.what());
  }
  if (m.name == "d2v_ae" && c.data.sbm && c.data.sbm->length < m.ae.lookback + 1) {
    throw ConfigError("method.lookback", "sequence shorter than lookback + 1");
  }
  const auto& t = c.tasks;
  if (t.k_grid.empty()) throw ConfigError("tasks.k_grid", "must not be empty");
  for (auto k : t.k_grid) {
    if (k == 0) throw ConfigError("tasks.k_grid", "entries must be positive");
  }
  if (!(t.hide_fraction > 0.0 && t.hide_fraction < 1.0)) {
    throw ConfigError("tasks.hide_fraction", "must lie in (0,1)");
  }
  if (!(t.train_frac > 0.0 && t.train_frac < 1.0)) {
    throw ConfigError("tasks.train_frac", "must lie in (0,1)");
  }
  if (t.lp_mode != "all" && t.lp_mode != "new" && t.lp_mode != "both") {
    throw ConfigError("tasks.lp_mode", "expected 'all', 'new' or 'both'");
  }
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

// Parses a config document. A manifest written by run_experiment is also
// accepted; its embedded resolved config is used.
inline ExperimentConfig parse_experiment_config(const json& doc) {
  const json& j = (doc.is_object() && doc.contains("manifest_version")) ? doc.at("config") : doc;
  ExperimentConfig c;
  detail::check_keys(j, "", {"seed", "output_dir", "data", "method", "tasks"});
  detail::read_field(j, "", "seed", c.seed);
  detail::read_field(j, "", "output_dir", c.output_dir);

  if (!j.contains("data")) throw ConfigError("data", "missing");
  const json& data = j.at("data");
  detail::check_keys(data, "data", {"sbm", "file", "labels", "migrations"});
  if (data.contains("sbm") == data.contains("file")) {
    throw ConfigError("data", "exactly one of 'sbm' or 'file' is required");
  }
  if (data.contains("sbm")) {
    const json& s = data.at("sbm");
    detail::check_keys(s, "data.sbm",
                       {"node_num", "community_num", "length", "diminish_community",
                        "node_change_num", "p_in", "p_out", "seed"});
    SbmParams p;
    p.seed = c.seed;
    detail::read_field(s, "data.sbm", "node_num", p.node_num);
    detail::read_field(s, "data.sbm", "community_num", p.community_num);
    detail::read_field(s, "data.sbm", "length", p.length);
    detail::read_field(s, "data.sbm", "diminish_community", p.diminish_community);
    detail::read_field(s, "data.sbm", "node_change_num", p.node_change_num);
    detail::read_field(s, "data.sbm", "p_in", p.p_in);
    detail::read_field(s, "data.sbm", "p_out", p.p_out);
    detail::read_field(s, "data.sbm", "seed", p.seed);
    c.data.sbm = p;
  } else {
    detail::read_field(data, "data", "file", c.data.file);
    detail::read_field(data, "data", "labels", c.data.labels);
    detail::read_field(data, "data", "migrations", c.data.migrations);
  }

  if (j.contains("method")) {
    const json& m = j.at("method");
    detail::check_keys(m, "method",
                       {"name", "d", "theta", "tracked_rank", "beta", "nu1", "nu2", "enc_units",
                        "dec_units", "n_iter", "n_iter_warm", "xeta", "n_batch", "lookback",
                        "rho", "seed_stride", "proper_rotation"});
    auto& ae = c.method.ae;
    detail::read_field(m, "method", "name", c.method.name);
    detail::read_field(m, "method", "d", ae.d);
    detail::read_field(m, "method", "theta", c.method.theta);
    detail::read_field(m, "method", "tracked_rank", c.method.tracked_rank);
    detail::read_field(m, "method", "beta", ae.beta);
    detail::read_field(m, "method", "nu1", ae.nu1);
    detail::read_field(m, "method", "nu2", ae.nu2);
    for (const char* key : {"enc_units", "dec_units"}) {
      if (!m.contains(key)) continue;
      const json& units = m.at(key);
      if (!units.is_array()) throw ConfigError(std::string("method.") + key, "expected an array");
      std::vector<int> out;
      for (const auto& u : units) {
        if (!u.is_number_integer()) {
          throw ConfigError(std::string("method.") + key, "expected integer widths");
        }
        out.push_back(u.get<int>());
      }
      (std::string(key) == "enc_units" ? ae.enc_units : ae.dec_units) = out;
    }
    detail::read_field(m, "method", "n_iter", ae.n_iter);
    detail::read_field(m, "method", "n_iter_warm", ae.n_iter_warm);
    detail::read_field(m, "method", "xeta", ae.xeta);
    detail::read_field(m, "method", "n_batch", ae.n_batch);
    detail::read_field(m, "method", "lookback", ae.lookback);
    detail::read_field(m, "method", "rho", ae.rho);
    detail::read_field(m, "method", "seed_stride", ae.seed_stride);
    detail::read_field(m, "method", "proper_rotation", ae.proper_rotation);
  }
  c.method.ae.seed = c.seed;

  if (j.contains("tasks")) {
    const json& t = j.at("tasks");
    detail::check_keys(t, "tasks",
                       {"k_grid", "reconstruction", "static_lp", "hide_fraction", "temporal_lp",
                        "lp_mode", "classification", "train_frac", "projection", "migration"});
    if (t.contains("k_grid")) {
      const json& g = t.at("k_grid");
      if (!g.is_array()) throw ConfigError("tasks.k_grid", "expected an array");
      c.tasks.k_grid.clear();
      for (const auto& k : g) {
        if (!k.is_number_unsigned()) {
          throw ConfigError("tasks.k_grid", "expected non-negative integers");
        }
        c.tasks.k_grid.push_back(k.get<std::size_t>());
      }
    }
    detail::read_field(t, "tasks", "reconstruction", c.tasks.reconstruction);
    detail::read_field(t, "tasks", "static_lp", c.tasks.static_lp);
    detail::read_field(t, "tasks", "hide_fraction", c.tasks.hide_fraction);
    detail::read_field(t, "tasks", "temporal_lp", c.tasks.temporal_lp);
    detail::read_field(t, "tasks", "lp_mode", c.tasks.lp_mode);
    detail::read_field(t, "tasks", "classification", c.tasks.classification);
    detail::read_field(t, "tasks", "train_frac", c.tasks.train_frac);
    detail::read_field(t, "tasks", "projection", c.tasks.projection);
    detail::read_field(t, "tasks", "migration", c.tasks.migration);
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  json doc;
  try {
    doc = json::parse(text::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError("<file>", e.what());
  }
  return parse_experiment_config(doc);
}

// Data loaded or generated for an experiment.
struct ExperimentData {
  SnapshotSequence sequence;
  std::vector<std::vector<int>> labels;          // empty when unknown
  std::vector<std::vector<Migration>> migrated;  // empty when unknown
};

inline ExperimentData load_experiment_data(const DataConfig& d) {
  ExperimentData out;
  if (d.sbm) {
    auto series = diminish_series(*d.sbm);
    out.sequence = std::move(series.sequence);
    out.labels = std::move(series.labels);
    out.migrated = std::move(series.migrated);
    return out;
  }
  out.sequence = load_snapshots(d.file);
  if (!d.labels.empty()) {
    out.labels = parse_labels(text::read_file(d.labels), out.sequence.length(),
                              out.sequence.num_nodes(), d.labels);
  }
  if (!d.migrations.empty()) {
    out.migrated = parse_migrations(text::read_file(d.migrations), out.sequence.length(),
                                    out.sequence.num_nodes(), d.migrations);
  }
  return out;
}

// Embeddings plus whatever each method needs to score pairs afterwards.
struct MethodRun {
  EmbeddingSeries series;
  std::vector<RestartLogEntry> restart_log;
  std::vector<std::pair<std::size_t, MlpParams>> models;  // per snapshot (AE family)
  std::optional<NextStepPredictor> predictor;             // d2v_ae
};

inline MethodRun run_method(const SnapshotSequence& seq, const MethodConfig& m) {
  MethodRun out;
  const Eigen::Index d = m.ae.d;
  if (m.name == "optsvd") {
    out.series = optimal_svd_series(seq, d);
  } else if (m.name == "incsvd" || m.name == "rerunsvd") {
    auto r = m.name == "incsvd" ? incremental_svd_series(seq, d, m.tracked_rank)
                                : rerun_svd_series(seq, d, m.theta, m.tracked_rank);
    out.series = std::move(r.series);
    out.restart_log = std::move(r.log);
  } else if (m.name == "ae_static" || m.name == "aealign" || m.name == "dyngem") {
    auto r = m.name == "ae_static" ? static_ae_series(seq, m.ae)
             : m.name == "aealign" ? aealign_series(seq, m.ae)
                                   : dyngem_series(seq, m.ae);
    out.series = std::move(r.series);
    for (std::size_t t = 0; t < r.training.size(); ++t) {
      out.models.emplace_back(t, std::move(r.training[t].params));
    }
  } else if (m.name == "d2v_ae") {
    auto r = d2v_ae_series(seq, m.ae);
    out.series = std::move(r.series);
    out.predictor = std::move(r.predictor);
  } else {
    throw std::invalid_argument("unknown method '" + m.name + "'");
  }
  return out;
}

// Scores whose (u, v) entry estimates A_t(u, v) from information up to t.
inline Matrix reconstruction_scores(const MethodRun& run, const SnapshotSequence& seq,
                                    std::size_t t) {
  if (run.predictor) {
    if (t < static_cast<std::size_t>(run.predictor->lookback())) {
      throw std::out_of_range("no lookback window before snapshot " + std::to_string(t));
    }
    return run.predictor->predict_next(t - 1);
  }
  if (!run.models.empty()) {
    return forward_batch(run.models.at(t).second, dense_adjacency(seq[t])).output();
  }
  return score_matrix(run.series.at(t));
}

namespace detail {

inline std::vector<TemporalMode> temporal_modes(const std::string& mode) {
  if (mode == "all") return {TemporalMode::kAll};
  if (mode == "new") return {TemporalMode::kNew};
  return {TemporalMode::kAll, TemporalMode::kNew};
}

inline std::string rel(const std::filesystem::path& p, const std::filesystem::path& root) {
  return std::filesystem::relative(p, root).generic_string();
}

}  // namespace detail

struct RunOutcome {
  json manifest;
  std::vector<EvalReport> reports;
  MethodRun method;
};

// generate/load -> embed -> evaluate -> write outputs and manifest.json.
inline RunOutcome run_experiment(const ExperimentConfig& cfg,
                                 std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  validate(cfg);
  const fs::path root(cfg.output_dir);
  fs::create_directories(root);
  std::vector<fs::path> files;
  auto write = [&](const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    text::write_file(p.string(), content);
    files.push_back(p);
  };
  auto say = [&](const std::string& msg) {
    if (log) *log << msg << "\n";
  };

  const json resolved = to_json(cfg);
  // The digest identifies the experiment, not where its files land.
  json digested = resolved;
  digested.erase("output_dir");
  const std::string config_digest = sha256_hex(digested.dump());
  if (cfg.method.ae.rho != AeConfig{}.rho && !is_svd_method(cfg.method.name)) {
    say("warning: method.rho is accepted for compatibility and has no effect");
  }

  ExperimentData data = load_experiment_data(cfg.data);
  const SnapshotSequence& seq = data.sequence;
  write(root / "data" / "snapshots.txt", format_snapshots(seq));
  if (!data.labels.empty()) write(root / "data" / "labels.txt", format_labels(data.labels));
  if (!data.migrated.empty()) {
    write(root / "data" / "migrations.txt", format_migrations(data.migrated));
  }
  say("data: T=" + std::to_string(seq.length()) + " N=" + std::to_string(seq.num_nodes()));

  RunOutcome outcome;
  MethodRun& run = outcome.method;
  run = run_method(seq, cfg.method);
  run.series.config = resolved.at("method");
  for (const auto& p : save_embeddings(run.series, root / "embeddings")) files.push_back(p);
  if (!run.restart_log.empty()) {
    write(root / "restart_log.txt", format_restart_log(run.restart_log));
  }
  for (const auto& [t, params] : run.models) {
    write(root / "models" / ("model_t" + std::to_string(t) + ".txt"), format_model(params));
  }
  if (run.predictor) write(root / "models" / "model_d2v.txt", format_model(run.predictor->params()));
  say("embedded " + std::to_string(run.series.steps.size()) + " snapshots with " + cfg.method.name);

  auto finish = [&](EvalReport r, const std::string& name) {
    r.method = cfg.method.name;
    r.seed = cfg.seed;
    r.config_digest = config_digest;
    write(root / "reports" / (name + ".json"), to_json(r).dump(2) + "\n");
    outcome.reports.push_back(std::move(r));
  };
  const auto ts = run.series.times();

  if (cfg.tasks.reconstruction) {
    for (std::size_t t : ts) {
      if (run.predictor && t < static_cast<std::size_t>(cfg.method.ae.lookback)) continue;
      auto r = graph_reconstruction(reconstruction_scores(run, seq, t), seq[t], cfg.tasks.k_grid);
      r.t = t;
      finish(std::move(r), "reconstruction_t" + std::to_string(t));
    }
  }

  if (cfg.tasks.temporal_lp) {
    for (std::size_t t : ts) {
      if (t + 1 >= seq.length()) continue;
      Matrix scores;
      if (run.predictor) {
        // Retrain on snapshots [0, t] so nothing after t leaks in.
        if (t < static_cast<std::size_t>(cfg.method.ae.lookback)) continue;
        scores = d2v_ae_series(seq.prefix(t + 1), cfg.method.ae).predictor.predict_next(t);
      } else {
        scores = reconstruction_scores(run, seq, t);
      }
      for (TemporalMode mode : detail::temporal_modes(cfg.tasks.lp_mode)) {
        finish(temporal_lp_eval(scores, seq, t, cfg.tasks.k_grid, mode),
               "temporal_lp_t" + std::to_string(t) + "_" + to_string(mode));
      }
    }
  }

  if (cfg.tasks.static_lp) {
    const std::size_t t = seq.length() - 1;
    Rng rng(derive_seed(cfg.seed, 1));
    const auto split = static_lp_split(seq[t], cfg.tasks.hide_fraction, rng);
    Matrix scores;
    if (is_svd_method(cfg.method.name)) {
      auto e = optimal_svd_embed(split.train, cfg.method.ae.d);
      scores = e.src * e.tgt.transpose();
    } else {
      auto tr = train_static_ae(split.train, cfg.method.ae, std::nullopt, std::nullopt,
                                cfg.method.ae.seed_for(t));
      scores = forward_batch(tr.params, dense_adjacency(split.train)).output();
    }
    auto r = static_lp_eval(scores, split, cfg.tasks.k_grid);
    r.t = t;
    finish(std::move(r), "static_lp_t" + std::to_string(t));
  }

  if (cfg.tasks.classification && !data.labels.empty()) {
    for (std::size_t t : ts) {
      Rng rng(derive_seed(cfg.seed, 2 + t));
      const auto c =
          node_classification(run.series.at(t).src, data.labels[t], cfg.tasks.train_frac, rng);
      EvalReport r;
      r.task = "classification";
      r.t = t;
      r.micro_f1 = c.f1.micro;
      r.macro_f1 = c.f1.macro;
      finish(std::move(r), "classification_t" + std::to_string(t));
    }
  }

  if (cfg.tasks.migration && !data.labels.empty() && !data.migrated.empty()) {
    for (std::size_t t : ts) {
      if (!data.migrated[t].empty()) {
        EvalReport r;
        r.task = "migration";
        r.mode = "entering";
        r.t = t;
        r.migration_fraction = migration_proximity_stat(run.series, data.labels, data.migrated, t);
        finish(std::move(r), "migration_t" + std::to_string(t) + "_entering");
      }
      if (t + 1 < seq.length() && !data.migrated[t + 1].empty()) {
        EvalReport r;
        r.task = "migration";
        r.mode = "next";
        r.t = t;
        r.migration_fraction =
            anticipation_proximity_stat(run.series, data.labels, data.migrated, t);
        finish(std::move(r), "migration_t" + std::to_string(t) + "_next");
      }
    }
  }

  if (cfg.tasks.projection) {
    for (std::size_t t : ts) {
      const std::vector<int> labels =
          data.labels.empty() ? std::vector<int>(seq.num_nodes(), 0) : data.labels[t];
      const std::vector<NodeId> flagged =
          data.migrated.empty() ? std::vector<NodeId>{} : [&] {
            std::vector<NodeId> v;
            for (const auto& m : data.migrated[t]) v.push_back(m.node);
            return v;
          }();
      write(root / "projections" / ("proj_t" + std::to_string(t) + ".txt"),
            format_projection(run.series.at(t).src, labels, flagged));
    }
  }

  std::sort(files.begin(), files.end());
  json file_list = json::array();
  for (const auto& f : files) {
    const std::string content = text::read_file(f.string());
    file_list.push_back({{"path", detail::rel(f, root)},
                         {"bytes", content.size()},
                         {"sha256", sha256_hex(content)}});
  }
  json inputs;
  if (cfg.data.sbm) {
    inputs["source"] = "sbm";
  } else {
    inputs["source"] = "file";
    inputs["file"] = cfg.data.file;
    inputs["sha256"] = file_sha256(cfg.data.file);
  }
  outcome.manifest = {{"manifest_version", 1},
                      {"tool", "dyngem"},
                      {"version", DYNGEM_VERSION},
                      {"config", resolved},
                      {"config_digest", config_digest},
                      {"seeds",
                       {{"experiment", cfg.seed},
                        {"data", cfg.data.sbm ? cfg.data.sbm->seed : cfg.seed},
                        {"static_lp_split", derive_seed(cfg.seed, 1)}}},
                      {"inputs", inputs},
                      {"files", file_list}};
  text::write_file((root / "manifest.json").string(), outcome.manifest.dump(2) + "\n");
  return outcome;
}

// Checks every file listed in a manifest against its recorded digest.
inline std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
  const json manifest = json::parse(text::read_file((dir / "manifest.json").string()));
  std::vector<std::string> problems;
  for (const auto& f : manifest.at("files")) {
    const auto path = dir / f.at("path").get<std::string>();
    if (!std::filesystem::exists(path)) {
      problems.push_back("missing " + path.string());
    } else if (file_sha256(path.string()) != f.at("sha256").get<std::string>()) {
      problems.push_back("digest mismatch " + path.string());
    }
  }
  return problems;
}

}  // namespace dyngem

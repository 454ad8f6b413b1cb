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

// dyngem command line: generate, embed, evaluate, project, run.
// Exit codes: 0 success, 1 runtime failure, 2 invalid arguments or config.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dyngem/dyngem.hpp"

namespace fs = std::filesystem;
using namespace dyngem;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;

struct GenerateOpts {
  SbmParams sbm;
  std::string out = ".";
};

struct EmbedOpts {
  std::string input;
  std::string out;
  MethodConfig method;
  std::uint64_t seed = 0;
  bool rho_given = false;
};

struct EvaluateOpts {
  std::string input;
  std::string embeddings;
  std::string task = "reconstruction";
  std::string mode = "all";
  std::optional<std::size_t> t;
  std::vector<std::size_t> k_grid{1, 10, 100, 1000, 10000};
  std::string labels;
  std::string migrations;
  double train_frac = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

struct ProjectOpts {
  std::string embeddings;
  std::size_t t = 0;
  std::string labels;
  std::string migrations;
  std::string out;
};

struct RunOpts {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  bool quiet = false;
};

void add_method_flags(CLI::App* app, MethodConfig& m) {
  app->add_option("--d", m.ae.d, "embedding dimension")->capture_default_str();
  app->add_option("--theta", m.theta, "restart tolerance (rerunsvd)")->capture_default_str();
  app->add_option("--tracked-rank", m.tracked_rank, "internal SVD rank, 0 = min(n, 4d)");
  app->add_option("--beta", m.ae.beta, "weight on nonzero entries")->capture_default_str();
  app->add_option("--nu1", m.ae.nu1, "L1 weight")->capture_default_str();
  app->add_option("--nu2", m.ae.nu2, "L2 weight")->capture_default_str();
  app->add_option("--enc-units", m.ae.enc_units, "encoder hidden widths")->delimiter(',');
  app->add_option("--dec-units", m.ae.dec_units, "decoder hidden widths")->delimiter(',');
  app->add_option("--n-iter", m.ae.n_iter, "epochs")->capture_default_str();
  app->add_option("--n-iter-warm", m.ae.n_iter_warm, "epochs for warm-started steps");
  app->add_option("--xeta", m.ae.xeta, "learning rate")->capture_default_str();
  app->add_option("--n-batch", m.ae.n_batch, "minibatch size")->capture_default_str();
  app->add_option("--lookback", m.ae.lookback, "window length (d2v_ae)")->capture_default_str();
  app->add_option("--rho", m.ae.rho, "accepted, no effect");
}

void write_out(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  text::write_file(p.string(), content);
}

int do_generate(const GenerateOpts& o) {
  try {
    validate(o.sbm);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  const auto series = diminish_series(o.sbm);
  const fs::path dir(o.out);
  write_out(dir / "snapshots.txt", format_snapshots(series.sequence));
  write_out(dir / "labels.txt", format_labels(series.labels));
  write_out(dir / "migrations.txt", format_migrations(series.migrated));
  std::cout << "wrote T=" << series.sequence.length() << " N=" << series.sequence.num_nodes()
            << " to " << dir.string() << "\n";
  return 0;
}

int do_embed(EmbedOpts o) {
  o.method.ae.seed = o.seed;
  try {
    if (std::find(method_names().begin(), method_names().end(), o.method.name) ==
        method_names().end()) {
      throw ConfigError("method", "unknown method '" + o.method.name + "'");
    }
    if (!(o.method.theta > 0.0)) throw ConfigError("theta", "must be positive");
    validate(o.method.ae);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  if (o.rho_given) std::cerr << "warning: --rho has no effect\n";
  const auto seq = load_snapshots(o.input);
  auto run = run_method(seq, o.method);
  const fs::path dir(o.out);
  save_embeddings(run.series, dir);
  if (!run.restart_log.empty()) write_out(dir / "restart_log.txt", format_restart_log(run.restart_log));
  for (const auto& [t, params] : run.models) {
    write_out(dir / ("model_t" + std::to_string(t) + ".txt"), format_model(params));
  }
  if (run.predictor) write_out(dir / "model_d2v.txt", format_model(run.predictor->params()));
  std::cout << "embedded " << run.series.steps.size() << " snapshots into " << dir.string() << "\n";
  return 0;
}

int do_evaluate(const EvaluateOpts& o) {
  const auto series = load_embeddings(o.embeddings);
  std::vector<std::size_t> ts = o.t ? std::vector<std::size_t>{*o.t} : series.times();
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  auto emit = [&](EvalReport r) {
    r.method = series.method;
    r.seed = o.seed;
    r.config_digest = sha256_hex(series.config.dump());
    reports.push_back(to_json(r));
  };
  if (o.task == "classification") {
    if (o.labels.empty()) throw ConfigError("labels", "classification needs --labels");
    const NodeId n = static_cast<NodeId>(series.steps.front().src.rows());
    const auto labels = parse_labels(text::read_file(o.labels), series.steps.back().t + 1, n, o.labels);
    for (auto t : ts) {
      Rng rng(derive_seed(o.seed, 2 + t));
      const auto c = node_classification(series.at(t).src, labels.at(t), o.train_frac, rng);
      EvalReport r;
      r.task = "classification";
      r.t = t;
      r.micro_f1 = c.f1.micro;
      r.macro_f1 = c.f1.macro;
      emit(std::move(r));
    }
  } else if (o.task == "migration") {
    if (o.labels.empty() || o.migrations.empty()) {
      throw ConfigError("labels", "migration needs --labels and --migrations");
    }
    const NodeId n = static_cast<NodeId>(series.steps.front().src.rows());
    const std::size_t len = series.steps.back().t + 1;
    const auto labels = parse_labels(text::read_file(o.labels), len, n, o.labels);
    const auto moves = parse_migrations(text::read_file(o.migrations), len, n, o.migrations);
    for (auto t : ts) {
      if (o.mode == "next") {
        if (t + 1 >= len || moves[t + 1].empty()) continue;
      } else if (moves[t].empty()) {
        continue;
      }
      EvalReport r;
      r.task = "migration";
      r.t = t;
      r.mode = o.mode == "next" ? "next" : "entering";
      r.migration_fraction = o.mode == "next"
                                 ? anticipation_proximity_stat(series, labels, moves, t)
                                 : migration_proximity_stat(series, labels, moves, t);
      emit(std::move(r));
    }
  } else {
    if (o.input.empty()) throw ConfigError("input", o.task + " needs --input");
    const auto seq = load_snapshots(o.input);
    for (auto t : ts) {
      const Matrix scores = score_matrix(series.at(t));
      if (o.task == "reconstruction") {
        auto r = graph_reconstruction(scores, seq.at(t), o.k_grid);
        r.t = t;
        emit(std::move(r));
      } else if (t + 1 < seq.length()) {
        emit(temporal_lp_eval(scores, seq, t, o.k_grid,
                              o.mode == "new" ? TemporalMode::kNew : TemporalMode::kAll));
      }
    }
  }
  const std::string text = reports.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_out(o.out, text);
  }
  return 0;
}

int do_project(const ProjectOpts& o) {
  const auto series = load_embeddings(o.embeddings);
  const Matrix& y = series.at(o.t).src;
  const NodeId n = static_cast<NodeId>(y.rows());
  const std::size_t len = series.steps.back().t + 1;
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  if (!o.labels.empty()) labels = parse_labels(text::read_file(o.labels), len, n, o.labels).at(o.t);
  std::vector<NodeId> flagged;
  if (!o.migrations.empty()) {
    const auto migrated = parse_migrations(text::read_file(o.migrations), len, n, o.migrations);
    for (const auto& m : migrated.at(o.t)) flagged.push_back(m.node);
  }
  write_out(o.out, format_projection(y, labels, flagged));
  return 0;
}

int do_run(const RunOpts& o) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text::read_file(o.config));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  auto& cfg_doc = (doc.is_object() && doc.contains("manifest_version")) ? doc["config"] : doc;
  if (!cfg_doc.is_object()) throw ConfigError("<root>", "expected an object");
  if (o.out) cfg_doc["output_dir"] = *o.out;
  if (o.seed) cfg_doc["seed"] = *o.seed;
  if (o.method) cfg_doc["method"]["name"] = *o.method;
  const auto cfg = parse_experiment_config(doc);
  const auto outcome = run_experiment(cfg, o.quiet ? nullptr : &std::cerr);
  std::cout << "manifest " << (fs::path(cfg.output_dir) / "manifest.json").string() << " ("
            << outcome.manifest.at("files").size() << " files, " << outcome.reports.size()
            << " reports)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic graph embedding toolkit"};
  app.set_version_flag("--version", std::string(DYNGEM_VERSION));
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "generate a diminishing-community SBM sequence");
  g->add_option("--nodes", gen.sbm.node_num, "node count")->required();
  g->add_option("--communities", gen.sbm.community_num, "community count")->required();
  g->add_option("--length", gen.sbm.length, "snapshot count")->required();
  g->add_option("--migrate", gen.sbm.node_change_num, "nodes migrating per step")->required();
  g->add_option("--seed", gen.sbm.seed, "RNG seed")->capture_default_str();
  g->add_option("--p-in", gen.sbm.p_in, "within-community edge probability")->capture_default_str();
  g->add_option("--p-out", gen.sbm.p_out, "cross-community edge probability")->capture_default_str();
  g->add_option("--diminish", gen.sbm.diminish_community, "community losing members")->capture_default_str();
  g->add_option("--out", gen.out, "output directory")->capture_default_str();

  EmbedOpts emb;
  auto* e = app.add_subcommand("embed", "embed every snapshot of a sequence");
  e->add_option("--input", emb.input, "snapshot file")->required()->check(CLI::ExistingFile);
  e->add_option("--method", emb.method.name, "optsvd|incsvd|rerunsvd|ae_static|aealign|dyngem|d2v_ae")
      ->required();
  e->add_option("--out", emb.out, "output directory")->required();
  e->add_option("--seed", emb.seed, "RNG seed")->capture_default_str();
  add_method_flags(e, emb.method);

  EvaluateOpts ev;
  auto* v = app.add_subcommand("evaluate", "score saved embeddings");
  v->add_option("--embeddings", ev.embeddings, "embedding directory")->required()->check(CLI::ExistingDirectory);
  v->add_option("--task", ev.task, "reconstruction|temporal_lp|classification|migration")
      ->check(CLI::IsMember({"reconstruction", "temporal_lp", "classification", "migration"}))
      ->capture_default_str();
  v->add_option("--input", ev.input, "snapshot file")->check(CLI::ExistingFile);
  v->add_option("--mode", ev.mode, "all|new (temporal_lp), entering|next (migration)")
      ->check(CLI::IsMember({"all", "new", "entering", "next"}))
      ->capture_default_str();
  v->add_option("--t", ev.t, "single snapshot index");
  v->add_option("--k", ev.k_grid, "precision@k grid")->delimiter(',');
  v->add_option("--labels", ev.labels, "labels file")->check(CLI::ExistingFile);
  v->add_option("--migrations", ev.migrations, "migrations file")->check(CLI::ExistingFile);
  v->add_option("--train-frac", ev.train_frac, "classification train fraction")->capture_default_str();
  v->add_option("--seed", ev.seed, "RNG seed")->capture_default_str();
  v->add_option("--out", ev.out, "report path (default stdout)");

  ProjectOpts pr;
  auto* p = app.add_subcommand("project", "2-D PCA projection of one snapshot's embedding");
  p->add_option("--embeddings", pr.embeddings, "embedding directory")->required()->check(CLI::ExistingDirectory);
  p->add_option("--t", pr.t, "snapshot index")->required();
  p->add_option("--labels", pr.labels, "labels file")->check(CLI::ExistingFile);
  p->add_option("--migrations", pr.migrations, "migrations file")->check(CLI::ExistingFile);
  p->add_option("--out", pr.out, "output file")->required();

  RunOpts rn;
  auto* r = app.add_subcommand("run", "run an experiment from a JSON config or manifest");
  r->add_option("--config", rn.config, "config file")->required()->check(CLI::ExistingFile);
  r->add_option("--out", rn.out, "override output_dir");
  r->add_option("--seed", rn.seed, "override seed");
  r->add_option("--method", rn.method, "override method.name");
  r->add_flag("--quiet", rn.quiet, "no progress messages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*g) return do_generate(gen);
    if (*e) {
      emb.rho_given = e->count("--rho") > 0;
      return do_embed(emb);
    }
    if (*v) return do_evaluate(ev);
    if (*p) return do_project(pr);
    if (*r) return do_run(rn);
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kRuntimeError;
  }
  return kRuntimeError;
}

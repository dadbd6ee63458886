/*
 * Copyright 2026 The edysec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// edysec command-line front end.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "edysec/artifact.hpp"
#include "edysec/pipeline.hpp"
#include "edysec/service.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace edysec;

namespace {

struct DataArgs {
  std::string data;
  std::string manifest;
};

void AddDataArgs(CLI::App* app, DataArgs& args) {
  app->add_option("--data", args.data, "trace feature CSV")->required();
  app->add_option("--manifest", args.manifest,
                  "feature manifest (default: manifest.json next to the CSV)");
}

TraceDataset LoadData(const DataArgs& args) {
  std::string manifest = args.manifest;
  if (manifest.empty()) manifest = (fs::path(args.data).parent_path() / "manifest.json").string();
  return LoadDataset(args.data, LoadManifest(manifest));
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kWriteFailure, "cannot create " + dir + ": " + ec.message());
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json ReadJson(const std::string& path) {
  try {
    return nlohmann::json::parse(ReadText(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRequest, path + ": " + e.what());
  }
}

// Options shared by the verbs that run (part of) the workflow.
struct WorkflowArgs {
  std::uint64_t seed = 42;
  std::string methods = "anova,corr,importance,pso,woa";
  double alpha = 0.95;
  std::size_t anova_k = 0;
  double importance_fraction = 0.5;
  std::size_t population = 20;
  std::size_t iterations = 50;
  std::string models = "mlp,nn";
  std::size_t epochs = 200;
  std::size_t batch = 16;
  double lr = 1e-3;
  std::size_t patience = 0;
  std::string stability_mode = "selectors";
  std::size_t runs = 10;
  std::size_t resamples = 100000;
  std::string explain_method = "shap";
  std::size_t background = 100;
  std::size_t explain_limit = 0;
  bool no_explain = false;
};

void AddSelectArgs(CLI::App* app, WorkflowArgs& w) {
  app->add_option("--seed", w.seed, "master seed");
  app->add_option("--methods", w.methods, "comma-separated selectors");
  app->add_option("--alpha", w.alpha, "performance weight of the selection objective");
  app->add_option("--anova-k", w.anova_k, "ANOVA subset size (0: one third)");
  app->add_option("--importance-fraction", w.importance_fraction,
                  "keep features with importance >= fraction * max");
  app->add_option("--population", w.population, "swarm population");
  app->add_option("--iterations", w.iterations, "swarm iterations");
}

void AddTrainArgs(CLI::App* app, WorkflowArgs& w) {
  app->add_option("--epochs", w.epochs, "training epochs");
  app->add_option("--batch", w.batch, "mini-batch size");
  app->add_option("--lr", w.lr, "Adam learning rate");
  app->add_option("--patience", w.patience, "early-stop patience (0: off)");
}

PipelineOptions ToOptions(const WorkflowArgs& w) {
  PipelineOptions o;
  o.seed = w.seed;
  o.methods.clear();
  for (const auto& m : SplitList(w.methods)) o.methods.push_back(ParseMethod(m));
  o.alpha = w.alpha;
  o.anova_k = w.anova_k;
  o.importance_fraction = w.importance_fraction;
  o.swarm.population = w.population;
  o.swarm.iterations = w.iterations;
  o.candidates = SplitList(w.models);
  o.train.epochs = w.epochs;
  o.train.batch_size = w.batch;
  o.train.adam.learning_rate = w.lr;
  if (w.patience) o.train.patience = w.patience;
  o.stability_mode = ParseStabilityMode(w.stability_mode);
  o.stability_runs = w.runs;
  o.stability.resamples = w.resamples;
  o.explain = !w.no_explain;
  o.explain_method = ParseExplainMethod(w.explain_method);
  o.explain_cfg.background_rows = w.background;
  o.explain_limit = w.explain_limit;
  return o;
}

void PrintJson(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Human-readable tables from a report directory.
void PrintReport(const std::string& dir) {
  const fs::path root(dir);
  bool any = false;
  if (fs::exists(root / "selection.json")) {
    any = true;
    const auto s = ReadJson((root / "selection.json").string());
    std::cout << "Feature selection (alpha " << FormatFixed(s["alpha"].get<double>(), 2)
              << ", " << s["d_total"].get<std::size_t>() << " source features)\n";
    std::cout << Pad("Method", 12) << Pad("d", 6) << Pad("P", 8) << Pad("J", 12) << "Reduction\n";
    for (const auto& r : s["selectors"]) {
      if (r["status"] != "ok") {
        std::cout << Pad(r["method"].get<std::string>(), 12) << "skipped: "
                  << r["reason"].get<std::string>() << "\n";
        continue;
      }
      std::cout << Pad(r["method"].get<std::string>(), 12)
                << Pad(std::to_string(r["d"].get<std::size_t>()), 6)
                << Pad(r["display"]["P"].get<std::string>(), 8)
                << Pad(r["display"]["J"].get<std::string>(), 12)
                << r["display"]["reduction%"].get<std::string>() << "%\n";
    }
    std::cout << "chosen: " << s["chosen"].get<std::string>() << "\n\n";
  }
  if (fs::exists(root / "evaluation.json")) {
    any = true;
    const auto e = ReadJson((root / "evaluation.json").string());
    std::cout << "Test evaluation (best: " << e["best_model"].get<std::string>() << ")\n";
    std::cout << Pad("Model", 8) << Pad("AUC", 6) << Pad("F1", 6) << Pad("FPR%", 7)
              << Pad("FNR%", 7) << Pad("TP", 7) << Pad("TN", 7) << Pad("FP", 6) << "FN\n";
    for (const auto& r : e["models"]) {
      const auto& d = r["display"];
      std::cout << Pad(r["model"].get<std::string>(), 8)
                << Pad(d.value("AUC", std::string("-")), 6) << Pad(d["F1"].get<std::string>(), 6)
                << Pad(d["FPR%"].get<std::string>(), 7) << Pad(d["FNR%"].get<std::string>(), 7)
                << Pad(std::to_string(r["tp"].get<std::uint64_t>()), 7)
                << Pad(std::to_string(r["tn"].get<std::uint64_t>()), 7)
                << Pad(std::to_string(r["fp"].get<std::uint64_t>()), 6)
                << r["fn"].get<std::uint64_t>() << "\n";
    }
    std::cout << "\n";
  }
  if (fs::exists(root / "stability.json")) {
    any = true;
    const auto s = ReadJson((root / "stability.json").string());
    std::cout << "Stability (" << s["mode"].get<std::string>() << ", std "
              << s["std_convention"].get<std::string>() << ")\n";
    std::cout << Pad("Model", 12) << Pad("Mean F1", 9) << Pad("Std", 7) << Pad("Avg Rank", 10)
              << Pad("95% CI", 17) << "Stability\n";
    for (const auto& r : s["rows"]) {
      const auto& d = r["display"];
      std::cout << Pad(r["model"].get<std::string>(), 12) << Pad(d["Mean F1"].get<std::string>(), 9)
                << Pad(d["Std"].get<std::string>(), 7) << Pad(d["Avg Rank"].get<std::string>(), 10)
                << Pad(d["95% CI"].get<std::string>(), 17) << d["Stability"].get<std::string>()
                << "\n";
    }
    std::cout << "\n";
  }
  if (fs::exists(root / "importance.json")) {
    any = true;
    const auto s = ReadJson((root / "importance.json").string());
    std::cout << "Global importance (mean |phi|)\n";
    for (const auto& g : s["global"]) {
      std::cout << "  " << Pad(g["feature"].get<std::string>(), 24)
                << FormatFixed(g["importance"].get<double>(), 4) << "\n";
    }
    std::cout << "overlap with selection: " << s["overlap"]["common"].size() << " of "
              << s["overlap"]["k"].get<std::size_t>() << " (Jaccard "
              << FormatFixed(s["overlap"]["jaccard"].get<double>(), 3) << ")\n";
  }
  if (!any) throw Error(ErrorCode::kIo, "no reports found in " + dir);
}

// Reads "model,c1,c2,..." rows of scores.
ScoreTable LoadScoreTable(const std::string& path) {
  const auto records = csv::Parse(ReadText(path));
  Require(records.size() >= 2, "score table needs a header and at least one row");
  ScoreTable t;
  t.configs.assign(records[0].begin() + 1, records[0].end());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() == 1 && rec[0].empty()) continue;
    Require(rec.size() == t.configs.size() + 1,
            "score table row " + std::to_string(r) + " has the wrong width");
    t.models.push_back(rec[0]);
    std::vector<double> scores;
    for (std::size_t c = 1; c < rec.size(); ++c) {
      auto v = ParseFiniteDouble(rec[c]);
      if (!v) throw Error(ErrorCode::kBadNumeric, "bad score '" + rec[c] + "'", r);
      scores.push_back(*v);
    }
    t.scores.push_back(std::move(scores));
  }
  return t;
}

volatile std::sig_atomic_t g_stop = 0;
VerdictServer* g_server = nullptr;

void OnSignal(int) {
  g_stop = 1;
  if (g_server) g_server->Stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edysec: dynamic-trace malicious package detection"};
  app.require_subcommand(1);

  // synth
  SyntheticConfig synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a planted synthetic dataset");
  synth->add_option("--rows", synth_cfg.rows, "row count");
  synth->add_option("--informative", synth_cfg.informative, "informative columns");
  synth->add_option("--noise", synth_cfg.noise, "noise columns");
  synth->add_option("--separation", synth_cfg.separation, "activation shift in std units");
  synth->add_option("--seed", synth_cfg.seed, "generator seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  // split
  DataArgs split_data;
  std::uint64_t split_seed = 42;
  std::vector<double> split_ratios = {0.70, 0.15, 0.15};
  bool split_random = false;
  std::string split_out;
  auto* split = app.add_subcommand("split", "stratified train/validation/test split");
  AddDataArgs(split, split_data);
  split->add_option("--seed", split_seed, "split seed");
  split->add_option("--ratios", split_ratios, "train validation test ratios")->expected(3);
  split->add_flag("--unstratified", split_random, "plain shuffled split");
  split->add_option("--out", split_out, "output directory")->required();

  // select
  DataArgs select_data;
  WorkflowArgs select_args;
  std::string select_out = "selection.json";
  auto* select = app.add_subcommand("select", "run feature selectors and choose by objective");
  AddDataArgs(select, select_data);
  AddSelectArgs(select, select_args);
  select->add_option("--out", select_out, "selection report path");

  // train
  DataArgs train_data;
  WorkflowArgs train_args;
  std::string train_model = "mlp";
  std::string train_features;
  std::string train_selection;
  std::string train_out;
  auto* train = app.add_subcommand("train", "train one model on a feature subset");
  AddDataArgs(train, train_data);
  AddTrainArgs(train, train_args);
  train->add_option("--seed", train_args.seed, "master seed");
  train->add_option("--model", train_model, "mlp or nn")
      ->check(CLI::IsMember({"mlp", "nn"}));
  train->add_option("--features", train_features, "comma-separated source features");
  train->add_option("--selection", train_selection, "selection.json from `select`");
  train->add_option("--out", train_out, "output directory")->required();

  // evaluate
  std::string eval_artifact, eval_data, eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "score a labeled CSV with an artifact");
  evaluate->add_option("--artifact", eval_artifact, "model.json")->required();
  evaluate->add_option("--data", eval_data, "labeled CSV in the artifact's schema")->required();
  evaluate->add_option("--out", eval_out, "write evaluation JSON here instead of stdout");

  // stability
  DataArgs stab_data;
  WorkflowArgs stab_args;
  std::string stab_scores, stab_out;
  auto* stability = app.add_subcommand("stability", "stability table across selectors or seeds");
  stability->add_option("--data", stab_data.data, "trace feature CSV");
  stability->add_option("--manifest", stab_data.manifest, "feature manifest");
  stability->add_option("--scores", stab_scores, "precomputed score grid CSV (model,config...)");
  AddSelectArgs(stability, stab_args);
  AddTrainArgs(stability, stab_args);
  stability->add_option("--models", stab_args.models, "candidate models");
  stability->add_option("--mode", stab_args.stability_mode, "selectors or seeds")
      ->check(CLI::IsMember({"selectors", "seeds"}));
  stability->add_option("--runs", stab_args.runs, "runs in seeds mode");
  stability->add_option("--resamples", stab_args.resamples, "bootstrap resamples");
  stability->add_option("--out", stab_out, "write stability JSON here instead of stdout");

  // explain
  std::string expl_artifact, expl_data, expl_out, expl_method = "shap";
  bool expl_per_package = false;
  std::size_t expl_limit = 0;
  auto* explain = app.add_subcommand("explain", "SHAP or LIME explanations for a CSV");
  explain->add_option("--artifact", expl_artifact, "model.json")->required();
  explain->add_option("--data", expl_data, "CSV in the artifact's schema")->required();
  explain->add_option("--method", expl_method, "shap or lime")
      ->check(CLI::IsMember({"shap", "lime"}));
  explain->add_flag("--per-package", expl_per_package, "also write one record per row");
  explain->add_option("--limit", expl_limit, "explain at most this many rows (0: all)");
  explain->add_option("--out", expl_out, "output directory")->required();

  // pipeline
  DataArgs pipe_data;
  WorkflowArgs pipe_args;
  std::string pipe_out = "edysec-out";
  auto* pipeline = app.add_subcommand("pipeline", "all phases end to end");
  AddDataArgs(pipeline, pipe_data);
  AddSelectArgs(pipeline, pipe_args);
  AddTrainArgs(pipeline, pipe_args);
  pipeline->add_option("--models", pipe_args.models, "candidate models");
  pipeline->add_option("--stability-mode", pipe_args.stability_mode, "selectors or seeds")
      ->check(CLI::IsMember({"selectors", "seeds"}));
  pipeline->add_option("--runs", pipe_args.runs, "runs in seeds mode");
  pipeline->add_option("--resamples", pipe_args.resamples, "bootstrap resamples");
  pipeline->add_option("--explain-method", pipe_args.explain_method, "shap or lime")
      ->check(CLI::IsMember({"shap", "lime"}));
  pipeline->add_option("--background", pipe_args.background, "explanation background rows");
  pipeline->add_option("--explain-limit", pipe_args.explain_limit, "test rows to explain (0: all)");
  pipeline->add_flag("--no-explain", pipe_args.no_explain, "skip explanations");
  pipeline->add_option("--out", pipe_out, "output directory");

  // predict
  std::string pred_artifact, pred_in;
  bool pred_explain = false;
  auto* predict = app.add_subcommand("predict", "verdict for one record");
  predict->add_option("--artifact", pred_artifact, "model.json (default: $EDYSEC_ARTIFACT)");
  predict->add_option("--in", pred_in, "record JSON {package, features, explain}")->required();
  predict->add_flag("--explain", pred_explain, "attach top attributions");

  // serve
  std::string serve_artifact, serve_bind = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "HTTP verdict endpoint");
  serve->add_option("--artifact", serve_artifact, "model.json (default: $EDYSEC_ARTIFACT)");
  serve->add_option("--bind", serve_bind, "host:port");

  // report
  std::string report_in = "edysec-out";
  auto* report = app.add_subcommand("report", "print report tables");
  report->add_option("--in", report_in, "report directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      EnsureDir(synth_out);
      const auto ds = GenerateSynthetic(synth_cfg);
      SaveDataset(ds, (fs::path(synth_out) / "data.csv").string());
      SaveManifest(ds.manifest, (fs::path(synth_out) / "manifest.json").string());
      std::cout << "wrote " << ds.size() << " rows, " << ds.manifest.features.size()
                << " features to " << synth_out << "\n";
    } else if (split->parsed()) {
      const auto ds = LoadData(split_data);
      const SplitRatios ratios{split_ratios[0], split_ratios[1], split_ratios[2]};
      const auto s = SplitDataset(ds, ratios, split_seed, !split_random);
      EnsureDir(split_out);
      SaveDataset(s.train, (fs::path(split_out) / "train.csv").string());
      SaveDataset(s.validation, (fs::path(split_out) / "validation.csv").string());
      SaveDataset(s.test, (fs::path(split_out) / "test.csv").string());
      SaveManifest(ds.manifest, (fs::path(split_out) / "manifest.json").string());
      std::cout << "train " << s.train.size() << ", validation " << s.validation.size()
                << ", test " << s.test.size() << "\n";
    } else if (select->parsed()) {
      const auto ds = LoadData(select_data);
      const PipelineOptions opts = ToOptions(select_args);
      const auto data = Prepare(ds, opts);
      const auto sel = RunSelectors(data, opts);
      WriteTextFile(select_out, DumpJson(SelectionJson(sel, opts.alpha)));
      std::cout << "chosen " << MethodName(sel.chosen.method) << " with "
                << sel.chosen.size() << " features\n";
    } else if (train->parsed()) {
      const auto ds = LoadData(train_data);
      PipelineOptions opts = ToOptions(train_args);
      opts.candidates = {train_model};
      const auto data = Prepare(ds, opts);
      SelectionRecord record{"manual", data.train.features, 0.0, 0.0, opts.alpha,
                             data.train.features.size()};
      if (!train_selection.empty()) {
        const auto s = ReadJson(train_selection);
        record.method = s.at("chosen").get<std::string>();
        record.selected = s.at("selected").get<std::vector<std::string>>();
        for (const auto& r : s.at("selectors")) {
          if (r.at("method") == record.method && r.contains("score")) {
            record.score = r["score"].get<double>();
            record.objective = r["objective"].get<double>();
          }
        }
      } else if (!train_features.empty()) {
        record.selected = SplitList(train_features);
      }
      const auto tr = Project(data.train, record.selected);
      const auto vd = Project(data.validation, record.selected);
      const auto te = Project(data.test, record.selected);
      record.selected = tr.features;
      const auto c = TrainCandidate(train_model, 0, tr, vd, te, opts);
      ModelArtifact a;
      a.preprocessor = data.preprocessor;
      a.selection = record;
      a.model = train_model;
      a.network = c.params;
      a.threshold = opts.threshold;
      a.fingerprint = {opts.seed, opts.ToJson(), DatasetHash(ds)};
      a.background = SampleBackground(tr.x, opts.explain_cfg.background_rows,
                                      DeriveSeed(opts.seed, streams::kExplain));
      EnsureDir(train_out);
      SaveArtifact(a, (fs::path(train_out) / "model.json").string());
      nlohmann::json history = nlohmann::json::array();
      for (const auto& e : c.history.epochs) {
        history.push_back({{"train_loss", e.train_loss},
                           {"train_accuracy", e.train_accuracy},
                           {"val_loss", e.val_loss},
                           {"val_accuracy", e.val_accuracy}});
      }
      WriteTextFile((fs::path(train_out) / "history.json").string(), DumpJson(history));
      nlohmann::json eval = {{"split", "test"},
                             {"threshold", opts.threshold},
                             {"best_model", train_model},
                             {"models", {EvaluationRow(train_model, c.test_confusion, c.test.auc)}}};
      WriteTextFile((fs::path(train_out) / "evaluation.json").string(), DumpJson(eval));
      std::cout << train_model << ": test F1 " << FormatFixed(c.test.f1, 4) << ", accuracy "
                << FormatFixed(c.test.accuracy, 4) << "\n";
    } else if (evaluate->parsed()) {
      const auto a = LoadArtifact(eval_artifact);
      const auto ds = LoadDataset(eval_data, a.preprocessor.manifest);
      const auto pm = Project(a.preprocessor.Transform(ds), a.selection.selected);
      const auto p = PredictProba(a.network, pm.x);
      const auto cm = Confusion(pm.labels, p, a.threshold);
      std::optional<double> auc;
      if (ds.CountLabel(0) > 0 && ds.CountLabel(1) > 0) auc = RocAuc(pm.labels, p);
      nlohmann::json eval = {{"split", eval_data},
                             {"threshold", a.threshold},
                             {"best_model", a.model},
                             {"models", {EvaluationRow(a.model, cm, auc)}}};
      if (eval_out.empty()) {
        PrintJson(eval);
      } else {
        WriteTextFile(eval_out, DumpJson(eval));
      }
    } else if (stability->parsed()) {
      nlohmann::json out;
      StabilityOptions so;
      so.resamples = stab_args.resamples;
      if (!stab_scores.empty()) {
        const auto table = LoadScoreTable(stab_scores);
        so.seed = stab_args.seed;
        out = StabilityJson(StabilityReport(table, so), table, "table", so);
      } else {
        if (stab_data.data.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "stability needs --data or --scores");
        }
        PipelineOptions opts = ToOptions(stab_args);
        opts.explain = false;
        const auto r = RunPipeline(LoadData(stab_data), opts);
        out = StabilityJson(r.stability, r.stability_table, StabilityModeName(opts.stability_mode),
                            opts.stability);
      }
      if (stab_out.empty()) {
        PrintJson(out);
      } else {
        WriteTextFile(stab_out, DumpJson(out));
      }
    } else if (explain->parsed()) {
      const auto a = LoadArtifact(expl_artifact);
      const auto ds = LoadDataset(expl_data, a.preprocessor.manifest);
      const auto pm = Project(a.preprocessor.Transform(ds), a.selection.selected);
      ExplainConfig cfg;
      cfg.seed = DeriveSeed(a.fingerprint.seed, streams::kExplain, 1);
      const auto e = ExplainRows(a.network, pm, a.background, ParseExplainMethod(expl_method), cfg,
                                 expl_limit, a.threshold, a.selection.selected);
      EnsureDir(expl_out);
      if (expl_per_package) {
        WriteTextFile((fs::path(expl_out) / "explanations.json").string(),
                      DumpJson(ExplanationsJson(e.records)));
      }
      WriteTextFile((fs::path(expl_out) / "importance.json").string(),
                    DumpJson(ImportanceJson(e, a.selection.selected)));
      std::cout << "explained " << e.records.size() << " rows\n";
    } else if (pipeline->parsed()) {
      const auto r = RunPipeline(LoadData(pipe_data), ToOptions(pipe_args));
      EmitReports(r, pipe_out);
      std::cout << "selector " << MethodName(r.selection.chosen.method) << " ("
                << r.selection.chosen.size() << " features), model "
                << r.candidates[r.best].name << ", test F1 "
                << FormatFixed(r.candidates[r.best].test.f1, 4) << "\n";
    } else if (predict->parsed()) {
      const auto a = LoadArtifact(pred_artifact.empty() ? DefaultArtifactPath() : pred_artifact);
      auto record = ReadJson(pred_in);
      if (pred_explain && record.is_object()) record["explain"] = true;
      PrintJson(VerdictJson(PredictRecord(a, record)));
    } else if (serve->parsed()) {
      const auto [host, port] = ParseBind(serve_bind);
      VerdictServer server(
          LoadArtifact(serve_artifact.empty() ? DefaultArtifactPath() : serve_artifact));
      const int bound = server.Bind(host, port);
      g_server = &server;
      std::signal(SIGINT, OnSignal);
      std::signal(SIGTERM, OnSignal);
      std::cerr << "serving " << server.fingerprint() << " on " << host << ":" << bound << "\n";
      server.Serve();
      g_server = nullptr;
    } else if (report->parsed()) {
      PrintReport(report_in);
    }
  } catch (const Error& e) {
    std::cerr << "edysec: " << e.what();
    if (e.row()) std::cerr << " (row " << *e.row() << ")";
    std::cerr << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "edysec: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

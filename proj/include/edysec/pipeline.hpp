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

// End-to-end workflow: split, preprocess, select, train, evaluate, stability,
// explain. Also the single-record verdict path and report writers.

#ifndef EDYSEC_PIPELINE_HPP_
#define EDYSEC_PIPELINE_HPP_

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "edysec/artifact.hpp"
#include "edysec/common.hpp"
#include "edysec/dataset.hpp"
#include "edysec/explain.hpp"
#include "edysec/featsel.hpp"
#include "edysec/metrics.hpp"
#include "edysec/neuralnet.hpp"
#include "edysec/preprocess.hpp"
#include "edysec/stability.hpp"
#include "json.hpp"

namespace edysec {

inline const std::vector<std::string>& KnownModels() {
  static const std::vector<std::string> kModels = {"mlp", "nn"};
  return kModels;
}

inline NetworkSpec SpecFor(std::string_view model, std::size_t width) {
  if (model == "mlp") return NetworkSpec::Mlp(width);
  if (model == "nn") return NetworkSpec::Nn(width);
  throw Error(ErrorCode::kInvalidArgument, "unknown model '" + std::string(model) + "'");
}

enum class StabilityMode { kSelectors, kSeeds };

inline std::string_view StabilityModeName(StabilityMode m) {
  return m == StabilityMode::kSelectors ? "selectors" : "seeds";
}

inline StabilityMode ParseStabilityMode(std::string_view name) {
  if (name == "selectors") return StabilityMode::kSelectors;
  if (name == "seeds") return StabilityMode::kSeeds;
  throw Error(ErrorCode::kInvalidArgument, "unknown stability mode '" + std::string(name) + "'");
}

enum class ExplainMethod { kShap, kLime };

inline std::string_view ExplainMethodName(ExplainMethod m) {
  return m == ExplainMethod::kShap ? "shap" : "lime";
}

inline ExplainMethod ParseExplainMethod(std::string_view name) {
  if (name == "shap") return ExplainMethod::kShap;
  if (name == "lime") return ExplainMethod::kLime;
  throw Error(ErrorCode::kInvalidArgument, "unknown explanation method '" + std::string(name) + "'");
}

// Seeds inside nested configs are ignored; every stream derives from `seed`.
struct PipelineOptions {
  std::uint64_t seed = 42;
  SplitRatios ratios;
  bool stratified = true;

  std::vector<SelectorMethod> methods = {SelectorMethod::kAnova, SelectorMethod::kCorr,
                                         SelectorMethod::kImportance, SelectorMethod::kPso,
                                         SelectorMethod::kWoa};
  double alpha = 0.95;
  std::size_t anova_k = 0;  // 0: one third of the source features
  double corr_relevance = 0.1;
  double corr_redundancy = 0.9;
  double importance_fraction = 0.5;
  std::size_t importance_repeats = 5;
  SwarmConfig swarm;
  TrainConfig baseline = TrainConfig::Baseline(0);

  std::vector<std::string> candidates = {"mlp", "nn"};
  TrainConfig train;
  double threshold = kDefaultThreshold;

  StabilityMode stability_mode = StabilityMode::kSelectors;
  std::size_t stability_runs = 10;
  StabilityOptions stability;

  bool explain = true;
  ExplainMethod explain_method = ExplainMethod::kShap;
  ExplainConfig explain_cfg;
  std::size_t explain_limit = 0;  // 0: every test row

  void Validate() const {
    Require(!methods.empty(), "at least one selector must be enabled");
    Require(!candidates.empty(), "at least one candidate model is required");
    for (const auto& c : candidates) SpecFor(c, 1);
    Require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
    Require(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0, 1)");
    Require(stability_runs >= 1, "stability runs must be >= 1");
    Require(explain_cfg.background_rows >= 1, "background must be nonempty");
    swarm.Validate();
    train.Validate();
    baseline.Validate();
  }

  nlohmann::json ToJson() const {
    std::vector<std::string> method_names;
    for (auto m : methods) method_names.emplace_back(MethodName(m));
    auto train_json = [](const TrainConfig& c) {
      nlohmann::json j = {{"epochs", c.epochs},
                          {"batch_size", c.batch_size},
                          {"learning_rate", c.adam.learning_rate},
                          {"beta1", c.adam.beta1},
                          {"beta2", c.adam.beta2},
                          {"epsilon", c.adam.epsilon},
                          {"shuffle", c.shuffle}};
      j["patience"] = c.patience ? nlohmann::json(*c.patience) : nlohmann::json(nullptr);
      return j;
    };
    return {
        {"seed", seed},
        {"ratios", {ratios.train, ratios.validation, ratios.test}},
        {"stratified", stratified},
        {"methods", method_names},
        {"alpha", alpha},
        {"anova_k", anova_k},
        {"corr_relevance", corr_relevance},
        {"corr_redundancy", corr_redundancy},
        {"importance_fraction", importance_fraction},
        {"importance_repeats", importance_repeats},
        {"swarm",
         {{"population", swarm.population},
          {"iterations", swarm.iterations},
          {"inertia_start", swarm.inertia_start},
          {"inertia_end", swarm.inertia_end},
          {"c1", swarm.c1},
          {"c2", swarm.c2},
          {"v_max", swarm.v_max},
          {"spiral_b", swarm.spiral_b}}},
        {"baseline", train_json(baseline)},
        {"candidates", candidates},
        {"train", train_json(train)},
        {"threshold", threshold},
        {"stability",
         {{"mode", std::string(StabilityModeName(stability_mode))},
          {"runs", stability_runs},
          {"level", stability.level},
          {"resamples", stability.resamples}}},
        {"explain",
         {{"enabled", explain},
          {"method", std::string(ExplainMethodName(explain_method))},
          {"background_rows", explain_cfg.background_rows},
          {"shap_budget", explain_cfg.shap_budget ? nlohmann::json(*explain_cfg.shap_budget)
                                                  : nlohmann::json("auto")},
          {"lime_perturbations", explain_cfg.lime_perturbations},
          {"lime_top_k", explain_cfg.lime_top_k},
          {"limit", explain_limit}}}};
  }
};

// Named random streams derived from the master seed.
namespace streams {
inline constexpr std::uint64_t kBaseline = 1;
inline constexpr std::uint64_t kImportance = 2;
inline constexpr std::uint64_t kPso = 3;
inline constexpr std::uint64_t kWoa = 4;
inline constexpr std::uint64_t kTrain = 5;
inline constexpr std::uint64_t kExplain = 6;
inline constexpr std::uint64_t kBootstrap = 7;
inline constexpr std::uint64_t kStabilityRuns = 8;
}  // namespace streams

inline std::string DatasetHash(const TraceDataset& ds) {
  const std::uint64_t h = Fnv1a64(ManifestToJson(ds.manifest).dump());
  return Hex64(Fnv1a64(SerializeDataset(ds), h));
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  double Millis() const { return Seconds() * 1e3; }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::string StripCodePrefix(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(ErrorCodeName(e.code())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

// Runs one phase, prefixing any library error with the phase name.
template <typename F>
auto Phase(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), "phase " + name + ": " + StripCodePrefix(e), e.row(), e.subject());
  }
}

}  // namespace detail

struct PreparedData {
  DatasetSplits splits;
  Preprocessor preprocessor;
  ProcessedMatrix train;
  ProcessedMatrix validation;
  ProcessedMatrix test;
};

inline PreparedData Prepare(const TraceDataset& ds, const PipelineOptions& opts,
                            std::map<std::string, double>* timing = nullptr) {
  PreparedData p;
  detail::Stopwatch split_clock;
  p.splits = detail::Phase("split", [&] {
    return SplitDataset(ds, opts.ratios, opts.seed, opts.stratified);
  });
  if (timing) (*timing)["split"] = split_clock.Seconds();
  detail::Stopwatch prep_clock;
  detail::Phase("preprocess", [&] {
    Require(!p.splits.train.empty() && !p.splits.validation.empty() && !p.splits.test.empty(),
            "every split must be nonempty");
    p.preprocessor = Preprocessor::Fit(p.splits.train);
    p.train = p.preprocessor.Transform(p.splits.train);
    p.validation = p.preprocessor.Transform(p.splits.validation);
    p.test = p.preprocessor.Transform(p.splits.test);
    return 0;
  });
  if (timing) (*timing)["preprocess"] = prep_clock.Seconds();
  return p;
}

struct SelectorOutcome {
  SelectorResult result;
  bool ok = true;
  std::string skipped_reason;
  std::size_t fitness_evaluations = 0;  // swarm selectors only
};

inline TrainConfig BaselineConfig(const PipelineOptions& opts) {
  TrainConfig cfg = opts.baseline;
  cfg.seed = DeriveSeed(opts.seed, streams::kBaseline);
  return cfg;
}

inline std::size_t DefaultAnovaK(std::size_t d) {
  return std::clamp<std::size_t>((d + 1) / 3, 1, d);
}

// Runs one selector on the prepared data; the evaluator supplies P_j.
inline SelectorOutcome RunSelector(SelectorMethod method, const PreparedData& data,
                                   const PipelineOptions& opts, SubsetEvaluator& evaluator) {
  SelectorOutcome out;
  detail::Stopwatch clock;
  const std::size_t d = data.train.features.size();
  try {
    switch (method) {
      case SelectorMethod::kAnova: {
        const std::size_t k = opts.anova_k ? opts.anova_k : DefaultAnovaK(d);
        out.result = SelectAnova(AnovaFScores(data.train), k);
        break;
      }
      case SelectorMethod::kCorr:
        out.result = SelectCorr(data.train, opts.corr_relevance, opts.corr_redundancy);
        break;
      case SelectorMethod::kImportance: {
        Require(data.train.width() > 0, "processed matrix has no columns");
        const auto base = Train(NetworkSpec::Baseline(data.train.width()), BaselineConfig(opts),
                                data.train.x, data.train.labels);
        // Importance learned by the fitted model, so it is measured on the
        // rows it was fitted to.
        const auto importances =
            PermutationImportance(base.params, data.train, opts.importance_repeats,
                                  DeriveSeed(opts.seed, streams::kImportance));
        out.result = SelectImportance(importances, opts.importance_fraction);
        break;
      }
      case SelectorMethod::kPso:
      case SelectorMethod::kWoa: {
        SwarmConfig cfg = opts.swarm;
        cfg.seed = DeriveSeed(opts.seed,
                              method == SelectorMethod::kPso ? streams::kPso : streams::kWoa);
        const MaskFitness fitness = [&](const FeatureMask& m) { return evaluator.Fitness(m); };
        const SwarmResult swarm = method == SelectorMethod::kPso ? SelectBpso(fitness, d, cfg)
                                                                 : SelectBwoa(fitness, d, cfg);
        out.result.method = method;
        out.result.selected = MaskToFeatures(swarm.mask, data.train.features);
        out.fitness_evaluations = swarm.evaluations;
        break;
      }
    }
    out.result.method = method;
    evaluator.Complete(out.result);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyResult) throw;
    out.ok = false;
    out.result.method = method;
    out.result.selected.clear();
    out.skipped_reason = detail::StripCodePrefix(e);
  }
  out.result.wall_seconds = clock.Seconds();
  return out;
}

struct SelectionOutcome {
  std::vector<SelectorOutcome> selectors;
  SelectorResult chosen;
  std::size_t d_total = 0;
};

inline SelectionOutcome RunSelectors(const PreparedData& data, const PipelineOptions& opts) {
  SelectionOutcome out;
  out.d_total = data.train.features.size();
  SubsetEvaluator evaluator(data.train, data.validation, BaselineConfig(opts), opts.alpha);
  std::vector<SelectorResult> usable;
  for (auto method : opts.methods) {
    auto outcome = detail::Phase("select/" + std::string(MethodName(method)), [&] {
      return RunSelector(method, data, opts, evaluator);
    });
    if (outcome.ok) usable.push_back(outcome.result);
    out.selectors.push_back(std::move(outcome));
  }
  if (usable.empty()) {
    throw Error(ErrorCode::kEmptyResult, "phase select: every selector came back empty");
  }
  out.chosen = ChooseSelector(usable);
  return out;
}

struct CandidateOutcome {
  std::string name;
  NetworkParams params;
  TrainHistory history;
  MetricsReport validation;
  MetricsReport test;
  ConfusionMatrix test_confusion;
};

inline CandidateOutcome TrainCandidate(const std::string& name, std::size_t index,
                                       const ProcessedMatrix& train, const ProcessedMatrix& val,
                                       const ProcessedMatrix& test, const PipelineOptions& opts,
                                       std::uint64_t run = 0) {
  CandidateOutcome c;
  c.name = name;
  TrainConfig cfg = opts.train;
  cfg.seed = DeriveSeed(DeriveSeed(opts.seed, streams::kTrain, index), run);
  auto result = Train(SpecFor(name, train.width()), cfg, train.x, train.labels, &val.x, val.labels);
  c.params = std::move(result.params);
  c.history = std::move(result.history);
  c.validation = Evaluate(val.labels, PredictProba(c.params, val.x), opts.threshold);
  const auto test_p = PredictProba(c.params, test.x);
  c.test = Evaluate(test.labels, test_p, opts.threshold);
  c.test_confusion = Confusion(test.labels, test_p, opts.threshold);
  return c;
}

// Best validation accuracy; F1 breaks ties, then candidate order.
inline std::size_t PickBest(const std::vector<CandidateOutcome>& candidates) {
  Require(!candidates.empty(), "no candidates to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& a = candidates[i].validation;
    const auto& b = candidates[best].validation;
    if (a.accuracy > b.accuracy || (a.accuracy == b.accuracy && a.f1 > b.f1)) best = i;
  }
  return best;
}

struct ExplanationRecord {
  std::string package;
  double probability = 0.0;
  std::string verdict;
  Attribution attribution;
};

inline std::string VerdictFor(double probability, double threshold) {
  return probability >= threshold ? "malicious" : "benign";
}

inline BatchModel ModelFunction(const NetworkParams& params) {
  return [&params](const Matrix& x) { return PredictProba(params, x); };
}

inline constexpr double kShapEfficiencyTolerance = 1e-6;

// SHAP with the efficiency identity checked before the record is released.
inline Attribution ExplainRow(const BatchModel& model, std::span<const double> x,
                              const Matrix& background, const FeatureGroups& groups,
                              ExplainMethod method, const ExplainConfig& cfg) {
  if (method == ExplainMethod::kLime) return LimeExplain(model, x, background, groups, cfg);
  Attribution a = groups.size() < 2 ? ExactShapley(model, x, background, groups)
                                    : KernelShap(model, x, background, groups, cfg);
  if (a.method != "kernel_shap_sampled" && !(a.residual <= kShapEfficiencyTolerance)) {
    throw Error(ErrorCode::kSingularSystem,
                "local accuracy violated: residual " + FormatDouble(a.residual));
  }
  return a;
}

struct ExplanationOutcome {
  std::vector<ExplanationRecord> records;
  std::vector<Importance> global;
  std::vector<std::string> ranking;
  Overlap overlap;
};

inline ExplanationOutcome ExplainRows(const NetworkParams& params, const ProcessedMatrix& rows,
                                      const Matrix& background, ExplainMethod method,
                                      const ExplainConfig& cfg, std::size_t limit,
                                      double threshold,
                                      const std::vector<std::string>& selected) {
  ExplanationOutcome out;
  const FeatureGroups groups = GroupsOf(rows);
  const BatchModel model = ModelFunction(params);
  const std::size_t n = limit ? std::min(limit, rows.rows()) : rows.rows();
  const std::vector<double> probs = PredictProba(params, rows.x);
  for (std::size_t i = 0; i < n; ++i) {
    ExplanationRecord rec;
    rec.package = rows.ids.empty() ? std::to_string(i) : rows.ids[i];
    rec.attribution = ExplainRow(model, rows.x.Row(i), background, groups, method, cfg);
    rec.probability = probs[i];
    rec.verdict = VerdictFor(rec.probability, threshold);
    out.records.push_back(std::move(rec));
  }
  if (!out.records.empty()) {
    std::vector<Attribution> all;
    for (const auto& r : out.records) all.push_back(r.attribution);
    out.global = GlobalImportance(all);
    out.ranking = ExplanationRanking(out.global);
    out.overlap = SelectionOverlap(selected, out.ranking);
  }
  return out;
}

struct PipelineResult {
  ModelArtifact artifact;
  SelectionOutcome selection;
  std::vector<CandidateOutcome> candidates;
  std::size_t best = 0;
  ScoreTable stability_table;
  std::vector<StabilityRow> stability;
  ExplanationOutcome explanations;
  std::map<std::string, double> timing;  // seconds per phase
  PipelineOptions options;
};

inline ScoreTable CollectStability(const PreparedData& data, const SelectionOutcome& selection,
                                   const PipelineOptions& opts, const ProcessedMatrix& tr,
                                   const ProcessedMatrix& vd, const ProcessedMatrix& te,
                                   const std::vector<CandidateOutcome>& trained) {
  ScoreTable table;
  table.models = opts.candidates;
  if (opts.stability_mode == StabilityMode::kSelectors) {
    std::vector<const SelectorOutcome*> usable;
    for (const auto& s : selection.selectors) {
      if (s.ok) usable.push_back(&s);
    }
    for (const auto* s : usable) table.configs.emplace_back(MethodName(s->result.method));
    table.scores.assign(opts.candidates.size(), {});
    for (std::size_t m = 0; m < opts.candidates.size(); ++m) {
      for (const auto* s : usable) {
        if (s->result.selected == selection.chosen.selected) {
          table.scores[m].push_back(trained[m].test.f1);
          continue;
        }
        const auto ptr = Project(data.train, s->result.selected);
        const auto pvd = Project(data.validation, s->result.selected);
        const auto pte = Project(data.test, s->result.selected);
        if (ptr.width() == 0) {
          table.scores[m].push_back(0.0);
          continue;
        }
        table.scores[m].push_back(
            TrainCandidate(opts.candidates[m], m, ptr, pvd, pte, opts).test.f1);
      }
    }
  } else {
    for (std::size_t r = 0; r < opts.stability_runs; ++r) {
      table.configs.push_back("seed-" + std::to_string(r));
    }
    table.scores.assign(opts.candidates.size(), {});
    for (std::size_t m = 0; m < opts.candidates.size(); ++m) {
      for (std::size_t r = 0; r < opts.stability_runs; ++r) {
        if (r == 0) {
          table.scores[m].push_back(trained[m].test.f1);
          continue;
        }
        const std::uint64_t run = DeriveSeed(opts.seed, streams::kStabilityRuns, r);
        table.scores[m].push_back(
            TrainCandidate(opts.candidates[m], m, tr, vd, te, opts, run).test.f1);
      }
    }
  }
  return table;
}

inline PipelineResult RunPipeline(const TraceDataset& ds, const PipelineOptions& opts) {
  opts.Validate();
  detail::Stopwatch total;
  PipelineResult result;
  result.options = opts;
  const PreparedData data = Prepare(ds, opts, &result.timing);

  result.selection = RunSelectors(data, opts);
  for (const auto& s : result.selection.selectors) {
    result.timing["select/" + std::string(MethodName(s.result.method))] = s.result.wall_seconds;
  }
  const auto& chosen = result.selection.chosen;
  const ProcessedMatrix tr = Project(data.train, chosen.selected);
  const ProcessedMatrix vd = Project(data.validation, chosen.selected);
  const ProcessedMatrix te = Project(data.test, chosen.selected);

  for (std::size_t m = 0; m < opts.candidates.size(); ++m) {
    detail::Stopwatch clock;
    result.candidates.push_back(detail::Phase("train/" + opts.candidates[m], [&] {
      return TrainCandidate(opts.candidates[m], m, tr, vd, te, opts);
    }));
    result.timing["train/" + opts.candidates[m]] = clock.Seconds();
  }
  result.best = PickBest(result.candidates);
  const CandidateOutcome& best = result.candidates[result.best];

  {
    detail::Stopwatch clock;
    detail::Phase("stability", [&] {
      result.stability_table =
          CollectStability(data, result.selection, opts, tr, vd, te, result.candidates);
      StabilityOptions so = opts.stability;
      so.seed = DeriveSeed(opts.seed, streams::kBootstrap);
      result.stability = StabilityReport(result.stability_table, so);
      return 0;
    });
    result.timing["stability"] = clock.Seconds();
  }

  ModelArtifact& a = result.artifact;
  a.preprocessor = data.preprocessor;
  a.selection = {std::string(MethodName(chosen.method)), chosen.selected, chosen.score,
                 chosen.objective, opts.alpha, result.selection.d_total};
  a.model = best.name;
  a.network = best.params;
  a.threshold = opts.threshold;
  a.fingerprint = {opts.seed, opts.ToJson(), DatasetHash(ds)};
  a.background = SampleBackground(tr.x, opts.explain_cfg.background_rows,
                                  DeriveSeed(opts.seed, streams::kExplain));
  a.Validate();

  if (opts.explain) {
    detail::Stopwatch clock;
    ExplainConfig cfg = opts.explain_cfg;
    cfg.seed = DeriveSeed(opts.seed, streams::kExplain, 1);
    result.explanations = detail::Phase("explain", [&] {
      return ExplainRows(a.network, te, a.background, opts.explain_method, cfg,
                         opts.explain_limit, opts.threshold, chosen.selected);
    });
    result.timing["explain"] = clock.Seconds();
  }
  result.timing["total"] = total.Seconds();
  return result;
}

// ---------------------------------------------------------------------------
// Single-record verdicts.

struct VerdictReport {
  std::string package;
  double probability = 0.0;
  std::string verdict;
  double threshold = kDefaultThreshold;
  std::optional<Attribution> attribution;
  std::vector<std::pair<std::string, double>> top;  // top attributions by |phi|
  double latency_ms = 0.0;
  double preprocess_ms = 0.0;
  double project_ms = 0.0;
  double forward_ms = 0.0;
  double explain_ms = 0.0;
};

inline constexpr std::size_t kVerdictTopK = 5;

// Converts a {column: value} object to manifest-aligned cells. Numeric columns
// accept numbers or numeric strings; text columns need strings.
inline std::vector<Cell> CellsFromJson(const FeatureManifest& manifest,
                                       const nlohmann::json& features) {
  if (!features.is_object()) {
    throw Error(ErrorCode::kMalformedRequest, "\"features\" must be an object");
  }
  std::vector<Cell> cells;
  cells.reserve(manifest.features.size());
  for (const auto& col : manifest.features) {
    auto it = features.find(col.name);
    if (it == features.end()) {
      throw Error(ErrorCode::kMissingFeature, "record lacks feature '" + col.name + "'",
                  std::nullopt, col.name);
    }
    if (col.kind == FeatureKind::kNumeric) {
      std::optional<double> v;
      if (it->is_number()) {
        v = it->get<double>();
        if (!std::isfinite(*v)) v.reset();
      } else if (it->is_string()) {
        v = ParseFiniteDouble(it->get<std::string>());
      }
      if (!v) {
        throw Error(ErrorCode::kBadNumeric, "feature '" + col.name + "' is not a finite number",
                    std::nullopt, col.name);
      }
      cells.emplace_back(*v);
    } else {
      if (!it->is_string()) {
        throw Error(ErrorCode::kMalformedRequest, "feature '" + col.name + "' must be a string",
                    std::nullopt, col.name);
      }
      cells.emplace_back(it->get<std::string>());
    }
  }
  return cells;
}

inline VerdictReport PredictPackage(const ModelArtifact& artifact, const std::string& package,
                                    const std::vector<Cell>& cells, bool explain) {
  detail::Stopwatch total;
  VerdictReport v;
  v.package = package;
  v.threshold = artifact.threshold;

  detail::Stopwatch step;
  const std::vector<double> full = artifact.preprocessor.TransformCells(cells);
  v.preprocess_ms = step.Millis();

  step = detail::Stopwatch();
  const auto cols = artifact.SelectedColumns();
  Matrix row(1, cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) row.data[k] = full[cols[k]];
  v.project_ms = step.Millis();

  step = detail::Stopwatch();
  v.probability = PredictProba(artifact.network, row).front();
  v.verdict = VerdictFor(v.probability, artifact.threshold);
  v.forward_ms = step.Millis();

  if (explain) {
    step = detail::Stopwatch();
    if (artifact.background.rows == 0) {
      throw Error(ErrorCode::kStateMissing, "artifact carries no explanation background");
    }
    ExplainConfig cfg;
    cfg.seed = DeriveSeed(artifact.fingerprint.seed, streams::kExplain, 2);
    v.attribution = ExplainRow(ModelFunction(artifact.network), row.data, artifact.background,
                               artifact.Groups(), ExplainMethod::kShap, cfg);
    v.top = OrderedContributions(*v.attribution, kVerdictTopK);
    v.explain_ms = step.Millis();
  }
  v.latency_ms = total.Millis();
  return v;
}

inline VerdictReport PredictRecord(const ModelArtifact& artifact, const nlohmann::json& record) {
  if (!record.is_object()) throw Error(ErrorCode::kMalformedRequest, "record must be an object");
  if (!record.contains("features")) {
    throw Error(ErrorCode::kMalformedRequest, "record lacks \"features\"");
  }
  std::string package = "unknown";
  if (record.contains("package")) {
    if (!record["package"].is_string()) {
      throw Error(ErrorCode::kMalformedRequest, "\"package\" must be a string");
    }
    package = record["package"].get<std::string>();
  }
  bool explain = false;
  if (record.contains("explain")) {
    if (!record["explain"].is_boolean()) {
      throw Error(ErrorCode::kMalformedRequest, "\"explain\" must be a boolean");
    }
    explain = record["explain"].get<bool>();
  }
  return PredictPackage(artifact, package,
                        CellsFromJson(artifact.preprocessor.manifest, record["features"]), explain);
}

// ---------------------------------------------------------------------------
// Structured reports. Full-precision fields sit next to display strings that
// follow the rounding of the published tables.

inline nlohmann::json AttributionJson(const Attribution& a) {
  nlohmann::json contributions = nlohmann::json::array();
  for (const auto& [feature, phi] : OrderedContributions(a)) {
    contributions.push_back({{"feature", feature}, {"phi", phi}});
  }
  return {{"method", a.method},
          {"base", a.base},
          {"fx", a.fx},
          {"residual", a.residual},
          {"contributions", std::move(contributions)}};
}

inline nlohmann::json VerdictJson(const VerdictReport& v) {
  nlohmann::json j = {{"package", v.package},
                      {"probability", v.probability},
                      {"verdict", v.verdict},
                      {"threshold", v.threshold},
                      {"latency_ms", v.latency_ms},
                      {"phases_ms",
                       {{"preprocess", v.preprocess_ms},
                        {"project", v.project_ms},
                        {"forward", v.forward_ms},
                        {"explain", v.explain_ms}}}};
  nlohmann::json top = nlohmann::json::array();
  for (const auto& [feature, phi] : v.top) top.push_back({{"feature", feature}, {"phi", phi}});
  j["attributions"] = std::move(top);
  if (v.attribution) {
    j["base"] = v.attribution->base;
    j["fx"] = v.attribution->fx;
  }
  return j;
}

// One evaluation row: full-precision metrics, counts and table-style display.
inline nlohmann::json EvaluationRow(const std::string& model, const ConfusionMatrix& cm,
                                    std::optional<double> auc = std::nullopt) {
  const MetricsReport m = ClassificationMetrics(cm);
  nlohmann::json row = {{"model", model},
                        {"tp", cm.tp},
                        {"tn", cm.tn},
                        {"fp", cm.fp},
                        {"fn", cm.fn},
                        {"accuracy", m.accuracy},
                        {"precision", m.precision},
                        {"recall", m.recall},
                        {"f1", m.f1},
                        {"fpr", m.fpr},
                        {"fnr", m.fnr},
                        {"error_rate", m.error_rate}};
  nlohmann::json display = {{"F1", FormatFixed(m.f1, 2)},
                            {"FPR%", FormatFixed(100.0 * m.fpr, 2)},
                            {"FNR%", FormatFixed(100.0 * m.fnr, 2)}};
  if (auc) {
    row["auc"] = *auc;
    display["AUC"] = FormatFixed(*auc, 2);
  } else {
    row["auc"] = nullptr;
  }
  row["display"] = std::move(display);
  return row;
}

inline nlohmann::json StabilityJson(const std::vector<StabilityRow>& rows,
                                    const ScoreTable& table, std::string_view mode,
                                    const StabilityOptions& opts) {
  nlohmann::json out_rows = nlohmann::json::array();
  for (const auto& r : rows) {
    out_rows.push_back(
        {{"model", r.model},
         {"mean", r.mean},
         {"std", r.stddev},
         {"avg_rank", r.avg_rank},
         {"ci_low", r.ci_low},
         {"ci_high", r.ci_high},
         {"stability", r.stability},
         {"display",
          {{"Mean F1", FormatFixed(r.mean, 3)},
           {"Std", FormatFixed(r.stddev, 3)},
           {"Avg Rank", FormatFixed(r.avg_rank, 1)},
           {"95% CI",
            "[" + FormatFixed(r.ci_low, 3) + ", " + FormatFixed(r.ci_high, 3) + "]"},
           {"Stability", FormatFixed(r.stability, 3)}}}});
  }
  nlohmann::json scores = nlohmann::json::object();
  for (std::size_t m = 0; m < table.models.size(); ++m) scores[table.models[m]] = table.scores[m];
  return {{"mode", std::string(mode)},
          {"std_convention", "sample (n-1)"},
          {"interval", "percentile bootstrap of the mean"},
          {"level", opts.level},
          {"resamples", opts.resamples},
          {"configs", table.configs},
          {"scores", std::move(scores)},
          {"rows", std::move(out_rows)}};
}

inline nlohmann::json ExplanationsJson(const std::vector<ExplanationRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j = AttributionJson(r.attribution);
    j["package"] = r.package;
    j["probability"] = r.probability;
    j["verdict"] = r.verdict;
    out.push_back(std::move(j));
  }
  return out;
}

inline nlohmann::json ImportanceJson(const ExplanationOutcome& e,
                                     const std::vector<std::string>& selected) {
  nlohmann::json global = nlohmann::json::array();
  for (const auto& i : e.global) global.push_back({{"feature", i.feature}, {"importance", i.value}});
  return {{"global", std::move(global)},
          {"ranking", e.ranking},
          {"selected", selected},
          {"overlap",
           {{"k", selected.size()}, {"common", e.overlap.common}, {"jaccard", e.overlap.jaccard}}}};
}

inline nlohmann::json SelectionJson(const SelectionOutcome& s, double alpha) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& o : s.selectors) {
    nlohmann::json j = {{"method", std::string(MethodName(o.result.method))},
                        {"status", o.ok ? "ok" : "skipped"}};
    if (o.ok) {
      j["selected"] = o.result.selected;
      j["d"] = o.result.size();
      j["score"] = o.result.score;
      j["objective"] = o.result.objective;
      j["reduction"] = 1.0 - static_cast<double>(o.result.size()) / static_cast<double>(s.d_total);
      j["display"] = {{"P", FormatFixed(o.result.score, 2)},
                      {"J", FormatFixed(o.result.objective, 6)},
                      {"reduction%", FormatFixed(100.0 * j["reduction"].get<double>(), 2)}};
    } else {
      j["reason"] = o.skipped_reason;
    }
    if (o.fitness_evaluations) j["fitness_evaluations"] = o.fitness_evaluations;
    list.push_back(std::move(j));
  }
  return {{"alpha", alpha},
          {"d_total", s.d_total},
          {"chosen", std::string(MethodName(s.chosen.method))},
          {"selected", s.chosen.selected},
          {"selectors", std::move(list)}};
}

inline nlohmann::json EvaluationJson(const PipelineResult& r) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& c : r.candidates) {
    nlohmann::json row = EvaluationRow(c.name, c.test_confusion, c.test.auc);
    row["params"] = ParamCount(c.params.spec);
    row["validation"] = {{"accuracy", c.validation.accuracy}, {"f1", c.validation.f1}};
    models.push_back(std::move(row));
  }
  return {{"split", "test"},
          {"threshold", r.options.threshold},
          {"best_model", r.candidates[r.best].name},
          {"models", std::move(models)}};
}

inline std::string DumpJson(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// Writes model.json plus the reports into `dir`. Wall-clock figures go only
// to timing.json so every other file is a pure function of the inputs.
inline void EmitReports(const PipelineResult& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kWriteFailure, "cannot create " + dir + ": " + ec.message());
  const std::filesystem::path root(dir);
  SaveArtifact(r.artifact, (root / "model.json").string());
  WriteTextFile((root / "selection.json").string(),
                DumpJson(SelectionJson(r.selection, r.options.alpha)));
  WriteTextFile((root / "evaluation.json").string(), DumpJson(EvaluationJson(r)));
  WriteTextFile((root / "stability.json").string(),
                DumpJson(StabilityJson(r.stability, r.stability_table,
                                       StabilityModeName(r.options.stability_mode),
                                       r.options.stability)));
  WriteTextFile((root / "explanations.json").string(),
                DumpJson(ExplanationsJson(r.explanations.records)));
  WriteTextFile((root / "importance.json").string(),
                DumpJson(ImportanceJson(r.explanations, r.selection.chosen.selected)));
  nlohmann::json timing = r.timing;
  WriteTextFile((root / "timing.json").string(), DumpJson(timing));
}

}  // namespace edysec

#endif  // EDYSEC_PIPELINE_HPP_

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


// Train on a planted-signal dataset, then score one package.
//   ./edysec_quickstart [out_dir]

#include <iostream>

#include "edysec/dataset.hpp"
#include "edysec/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace edysec;
  SyntheticConfig data_cfg;
  data_cfg.rows = 600;
  const TraceDataset ds = GenerateSynthetic(data_cfg);

  // Small budget so this finishes in well under a minute.
  PipelineOptions opts;
  opts.swarm.population = 6;
  opts.swarm.iterations = 5;
  opts.train.epochs = 15;
  opts.stability.resamples = 2000;
  opts.explain_limit = 5;
  opts.explain_cfg.background_rows = 20;

  const PipelineResult r = RunPipeline(ds, opts);
  const auto& best = r.candidates[r.best];
  std::cout << "selector " << MethodName(r.selection.chosen.method) << " kept "
            << r.selection.chosen.size() << " of " << ds.manifest.features.size() << " features\n"
            << "model " << best.name << " test F1 " << FormatFixed(best.test.f1, 4) << "\n";

  const TraceRow& row = ds.rows.front();
  const VerdictReport v = PredictPackage(r.artifact, row.id, row.cells, true);
  std::cout << VerdictJson(v).dump(2) << "\n";

  if (argc > 1) EmitReports(r, argv[1]);
  return 0;
}

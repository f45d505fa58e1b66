/*
Copyright 2026 The dtvsfm Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/


// Serial reference vs OpenMP kernels on a synthetic VGA-scale scene.

#include <benchmark/benchmark.h>

#include "dtvsfm/geometry.hpp"
#include "dtvsfm/refine.hpp"
#include "dtvsfm/synth.hpp"
#include "dtvsfm/uncertainty.hpp"
#include "dtvsfm/wba.hpp"

namespace dtvsfm {
namespace {

struct Fixture {
  SyntheticScene scene;
  RenderedFlow flow;
  WeightMap w_fwd, w_bwd;
  WbaState state;

  Fixture() {
    SceneConfig sc;
    sc.width = 640;
    sc.height = 480;
    sc.rng_seed = 1;
    sc.pose.translation = 1.0;
    scene = generate_scene(sc);
    CorruptionConfig cc;
    cc.noise_sigma = 1.0;
    cc.outlier_rate = 0.2;
    flow = render_flow(scene, cc);
    w_fwd = WeightMap(640, 480, 1.0);
    w_bwd = WeightMap(640, 480, 1.0);
    state.pose = scene.gt_pose;
    state.inv_depth_r = DepthMap(640, 480, 0.25);
    state.inv_depth_s = DepthMap(640, 480, 0.25);
  }

  WbaInputs inputs() const {
    return WbaInputs{scene.camera, &flow.fwd, &w_fwd, &flow.bwd, &w_bwd};
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_InducedFlowRef(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) {
    benchmark::DoNotOptimize(induced_flow_ref(f.scene.gt_pose, f.scene.gt_depth_r, f.scene.camera));
  }
}
void BM_InducedFlow(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) {
    benchmark::DoNotOptimize(induced_flow(f.scene.gt_pose, f.scene.gt_depth_r, f.scene.camera));
  }
}

void BM_LinearizeRef(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(linearize_ref(f.state, f.inputs()));
}
void BM_Linearize(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(linearize(f.state, f.inputs()));
}

void BM_EvaluateCostRef(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_cost_ref(f.state, f.inputs()));
}
void BM_EvaluateCost(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_cost(f.state, f.inputs()));
}

void BM_RefineWeightsRef(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) {
    benchmark::DoNotOptimize(refine_weights_ref(f.flow.fwd, f.flow.clean_fwd, f.w_fwd, 2.0));
  }
}
void BM_RefineWeights(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) {
    benchmark::DoNotOptimize(refine_weights(f.flow.fwd, f.flow.clean_fwd, f.w_fwd, 2.0));
  }
}

void BM_GridFilterRef(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(local_grid_filter_ref(f.flow.conf_fwd, 4, 0.5));
}
void BM_GridFilter(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(local_grid_filter(f.flow.conf_fwd, 4, 0.5));
}

BENCHMARK(BM_InducedFlowRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InducedFlow)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LinearizeRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Linearize)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateCostRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateCost)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RefineWeightsRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RefineWeights)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridFilterRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridFilter)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace dtvsfm

BENCHMARK_MAIN();

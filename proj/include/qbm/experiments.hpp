// Copyright 2026 The qbm Authors
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

// Experiment harness: multi-seed training batches, curve aggregation, and
// CSV / JSON / SVG emission.
//
// Output files for a batch labelled L:
//   L_mse.csv   iteration,mse_mean,mse_std,mse_mavg,mse_min
//   L_top5.csv  state,mean_prob,std_prob (descending mean_prob)
//   L.json      both tables plus batch metadata
//   L_mse.svg   mean curve with a +-1 std band, moving average, min-so-far
// Runtimes are never written, so a (spec, master seed) pair always yields
// the same bytes.

#pragma once

#include "qbm/classical_bm.hpp"
#include "qbm/qaoa.hpp"
#include "qbm/store.hpp"
#include "qbm/target.hpp"
#include "qbm/train.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbm::experiments {

using qsim::NoiseModel;
using train::TrainConfig;

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { convergence, noise, image, generate };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::convergence;
  int runs = 20;
  int layers = 1;
  std::vector<NoiseModel> noise_levels;  // noise: one batch per level; image: one group per level
  std::vector<std::int64_t> shots;       // image: generation shot sweep
  std::int64_t eval_shots = 0;           // top-5 from exact probabilities when 0
  TrainConfig train;
  std::filesystem::path out_dir = "out";
  std::uint64_t master_seed = 0;
  int window = 10;
  std::string target_bits = "1001";
  std::string grid_path;  // image only
  bool dry_run = false;   // image only: report the block plan, write nothing

  void validate() const;
};

/// Seed of run k: the (k+1)-th output of a splitmix64 stream started at
/// `master`. Distinct runs get decorrelated seeds; the same (master, k)
/// always gives the same seed.
std::uint64_t run_seed(std::uint64_t master, std::uint64_t k);

/// Overrides TrainConfig fields from a JSON object. Recognised keys:
/// eta2, eta3, inner_max_steps, outer_max_steps, global_max_iters,
/// inner_tol, outer_tol, loss_target, shots, gradient, epsilon,
/// angle_init, coupling_init. Unknown keys are an error.
void apply_overrides(TrainConfig& cfg, const std::string& json_text);

struct CurveSeries {
  std::vector<double> mean;
  std::vector<double> std;  // population standard deviation across runs
  std::vector<double> mavg;  // trailing moving average of `mean`
  std::vector<double> min;   // running minimum of `mean`
};

/// Per-iteration statistics over runs. Shorter traces are padded by
/// repeating their final value.
CurveSeries aggregate(const std::vector<std::vector<double>>& traces, int window);

struct StateStat {
  std::string state;
  double mean_prob = 0.0;
  double std_prob = 0.0;
};

/// The `k` states with the largest mean probability, descending; ties go
/// to the lower basis index.
std::vector<StateStat> top_states(const std::vector<Eigen::VectorXd>& probs, int n_qubits, int k = 5);

struct RunSummary {
  std::string label;
  int layers = 1;
  NoiseModel noise{};
  std::string target_bits;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> traces;  // raw <H2> per run
  std::vector<Eigen::VectorXd> final_probs;  // per run
  std::vector<train::TrainResult> results;
  CurveSeries curves;
  std::vector<StateStat> top5;
  int target_top_runs = 0;  // runs whose most likely state is the target

  double target_mean() const;
};

/// Trains `runs` seeded circuits towards the one-point target.
RunSummary run_batch(const std::string& label, const std::string& target_bits, int layers,
                     const TrainConfig& cfg, const NoiseModel& noise, int runs, std::uint64_t master_seed,
                     int window, std::int64_t eval_shots = 0);

/// Writes the four files for `summary` into `dir`.
void emit(const RunSummary& summary, const std::filesystem::path& dir);

RunSummary run_convergence(const ExperimentSpec& spec);
std::vector<RunSummary> run_noise(const ExperimentSpec& spec);

struct ImageGroup {
  std::string label;
  NoiseModel noise{};
  std::vector<store::ParamRecord> records;             // one per block, plan order
  std::map<std::int64_t, target::GridImage> rebuilt;   // shots -> reconstruction
  std::map<std::int64_t, int> matching_cells;          // shots -> cells equal to the target
  std::filesystem::path archive_dir;
};

struct ImageReport {
  target::GridImage target;
  target::BlockPlan plan;
  std::vector<ImageGroup> groups;
};

/// Trains one kernel per block and noise group, archives the records, and
/// rebuilds the grid from the modal outcome of each block for every shot
/// count. With `dry_run` only the plan is returned.
ImageReport run_image(const ExperimentSpec& spec);

struct GenerateReport {
  std::vector<std::int64_t> counts;
  std::string modal_state;
};

/// Samples a stored circuit.
GenerateReport run_generate(const store::ParamRecord& record, std::int64_t shots, std::uint64_t seed);

struct ClassicalSummary {
  std::vector<std::vector<double>> kl_traces;
  std::vector<bool> halved;  // final KL <= initial KL / 2
  CurveSeries curves;
};

/// Classical CD baseline on the one-point target, `runs` seeds.
ClassicalSummary run_classical_baseline(const std::string& target_bits, const classical::ClassicalTrainConfig& cfg,
                                        int runs, std::uint64_t master_seed, int window);
void emit_classical(const ClassicalSummary& summary, const std::filesystem::path& dir);

/// Label used for a noise level, e.g. "noise_p1_0.005_0.02".
std::string noise_label(int layers, const NoiseModel& noise);

/// Fixed-format number used in every emitted file.
std::string format_number(double v);

}  // namespace qbm::experiments

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

// qbm: command-line entry point for the experiments.

#include "qbm/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using qbm::experiments::ExperimentKind;
using qbm::experiments::ExperimentSpec;
using qbm::qsim::NoiseModel;

struct CommonFlags {
  int runs = 20;
  int layers = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string config;
  int window = 10;
  std::string target = "1001";
  std::vector<double> p1;
  std::vector<double> p2;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--runs", f.runs, "independent seeded runs")->capture_default_str();
  cmd->add_option("-p,--layers", f.layers, "QAOA layers")->capture_default_str();
  cmd->add_option("--seed", f.seed, "master seed")->capture_default_str();
  cmd->add_option("--out-dir", f.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--config", f.config, "JSON file overriding training defaults");
  cmd->add_option("--window", f.window, "moving-average window")->capture_default_str();
  cmd->add_option("--target", f.target, "target bitstring")->capture_default_str();
  cmd->add_option("--p1", f.p1, "single-qubit depolarizing probability (repeatable, paired with --p2)");
  cmd->add_option("--p2", f.p2, "two-qubit depolarizing probability (repeatable, paired with --p1)");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentSpec make_spec(ExperimentKind kind, const CommonFlags& f) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.runs = f.runs;
  spec.layers = f.layers;
  spec.master_seed = f.seed;
  spec.out_dir = f.out_dir;
  spec.window = f.window;
  spec.target_bits = f.target;
  if (f.p1.size() != f.p2.size()) throw std::runtime_error("--p1 and --p2 must be given the same number of times");
  for (std::size_t i = 0; i < f.p1.size(); ++i) spec.noise_levels.push_back({f.p1[i], f.p2[i]});
  if (!f.config.empty()) qbm::experiments::apply_overrides(spec.train, slurp(f.config));
  return spec;
}

void print_summary(const qbm::experiments::RunSummary& s) {
  std::cout << s.label << ": mean P(" << s.target_bits << ") = " << qbm::experiments::format_number(s.target_mean())
            << ", top-ranked in " << s.target_top_runs << "/" << s.results.size() << " runs\n";
  for (const auto& st : s.top5) {
    std::cout << "  " << st.state << "  " << qbm::experiments::format_number(st.mean_prob) << " +- "
              << qbm::experiments::format_number(st.std_prob) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Boltzmann machine experiments"};
  app.require_subcommand(1);

  CommonFlags conv_flags;
  std::int64_t conv_eval_shots = 0;
  auto* conv = app.add_subcommand("convergence", "noiseless training batch towards a one-point target");
  add_common(conv, conv_flags);
  conv->add_option("--shots", conv_eval_shots, "rank final states from this many shots (0 = exact)");

  CommonFlags noise_flags;
  std::int64_t noise_eval_shots = 0;
  auto* noise = app.add_subcommand("noise", "training batches under depolarizing noise");
  add_common(noise, noise_flags);
  noise->add_option("--shots", noise_eval_shots, "rank final states from this many shots (0 = exact)");

  CommonFlags image_flags;
  std::vector<std::int64_t> image_shots;
  std::string grid = QBM_DEFAULT_GRID;
  bool dry_run = false;
  auto* image = app.add_subcommand("image", "block-wise training and reconstruction of a grid image");
  add_common(image, image_flags);
  image->add_option("--shots", image_shots, "generation shot counts (repeatable)");
  image->add_option("--grid", grid, "8x20 grid file")->capture_default_str();
  image->add_flag("--dry-run", dry_run, "print the block plan and write nothing");

  std::string params_file;
  std::int64_t gen_shots = 10;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("generate", "sample a stored circuit");
  gen->add_option("--params", params_file, "parameter record (JSON)")->required();
  gen->add_option("--shots", gen_shots, "measurement shots")->capture_default_str();
  gen->add_option("--seed", gen_seed, "sampling seed")->capture_default_str();

  int cl_runs = 20;
  std::uint64_t cl_seed = 0;
  std::string cl_out = "out";
  std::string cl_target = "1001";
  int cl_window = 10;
  qbm::classical::ClassicalTrainConfig cl_cfg;
  auto* cl = app.add_subcommand("classical-baseline", "contrastive-divergence training of a classical machine");
  cl->add_option("--runs", cl_runs, "independent seeded runs")->capture_default_str();
  cl->add_option("--seed", cl_seed, "master seed")->capture_default_str();
  cl->add_option("--out-dir", cl_out, "output directory")->capture_default_str();
  cl->add_option("--target", cl_target, "target bitstring")->capture_default_str();
  cl->add_option("--window", cl_window, "moving-average window")->capture_default_str();
  cl->add_option("--eta1", cl_cfg.eta1, "learning rate")->capture_default_str();
  cl->add_option("--sweeps", cl_cfg.sweeps, "Gibbs sweeps after the positive phase")->capture_default_str();
  cl->add_option("--epochs", cl_cfg.max_epochs, "training epochs")->capture_default_str();
  cl->add_option("--moment-samples", cl_cfg.moment_samples, "Gibbs samples per model-moment estimate")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      ExperimentSpec spec = make_spec(ExperimentKind::convergence, conv_flags);
      spec.eval_shots = conv_eval_shots;
      print_summary(qbm::experiments::run_convergence(spec));
    } else if (noise->parsed()) {
      ExperimentSpec spec = make_spec(ExperimentKind::noise, noise_flags);
      spec.eval_shots = noise_eval_shots;
      if (spec.noise_levels.empty()) spec.noise_levels = {NoiseModel{0.005, 0.02}, NoiseModel{0.01, 0.04}};
      for (const auto& s : qbm::experiments::run_noise(spec)) print_summary(s);
    } else if (image->parsed()) {
      ExperimentSpec spec = make_spec(ExperimentKind::image, image_flags);
      spec.shots = image_shots;
      spec.grid_path = grid;
      spec.dry_run = dry_run;
      const auto report = qbm::experiments::run_image(spec);
      if (dry_run) {
        std::cout << qbm::target::render_grid(report.target);
        for (std::size_t k = 0; k < report.plan.size(); ++k) {
          const auto& b = report.plan[k];
          std::cout << "block " << k << " at (" << b.row << "," << b.col << "): " << b.bits << "\n";
        }
      }
      for (const auto& g : report.groups) {
        for (const auto& [shots, matching] : g.matching_cells) {
          std::cout << g.label << ", " << shots << " shots: " << matching << "/"
                    << qbm::target::kGridRows * qbm::target::kGridCols << " cells match\n";
        }
      }
    } else if (gen->parsed()) {
      const auto record = qbm::store::load(params_file);
      const auto report = qbm::experiments::run_generate(record, gen_shots, gen_seed);
      for (std::size_t i = 0; i < report.counts.size(); ++i) {
        if (report.counts[i] == 0) continue;
        std::cout << qbm::ising::index_to_bitstring(i, record.n_qubits) << " " << report.counts[i] << "\n";
      }
      std::cout << "modal " << report.modal_state << "\n";
    } else if (cl->parsed()) {
      cl_cfg.validate();
      const auto summary = qbm::experiments::run_classical_baseline(cl_target, cl_cfg, cl_runs, cl_seed, cl_window);
      qbm::experiments::emit_classical(summary, cl_out);
      const auto halved = std::count(summary.halved.begin(), summary.halved.end(), true);
      std::cout << "KL halved in " << halved << "/" << summary.halved.size() << " runs\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "qbm: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

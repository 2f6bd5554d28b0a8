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

#include "qbm/experiments.hpp"

#include "qbm/svg.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

namespace qbm::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Runs body(k) for k in [0, count) on up to hardware_concurrency threads.
// Each k writes only its own slot, so results do not depend on scheduling.
template <typename Body>
void parallel_for(int count, Body body) {
  const int workers = std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ExperimentError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw ExperimentError("write failed for " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ExperimentError("cannot create " + dir.string() + ": " + ec.message());
}

json curves_json(const CurveSeries& c) {
  json rows = json::array();
  for (std::size_t t = 0; t < c.mean.size(); ++t) {
    rows.push_back({{"iteration", t}, {"mse_mean", c.mean[t]}, {"mse_std", c.std[t]}, {"mse_mavg", c.mavg[t]},
                    {"mse_min", c.min[t]}});
  }
  return rows;
}

std::string curves_csv(const CurveSeries& c) {
  std::string out = "iteration,mse_mean,mse_std,mse_mavg,mse_min\n";
  for (std::size_t t = 0; t < c.mean.size(); ++t) {
    out += std::to_string(t) + "," + format_number(c.mean[t]) + "," + format_number(c.std[t]) + "," +
           format_number(c.mavg[t]) + "," + format_number(c.min[t]) + "\n";
  }
  return out;
}

json noise_json(const NoiseModel& n) { return {{"p1", n.p1}, {"p2", n.p2}}; }

std::vector<NoiseModel> image_levels(const ExperimentSpec& spec) {
  if (!spec.noise_levels.empty()) return spec.noise_levels;
  return {NoiseModel{}, NoiseModel{0.005, 0.02}};
}

std::vector<std::int64_t> image_shots(const ExperimentSpec& spec) {
  if (!spec.shots.empty()) return spec.shots;
  return {1, 3, 10, 100};
}

std::string image_group_label(const NoiseModel& n) {
  if (n.p1 == 0.0 && n.p2 == 0.0) return "noiseless";
  return "noise_" + format_number(n.p1) + "_" + format_number(n.p2);
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::convergence:
      return "convergence";
    case ExperimentKind::noise:
      return "noise";
    case ExperimentKind::image:
      return "image";
    case ExperimentKind::generate:
      return "generate";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "convergence") return ExperimentKind::convergence;
  if (s == "noise") return ExperimentKind::noise;
  if (s == "image") return ExperimentKind::image;
  if (s == "generate") return ExperimentKind::generate;
  throw ExperimentError("unknown experiment kind '" + s + "'");
}

void ExperimentSpec::validate() const {
  if (runs < 1) throw ExperimentError("runs must be at least 1");
  if (layers < 1) throw ExperimentError("p must be at least 1");
  if (window < 1) throw ExperimentError("moving-average window must be at least 1");
  if (eval_shots < 0) throw ExperimentError("shot count must be nonnegative");
  for (const auto& n : noise_levels) n.validate();
  for (auto s : shots) {
    if (s < 1) throw ExperimentError("generation shot counts must be positive");
  }
  if (kind == ExperimentKind::noise && noise_levels.empty()) throw ExperimentError("noise experiment needs a noise level");
  train.validate();
}

std::uint64_t run_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t state = master;
  std::uint64_t out = 0;
  for (std::uint64_t i = 0; i <= k; ++i) out = splitmix64(state);
  return out;
}

void apply_overrides(TrainConfig& cfg, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ExperimentError(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw ExperimentError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "eta2") cfg.eta2 = value.get<double>();
      else if (key == "eta3") cfg.eta3 = value.get<double>();
      else if (key == "inner_max_steps") cfg.inner_max_steps = value.get<int>();
      else if (key == "outer_max_steps") cfg.outer_max_steps = value.get<int>();
      else if (key == "global_max_iters") cfg.global_max_iters = value.get<int>();
      else if (key == "inner_tol") cfg.inner_tol = value.get<double>();
      else if (key == "outer_tol") cfg.outer_tol = value.get<double>();
      else if (key == "loss_target") cfg.loss_target = value.get<double>();
      else if (key == "shots") cfg.shots = value.get<std::int64_t>();
      else if (key == "gradient") cfg.gradient.method = train::gradient_method_from_string(value.get<std::string>());
      else if (key == "epsilon") cfg.gradient.epsilon = value.get<double>();
      else if (key == "angle_init") cfg.angle_init = value.get<double>();
      else if (key == "coupling_init") cfg.coupling_init = value.get<double>();
      else throw ExperimentError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ExperimentError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ExperimentError(e.what());
  }
  cfg.validate();
}

CurveSeries aggregate(const std::vector<std::vector<double>>& traces, int window) {
  if (traces.empty()) throw ExperimentError("cannot aggregate zero traces");
  if (window < 1) throw ExperimentError("moving-average window must be at least 1");
  std::size_t len = 0;
  for (const auto& t : traces) {
    if (t.empty()) throw ExperimentError("cannot aggregate an empty trace");
    len = std::max(len, t.size());
  }
  const auto runs = static_cast<double>(traces.size());
  CurveSeries c;
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& t : traces) sum += t[std::min(i, t.size() - 1)];
    const double mean = sum / runs;
    double var = 0.0;
    for (const auto& t : traces) {
      const double d = t[std::min(i, t.size() - 1)] - mean;
      var += d * d;
    }
    c.mean.push_back(mean);
    c.std.push_back(std::sqrt(var / runs));
  }
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t from = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - static_cast<std::size_t>(window) : 0;
    double sum = 0.0;
    for (std::size_t t = from; t <= i; ++t) sum += c.mean[t];
    c.mavg.push_back(sum / static_cast<double>(i + 1 - from));
    c.min.push_back(i == 0 ? c.mean[0] : std::min(c.min.back(), c.mean[i]));
  }
  return c;
}

std::vector<StateStat> top_states(const std::vector<Eigen::VectorXd>& probs, int n_qubits, int k) {
  if (probs.empty()) throw ExperimentError("no distributions to rank");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& p : probs) {
    if (p.size() != dim) throw ExperimentError("distribution size does not match n_qubits");
    mean += p;
  }
  mean /= static_cast<double>(probs.size());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return mean(a) > mean(b); });
  std::vector<StateStat> out;
  for (int r = 0; r < std::min<Eigen::Index>(k, dim); ++r) {
    const Eigen::Index s = order[static_cast<std::size_t>(r)];
    double var = 0.0;
    for (const auto& p : probs) var += (p(s) - mean(s)) * (p(s) - mean(s));
    out.push_back({ising::index_to_bitstring(static_cast<std::size_t>(s), n_qubits), mean(s),
                   std::sqrt(var / static_cast<double>(probs.size()))});
  }
  return out;
}

double RunSummary::target_mean() const {
  const auto idx = static_cast<Eigen::Index>(ising::bitstring_to_index(target_bits));
  double sum = 0.0;
  for (const auto& p : final_probs) sum += p(idx);
  return final_probs.empty() ? 0.0 : sum / static_cast<double>(final_probs.size());
}

RunSummary run_batch(const std::string& label, const std::string& target_bits, int layers, const TrainConfig& cfg,
                     const NoiseModel& noise, int runs, std::uint64_t master_seed, int window,
                     std::int64_t eval_shots) {
  if (runs < 1) throw ExperimentError("runs must be at least 1");
  const int n = static_cast<int>(target_bits.size());
  const target::TargetDistribution tgt = target::one_point(target_bits, n);
  RunSummary s;
  s.label = label;
  s.layers = layers;
  s.noise = noise;
  s.target_bits = target_bits;
  s.results.resize(static_cast<std::size_t>(runs));
  s.final_probs.resize(static_cast<std::size_t>(runs));
  for (int k = 0; k < runs; ++k) s.seeds.push_back(run_seed(master_seed, static_cast<std::uint64_t>(k)));
  parallel_for(runs, [&](int k) {
    const auto slot = static_cast<std::size_t>(k);
    TrainConfig c = cfg;
    c.seed = s.seeds[slot];
    s.results[slot] = train::bilevel_train(tgt.probs(), layers, c, noise);
    const qaoa::CostHamiltonian h1(s.results[slot].model);
    if (eval_shots == 0) {
      s.final_probs[slot] = qaoa::final_probabilities(h1, s.results[slot].params, noise);
    } else {
      std::mt19937_64 rng(run_seed(c.seed, 1));
      const auto counts = qaoa::generate(h1, s.results[slot].params, noise, eval_shots, rng);
      Eigen::VectorXd p(static_cast<Eigen::Index>(counts.size()));
      for (std::size_t i = 0; i < counts.size(); ++i) {
        p(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]) / static_cast<double>(eval_shots);
      }
      s.final_probs[slot] = p;
    }
  });
  const auto target_idx = static_cast<Eigen::Index>(ising::bitstring_to_index(target_bits));
  for (std::size_t k = 0; k < s.results.size(); ++k) {
    s.traces.push_back(s.results[k].trace.raw_h2());
    Eigen::Index best = 0;
    s.final_probs[k].maxCoeff(&best);
    if (best == target_idx) ++s.target_top_runs;
  }
  s.curves = aggregate(s.traces, window);
  s.top5 = top_states(s.final_probs, n, 5);
  return s;
}

void emit(const RunSummary& summary, const fs::path& dir) {
  make_dir(dir);
  write_text(dir / (summary.label + "_mse.csv"), curves_csv(summary.curves));
  std::string top = "state,mean_prob,std_prob\n";
  json top_json = json::array();
  for (const auto& st : summary.top5) {
    top += st.state + "," + format_number(st.mean_prob) + "," + format_number(st.std_prob) + "\n";
    top_json.push_back({{"state", st.state}, {"mean_prob", st.mean_prob}, {"std_prob", st.std_prob}});
  }
  write_text(dir / (summary.label + "_top5.csv"), top);
  json runs = json::array();
  for (std::size_t k = 0; k < summary.results.size(); ++k) {
    const auto target_idx = static_cast<Eigen::Index>(ising::bitstring_to_index(summary.target_bits));
    runs.push_back({{"seed", summary.seeds[k]},
                    {"final_loss", summary.results[k].loss},
                    {"iterations", summary.results[k].trace.iterations.size()},
                    {"target_prob", summary.final_probs[k](target_idx)}});
  }
  const json j{{"label", summary.label},
               {"p", summary.layers},
               {"noise", noise_json(summary.noise)},
               {"target", summary.target_bits},
               {"runs", summary.results.size()},
               {"target_mean_prob", summary.target_mean()},
               {"target_top_runs", summary.target_top_runs},
               {"mse", curves_json(summary.curves)},
               {"top5", std::move(top_json)},
               {"per_run", std::move(runs)}};
  write_text(dir / (summary.label + ".json"), j.dump(2) + "\n");
  write_text(dir / (summary.label + "_mse.svg"), svg::curve_chart(summary.label, summary.curves.mean,
                                                                  summary.curves.std, summary.curves.mavg,
                                                                  summary.curves.min));
}

RunSummary run_convergence(const ExperimentSpec& spec) {
  spec.validate();
  const NoiseModel noise = spec.noise_levels.empty() ? NoiseModel{} : spec.noise_levels.front();
  const std::string label = "convergence_p" + std::to_string(spec.layers);
  RunSummary s = run_batch(label, spec.target_bits, spec.layers, spec.train, noise, spec.runs, spec.master_seed,
                           spec.window, spec.eval_shots);
  emit(s, spec.out_dir);
  return s;
}

std::vector<RunSummary> run_noise(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<RunSummary> out;
  for (const auto& level : spec.noise_levels) {
    RunSummary s = run_batch(noise_label(spec.layers, level), spec.target_bits, spec.layers, spec.train, level,
                             spec.runs, spec.master_seed, spec.window, spec.eval_shots);
    emit(s, spec.out_dir);
    out.push_back(std::move(s));
  }
  return out;
}

ImageReport run_image(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.grid_path.empty()) throw ExperimentError("image experiment needs a grid file");
  ImageReport report;
  report.target = target::load_grid_file(spec.grid_path);
  report.plan = target::decompose(report.target);
  if (spec.dry_run) return report;

  const std::vector<NoiseModel> levels = image_levels(spec);
  const std::vector<std::int64_t> shot_sweep = image_shots(spec);
  const fs::path root = spec.out_dir / "image";
  make_dir(root);
  const std::string created_at = store::utc_timestamp();
  const auto blocks = static_cast<int>(report.plan.size());

  json groups_json = json::array();
  for (std::size_t g = 0; g < levels.size(); ++g) {
    ImageGroup group;
    group.noise = levels[g];
    group.label = image_group_label(levels[g]);
    group.records.resize(static_cast<std::size_t>(blocks));
    const std::uint64_t group_seed = run_seed(spec.master_seed, g);
    parallel_for(blocks, [&](int b) {
      const auto slot = static_cast<std::size_t>(b);
      TrainConfig c = spec.train;
      c.seed = run_seed(group_seed, slot);
      const target::TargetDistribution tgt = target::block_target(report.plan[slot]);
      const train::TrainResult r = train::bilevel_train(tgt.probs(), spec.layers, c, group.noise);
      group.records[slot] = store::ParamRecord::from(r.model, r.params, group.noise, c.seed, r.loss, created_at);
    });
    group.archive_dir = root / group.label;
    store::archive_set(group.records, group.archive_dir);

    json shots_json = json::array();
    for (std::size_t si = 0; si < shot_sweep.size(); ++si) {
      const std::int64_t shots = shot_sweep[si];
      std::vector<std::string> bits;
      for (int b = 0; b < blocks; ++b) {
        const GenerateReport gen =
            run_generate(group.records[static_cast<std::size_t>(b)], shots,
                         run_seed(run_seed(group_seed, static_cast<std::uint64_t>(blocks) + si),
                                  static_cast<std::uint64_t>(b)));
        bits.push_back(gen.modal_state);
      }
      const target::GridImage img = target::assemble(bits);
      const int matching = static_cast<int>((img.cells.array() == report.target.cells.array()).count());
      group.rebuilt[shots] = img;
      group.matching_cells[shots] = matching;
      const std::string text = target::render_grid(img);
      write_text(root / (group.label + "_shots" + std::to_string(shots) + ".txt"), text);
      json rows = json::array();
      for (int r = 0; r < target::kGridRows; ++r) rows.push_back(text.substr(static_cast<std::size_t>(r) * 21, 20));
      shots_json.push_back({{"shots", shots}, {"matching_cells", matching}, {"grid", std::move(rows)}});
    }
    groups_json.push_back({{"label", group.label},
                           {"noise", noise_json(group.noise)},
                           {"archive", group.label + "/" + store::kManifestName},
                           {"reconstructions", std::move(shots_json)}});
    report.groups.push_back(std::move(group));
  }
  const json j{{"p", spec.layers},
               {"blocks", blocks},
               {"cells", target::kGridRows * target::kGridCols},
               {"groups", std::move(groups_json)}};
  write_text(root / "image.json", j.dump(2) + "\n");

  std::vector<svg::GridPanel> panels{{"target", report.target.cells}};
  for (const auto& group : report.groups) {
    for (const auto& [shots, img] : group.rebuilt) {
      panels.push_back({group.label + ", " + std::to_string(shots) + " shots", img.cells});
    }
  }
  write_text(root / "image.svg", svg::grid_panels(panels));
  return report;
}

GenerateReport run_generate(const store::ParamRecord& record, std::int64_t shots, std::uint64_t seed) {
  record.validate();
  if (shots < 1) throw ExperimentError("shot count must be positive");
  std::mt19937_64 rng(seed);
  const qaoa::CostHamiltonian h1(record.model());
  GenerateReport r;
  r.counts = qaoa::generate(h1, record.params(), record.noise, shots, rng);
  r.modal_state = ising::index_to_bitstring(qaoa::modal_outcome(r.counts), record.n_qubits);
  return r;
}

ClassicalSummary run_classical_baseline(const std::string& target_bits, const classical::ClassicalTrainConfig& cfg,
                                        int runs, std::uint64_t master_seed, int window) {
  if (runs < 1) throw ExperimentError("runs must be at least 1");
  const std::vector<ising::SpinConfig> samples{ising::SpinConfig::from_bitstring(target_bits)};
  ClassicalSummary s;
  s.kl_traces.resize(static_cast<std::size_t>(runs));
  parallel_for(runs, [&](int k) {
    classical::ClassicalTrainConfig c = cfg;
    c.seed = run_seed(master_seed, static_cast<std::uint64_t>(k));
    s.kl_traces[static_cast<std::size_t>(k)] = classical::train_classical(samples, c).kl_trace;
  });
  for (const auto& t : s.kl_traces) s.halved.push_back(t.back() <= 0.5 * t.front());
  s.curves = aggregate(s.kl_traces, window);
  return s;
}

void emit_classical(const ClassicalSummary& summary, const fs::path& dir) {
  make_dir(dir);
  std::string csv = "epoch,kl_mean,kl_std,kl_mavg,kl_min\n";
  const CurveSeries& c = summary.curves;
  for (std::size_t t = 0; t < c.mean.size(); ++t) {
    csv += std::to_string(t) + "," + format_number(c.mean[t]) + "," + format_number(c.std[t]) + "," +
           format_number(c.mavg[t]) + "," + format_number(c.min[t]) + "\n";
  }
  write_text(dir / "classical_kl.csv", csv);
  json runs = json::array();
  for (std::size_t k = 0; k < summary.kl_traces.size(); ++k) {
    runs.push_back({{"initial_kl", summary.kl_traces[k].front()},
                    {"final_kl", summary.kl_traces[k].back()},
                    {"halved", static_cast<bool>(summary.halved[k])}});
  }
  const auto halved = std::count(summary.halved.begin(), summary.halved.end(), true);
  const json j{{"runs", summary.kl_traces.size()}, {"halved_runs", halved}, {"per_run", std::move(runs)}};
  write_text(dir / "classical_kl.json", j.dump(2) + "\n");
  write_text(dir / "classical_kl.svg", svg::curve_chart("classical KL", c.mean, c.std, c.mavg, c.min));
}

std::string noise_label(int layers, const NoiseModel& noise) {
  return "noise_p" + std::to_string(layers) + "_" + format_number(noise.p1) + "_" + format_number(noise.p2);
}

std::string format_number(double v) {
  std::array<char, 40> buf{};
  const int len = std::snprintf(buf.data(), buf.size(), "%.10g", v);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

}  // namespace qbm::experiments

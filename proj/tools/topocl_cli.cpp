// Copyright 2026 The topocl Authors
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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topocl/topocl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Loads a run config file that may carry an output_dir next to the
// training keys.
struct RunFile {
  topocl::TrainConfig config;
  std::optional<std::string> output_dir;
};

RunFile load_run_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw topocl::ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw topocl::ConfigError(path + ": " + e.what());
  }
  RunFile run;
  if (j.contains("output_dir")) {
    run.output_dir = j.at("output_dir").get<std::string>();
    j.erase("output_dir");
  }
  run.config = topocl::config_from_json(j);
  return run;
}

fs::path resolve_out_dir(const std::optional<std::string>& flag,
                         const RunFile& run, const char* fallback) {
  if (flag) return *flag;
  if (run.output_dir) return *run.output_dir;
  return fallback;
}

void emit_resolved_config(const topocl::TrainConfig& cfg,
                          const fs::path& out_dir) {
  fs::create_directories(out_dir);
  json j = topocl::config_to_json(cfg);
  j["output_dir"] = out_dir.string();
  std::ofstream out(out_dir / "resolved_config.json");
  out << j.dump(2) << "\n";
}

json probe_json(const topocl::ProbeResult& probe) {
  return {{"fold_accuracies", probe.fold_accuracies},
          {"mean", probe.mean},
          {"stddev", probe.stddev}};
}

int cmd_ingest(const std::string& dataset_dir) {
  const topocl::DatasetBundle bundle = topocl::load_tudataset(dataset_dir);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < bundle.graphs.size(); ++i) {
    const auto report = topocl::validate(bundle.graphs[i]);
    violations += report.size();
    for (const auto& v : report) {
      std::cerr << "graph " << i << ": " << v << "\n";
    }
  }
  std::cout << bundle.size() << " graphs, " << violations
            << " violations\n";
  std::cout << "name: " << bundle.name << "\n";
  std::cout << "classes: " << bundle.class_count << " (dense id <- original:";
  for (std::size_t c = 0; c < bundle.class_values.size(); ++c) {
    std::cout << " " << c << "<-" << bundle.class_values[c];
  }
  std::cout << ")\n";
  std::cout << "node label vocabulary: " << bundle.label_vocab_size << "\n";
  return violations == 0 ? 0 : 1;
}

struct PairList {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

PairList parse_pairs(const std::string& text, std::size_t count) {
  PairList out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      throw topocl::ConfigError("--pairs expects i:j entries, got '" +
                                token + "'");
    }
    const std::size_t i = std::stoul(token.substr(0, colon));
    const std::size_t j = std::stoul(token.substr(colon + 1));
    if (i >= count || j >= count) {
      throw topocl::ConfigError("pair " + token + " outside 0.." +
                                std::to_string(count - 1));
    }
    out.pairs.emplace_back(i, j);
  }
  if (out.pairs.empty()) throw topocl::ConfigError("--pairs is empty");
  return out;
}

int cmd_expertise(const std::string& dataset_dir, const std::string& mode,
                  const std::string& pairs_text, int iterations,
                  double lambda, const std::string& policy_text,
                  const std::optional<std::string>& out_path) {
  const topocl::DatasetBundle bundle = topocl::load_tudataset(dataset_dir);
  const topocl::WlInit init = bundle.has_node_labels
                                  ? topocl::WlInit::kNodeLabels
                                  : topocl::WlInit::kDegree;
  const topocl::WlSetPolicy policy =
      policy_text == "union" ? topocl::WlSetPolicy::kUnionAllIterations
                             : topocl::WlSetPolicy::kFinalIteration;

  std::ofstream file;
  if (out_path) {
    file.open(*out_path);
    if (!file) {
      throw topocl::ConfigError("cannot write " + *out_path);
    }
  }
  std::ostream& out = out_path ? file : std::cout;

  if (mode == "iso") {
    const PairList list =
        pairs_text.empty()
            ? PairList{{{0, 0}}}
            : parse_pairs(pairs_text, bundle.size());
    out << "# mode iso\n# iterations " << iterations << "\n# policy "
        << (policy == topocl::WlSetPolicy::kFinalIteration ? "final"
                                                           : "union")
        << "\n";
    for (const auto& [i, j] : list.pairs) {
      const double y =
          topocl::iso_similarity(bundle.graphs[i], bundle.graphs[j],
                                 iterations, init, policy)
              .value;
      out << i << " " << j << " " << topocl::detail::format_double(y)
          << "\n";
    }
  } else if (mode == "subiso") {
    out << "# mode subiso\n# lambda "
        << topocl::detail::format_double(lambda) << "\n";
    for (std::size_t g = 0; g < bundle.size(); ++g) {
      const auto sc = topocl::structural_matrix(bundle.graphs[g], lambda);
      for (int v = 0; v < sc.num_nodes; ++v) {
        for (const auto& [u, w] : sc.normalized[v]) {
          out << g << " " << v << " " << u << " "
              << topocl::detail::format_double(w) << "\n";
        }
      }
    }
  } else {
    throw topocl::ConfigError("--mode must be iso or subiso");
  }
  return 0;
}

int cmd_train(const std::string& config_path,
              const std::optional<std::string>& out_flag,
              const std::optional<std::uint64_t>& seed_flag,
              const std::optional<std::string>& dataset_flag) {
  RunFile run = load_run_file(config_path);
  if (seed_flag) run.config.seed = *seed_flag;
  if (dataset_flag) run.config.dataset_path = *dataset_flag;
  if (run.config.dataset_path.empty()) {
    throw topocl::ConfigError("config has no dataset_path");
  }
  const fs::path out_dir = resolve_out_dir(out_flag, run, "topocl-run");
  emit_resolved_config(run.config, out_dir);

  const topocl::DatasetBundle data =
      topocl::load_tudataset(run.config.dataset_path);
  const topocl::TrainResult result =
      topocl::train(run.config, data, &std::cerr);
  topocl::write_metrics(result.metrics, out_dir / "metrics.jsonl");
  topocl::save_checkpoint(result.params, out_dir / "model.ckpt");
  std::cout << "trained " << run.config.epochs << " epochs on "
            << data.size() << " graphs\n";
  std::cout << "final losses: l_c "
            << topocl::detail::format_double(result.metrics.back().l_c)
            << " l_iso "
            << topocl::detail::format_double(result.metrics.back().l_iso)
            << " l_subiso "
            << topocl::detail::format_double(result.metrics.back().l_subiso)
            << "\n";
  std::cout << "wrote " << (out_dir / "metrics.jsonl").string() << ", "
            << (out_dir / "model.ckpt").string() << "\n";
  return 0;
}

int cmd_probe(const std::string& checkpoint, const std::string& dataset_dir,
              int folds, int repeats, std::uint64_t seed,
              const std::optional<std::string>& out_flag) {
  const topocl::ModelParams params = topocl::load_checkpoint(checkpoint);
  const topocl::DatasetBundle data = topocl::load_tudataset(dataset_dir);
  const auto embeddings = topocl::embed_dataset(params, data);
  const topocl::ProbeResult probe = topocl::linear_probe_cv(
      embeddings, topocl::dataset_labels(data), folds, repeats, seed);
  json summary = probe_json(probe);
  summary["folds"] = folds;
  summary["repeats"] = repeats;
  summary["seed"] = seed;
  summary["checkpoint"] = checkpoint;
  summary["dataset"] = dataset_dir;
  if (out_flag) {
    fs::create_directories(*out_flag);
    std::ofstream out(fs::path(*out_flag) / "probe_summary.json");
    out << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    out.push_back(std::stod(token));
  }
  if (out.empty()) throw topocl::ConfigError("empty grid");
  return out;
}

int cmd_sweep(const std::string& config_path, const std::string& alphas,
              const std::string& betas, int folds, int repeats,
              const std::optional<std::string>& out_flag,
              const std::optional<std::string>& dataset_flag) {
  RunFile run = load_run_file(config_path);
  if (dataset_flag) run.config.dataset_path = *dataset_flag;
  if (run.config.dataset_path.empty()) {
    throw topocl::ConfigError("config has no dataset_path");
  }
  const fs::path out_dir = resolve_out_dir(out_flag, run, "topocl-sweep");
  emit_resolved_config(run.config, out_dir);
  const topocl::DatasetBundle data =
      topocl::load_tudataset(run.config.dataset_path);

  const auto alpha_grid = parse_grid(alphas);
  const auto beta_grid = parse_grid(betas);
  // Disjoint seeds per cell, derived from the base seed.
  topocl::TrainConfig base = run.config;
  topocl::SweepResult grid;
  grid.alphas = alpha_grid;
  grid.betas = beta_grid;
  for (std::size_t ai = 0; ai < alpha_grid.size(); ++ai) {
    for (std::size_t bi = 0; bi < beta_grid.size(); ++bi) {
      topocl::TrainConfig cell_cfg = base;
      cell_cfg.alpha = alpha_grid[ai];
      cell_cfg.beta = beta_grid[bi];
      cell_cfg.seed = topocl::derive_stream(
                          base.seed, "sweep-cell-" + std::to_string(ai) +
                                         "-" + std::to_string(bi))
                          .next_u64();
      topocl::SweepCell cell;
      cell.alpha = cell_cfg.alpha;
      cell.beta = cell_cfg.beta;
      try {
        const topocl::TrainResult trained =
            topocl::train(cell_cfg, data, &std::cerr);
        const auto embeddings = topocl::embed_dataset(trained.params, data);
        cell.probe = topocl::linear_probe_cv(
            embeddings, topocl::dataset_labels(data), folds, repeats,
            cell_cfg.seed);
        cell.ok = true;
        std::cerr << "cell alpha=" << cell.alpha << " beta=" << cell.beta
                  << " mean accuracy " << cell.probe.mean << "\n";
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
        std::cerr << "cell alpha=" << cell.alpha << " beta=" << cell.beta
                  << " failed: " << e.what() << "\n";
      }
      grid.cells.push_back(std::move(cell));
    }
  }

  json cells = json::array();
  for (const auto& cell : grid.cells) {
    json c{{"alpha", cell.alpha}, {"beta", cell.beta}, {"ok", cell.ok}};
    if (cell.ok) {
      c["probe"] = probe_json(cell.probe);
    } else {
      c["error"] = cell.error;
    }
    cells.push_back(c);
  }
  json summary{{"alphas", grid.alphas},
               {"betas", grid.betas},
               {"folds", folds},
               {"repeats", repeats},
               {"cells", cells}};
  std::ofstream out(out_dir / "sweep_summary.json");
  out << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
  bool all_ok = true;
  for (const auto& cell : grid.cells) all_ok = all_ok && cell.ok;
  return all_ok ? 0 : 1;
}

int cmd_gradcheck(const std::string& config_path,
                  const std::optional<std::string>& dataset_flag) {
  RunFile run = load_run_file(config_path);
  if (dataset_flag) run.config.dataset_path = *dataset_flag;
  topocl::GradCheckReport report;
  if (!run.config.dataset_path.empty()) {
    const topocl::DatasetBundle data =
        topocl::load_tudataset(run.config.dataset_path);
    if (data.size() < 2) {
      throw topocl::ContractError("gradcheck needs at least two graphs");
    }
    report = topocl::gradcheck(
        run.config, {data.graphs[0], data.graphs[1]});
  } else {
    report = topocl::gradcheck(run.config);
  }
  std::cout << "gradcheck: " << (report.pass() ? "PASS" : "FAIL")
            << " max relative error "
            << topocl::detail::format_double(report.max_rel_err)
            << " (tolerance "
            << topocl::detail::format_double(report.tolerance) << ") over "
            << report.checked << " coordinates; worst "
            << report.worst_param << "[" << report.worst_index << "]\n";
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "topology-expertise graph contrastive learning: ingestion, expert "
      "systems, training, probing, sweeps, and gradient verification"};
  app.require_subcommand(1);

  std::string dataset_dir, config_path, checkpoint, mode = "iso";
  std::string pairs_text, alphas = "1,10,100,1000,10000";
  std::string betas = "1,10,100,1000,10000";
  std::string wl_policy = "final";
  std::optional<std::string> out_flag, dataset_flag;
  std::optional<std::uint64_t> seed_flag;
  int iterations = 3, folds = 10, repeats = 5;
  double lambda = 1.0;
  std::uint64_t probe_seed = 1;

  auto* ingest = app.add_subcommand("ingest", "load and validate a dataset");
  ingest->add_option("--dataset", dataset_dir, "TUDataset directory")
      ->required();

  auto* expertise =
      app.add_subcommand("expertise", "run the expert systems directly");
  expertise->add_option("--dataset", dataset_dir, "TUDataset directory")
      ->required();
  expertise->add_option("--mode", mode, "iso or subiso");
  expertise->add_option("--pairs", pairs_text,
                        "comma-separated i:j graph pairs (iso mode)");
  expertise->add_option("--iterations", iterations,
                        "refinement rounds (iso mode)");
  expertise->add_option("--lambda", lambda,
                        "structural coefficient exponent (subiso mode)");
  expertise->add_option("--wl-policy", wl_policy, "final or union");
  std::string expertise_out;
  expertise->add_option("--out", expertise_out, "output file");

  auto* train_cmd = app.add_subcommand("train", "run the training loop");
  train_cmd->add_option("--config", config_path, "run config file")
      ->required();
  std::string train_out, train_dataset;
  train_cmd->add_option("--out", train_out, "output directory");
  std::uint64_t train_seed = 0;
  auto* train_seed_opt =
      train_cmd->add_option("--seed", train_seed, "override config seed");
  auto* train_data_opt = train_cmd->add_option(
      "--dataset", train_dataset, "override config dataset path");

  auto* probe_cmd =
      app.add_subcommand("probe", "linear probe of a trained checkpoint");
  probe_cmd->add_option("--checkpoint", checkpoint, "model checkpoint")
      ->required();
  probe_cmd->add_option("--dataset", dataset_dir, "TUDataset directory")
      ->required();
  probe_cmd->add_option("--folds", folds, "cross-validation folds");
  probe_cmd->add_option("--repeats", repeats, "cross-validation repeats");
  probe_cmd->add_option("--seed", probe_seed, "probe split seed");
  std::string probe_out;
  auto* probe_out_opt =
      probe_cmd->add_option("--out", probe_out, "output directory");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "train+probe over an alpha/beta grid");
  sweep_cmd->add_option("--config", config_path, "run config file")
      ->required();
  sweep_cmd->add_option("--alphas", alphas, "comma-separated alpha grid");
  sweep_cmd->add_option("--betas", betas, "comma-separated beta grid");
  sweep_cmd->add_option("--folds", folds, "cross-validation folds");
  sweep_cmd->add_option("--repeats", repeats, "cross-validation repeats");
  std::string sweep_out, sweep_dataset;
  auto* sweep_out_opt =
      sweep_cmd->add_option("--out", sweep_out, "output directory");
  auto* sweep_data_opt = sweep_cmd->add_option(
      "--dataset", sweep_dataset, "override config dataset path");

  auto* gradcheck_cmd = app.add_subcommand(
      "gradcheck", "verify analytic gradients against finite differences");
  gradcheck_cmd->add_option("--config", config_path, "run config file")
      ->required();
  std::string gradcheck_dataset;
  auto* gradcheck_data_opt = gradcheck_cmd->add_option(
      "--dataset", gradcheck_dataset, "micro-batch source dataset");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(dataset_dir);
    if (expertise->parsed()) {
      return cmd_expertise(dataset_dir, mode, pairs_text, iterations,
                           lambda, wl_policy,
                           expertise_out.empty()
                               ? std::nullopt
                               : std::make_optional(expertise_out));
    }
    if (train_cmd->parsed()) {
      return cmd_train(config_path,
                       train_out.empty() ? std::nullopt
                                         : std::make_optional(train_out),
                       train_seed_opt->count()
                           ? std::make_optional(train_seed)
                           : std::nullopt,
                       train_data_opt->count()
                           ? std::make_optional(train_dataset)
                           : std::nullopt);
    }
    if (probe_cmd->parsed()) {
      return cmd_probe(checkpoint, dataset_dir, folds, repeats, probe_seed,
                       probe_out_opt->count()
                           ? std::make_optional(probe_out)
                           : std::nullopt);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(config_path, alphas, betas, folds, repeats,
                       sweep_out_opt->count()
                           ? std::make_optional(sweep_out)
                           : std::nullopt,
                       sweep_data_opt->count()
                           ? std::make_optional(sweep_dataset)
                           : std::nullopt);
    }
    if (gradcheck_cmd->parsed()) {
      return cmd_gradcheck(config_path,
                           gradcheck_data_opt->count()
                               ? std::make_optional(gradcheck_dataset)
                               : std::nullopt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tnp/bench/metrics.hpp"
#include "tnp/bench/report.hpp"
#include "tnp/meta/meta_transfer.hpp"
#include "tnp/np/pretrain.hpp"
#include "tnp/smbo/smbo.hpp"
#include "tnp/tasks/families.hpp"

namespace tnp::bench {

struct MetaSettings {
  std::size_t epochs = 20;
  double epsilon = 0.01;
  double alpha_inner = 1e-5;
  std::size_t k = 10;
  double softmax_temperature = 5.0;
  double init_lr = 1e-5;
  bool ascend = true;
  std::size_t n_init = 3;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::vector<std::string> methods;
  tasks::FamilySpec family;
  std::size_t targets = 1;          // target members per experiment
  std::size_t seeds = 1;            // SMBO seeds per target
  std::size_t historical_tasks = 0; // M
  std::size_t history_trials = 30;  // T^m
  std::string history_method = "gp";
  smbo::SmboConfig smbo;            // seed is derived per run
  np::NpConfig model;
  std::optional<std::string> pretrain_checkpoint;
  np::PretrainConfig pretrain;
  MetaSettings meta;
  std::string output_dir;
  std::size_t parallelism = 1;

  bool needs_model() const;
  void validate() const;
};

/// Reads the JSON form; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::string& path);

/// min(config.parallelism, TNP_THREADS) with TNP_THREADS unset meaning no cap.
std::size_t effective_parallelism(std::size_t requested);

struct RunOutput {
  std::string method;
  std::string task_id;
  std::uint64_t seed = 0;
  smbo::SmboResult result;
};

struct ExperimentResult {
  std::vector<RunOutput> runs;  // sorted by (task_id, seed, method)
  std::vector<MetricRow> metrics;
  std::vector<SummaryRow> summary;
  std::vector<std::string> failures;
};

/// Shared models of an experiment: pretrained θ and, when a method needs
/// it, the meta-trained state with its historical sets.
struct PreparedModels {
  std::optional<meta::MetaState> pretrained;
  std::optional<meta::MetaState> meta_trained;
  std::vector<np::HistorySet> historical;
};

PreparedModels prepare_models(const ExperimentConfig& config);

/// Every (target, seed) unit runs all methods; units may run concurrently.
/// Writes trials.csv, metrics.csv and summary.csv when output_dir is set.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config, const PreparedModels& models);

/// Curve points 0..T: best over the initial design plus the first t trials.
RunCurve to_curve(const RunOutput& run, std::optional<double> known_optimum);

void write_trials_csv(std::ostream& out, std::span<const RunOutput> runs);

}  // namespace tnp::bench

// Command-line front end: pretrain, metatrain, run, bench, report.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "tnp/bench/experiment.hpp"
#include "tnp/bench/report.hpp"
#include "tnp/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> methods;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tnp::ConfigError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw tnp::ConfigError("cannot parse " + path + ": " + e.what());
  }
}

tnp::bench::ExperimentConfig load_config(const CommonFlags& f) {
  json doc = f.config.empty() ? json::object() : read_json(f.config);
  if (f.seed) doc["seed"] = *f.seed;
  if (!f.out.empty()) doc["output_dir"] = f.out;
  if (!f.methods.empty()) doc["methods"] = f.methods;
  if (!doc.contains("methods")) doc["methods"] = std::vector<std::string>{"random"};
  return tnp::bench::experiment_config_from_json(doc);
}

void add_common(CLI::App* cmd, CommonFlags& f, bool with_methods) {
  cmd->add_option("--config", f.config, "experiment JSON file");
  cmd->add_option("--seed", f.seed, "overrides the config seed");
  cmd->add_option("--out", f.out, "output directory");
  if (with_methods) cmd->add_option("--method", f.methods, "method name (repeatable)");
}

fs::path out_dir(const tnp::bench::ExperimentConfig& c) {
  const fs::path dir = c.output_dir.empty() ? fs::path(".") : fs::path(c.output_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_pretrain(const CommonFlags& f) {
  auto c = load_config(f);
  auto pc = c.pretrain;
  pc.seed = tnp::mix_seed(c.seed, pc.seed);
  const auto result = tnp::np::pretrain(
      tnp::np::init_np_params(c.model, tnp::mix_seed(c.seed, 1)), pc,
      [&](std::size_t b, double loss) {
        if ((b + 1) % 100 == 0) spdlog::info("batch {}/{} loss {:.4f}", b + 1, pc.batches, loss);
      });
  const fs::path dir = out_dir(c);
  tnp::np::save_np_params(result.params, (dir / "pretrained.json").string());
  std::ofstream losses(dir / "pretrain_losses.csv");
  losses << "batch,loss\n";
  for (std::size_t i = 0; i < result.losses.size(); ++i) losses << i << ',' << result.losses[i] << '\n';
  std::cout << "wrote " << (dir / "pretrained.json").string() << '\n';
  return 0;
}

int cmd_metatrain(const CommonFlags& f) {
  auto c = load_config(f);
  if (c.historical_tasks == 0) throw tnp::ConfigError("metatrain: set M to at least 1");
  if (std::none_of(c.methods.begin(), c.methods.end(),
                   [](const std::string& m) { return tnp::smbo::method_by_name(m).meta_trained; })) {
    c.methods.push_back("tnp");
  }
  const auto models = tnp::bench::prepare_models(c);
  const fs::path dir = out_dir(c);
  tnp::meta::save_meta_state(*models.meta_trained, (dir / "meta_state.json").string());
  std::ofstream hist(dir / "histories.csv");
  tnp::np::write_history_csv(hist, models.historical);
  std::cout << "wrote " << (dir / "meta_state.json").string() << '\n';
  return 0;
}

int cmd_bench(const CommonFlags& f, bool single) {
  auto c = load_config(f);
  if (single) {
    c.targets = 1;
    c.seeds = 1;
  }
  if (c.output_dir.empty()) c.output_dir = ".";
  const auto result = tnp::bench::run_experiment(c);
  for (const auto& row : result.summary) {
    if (row.trial + 1 == c.smbo.trials + 1 || c.smbo.trials == 0) {
      std::cout << row.method << " final: mean_rank=" << row.mean_rank
                << " mean_adtm=" << row.mean_adtm << " median_regret=" << row.median_regret << '\n';
    }
  }
  for (const auto& fail : result.failures) std::cerr << "failed: " << fail << '\n';
  return result.failures.empty() ? 0 : 2;
}

int cmd_report(const std::string& metrics_path, const std::string& out) {
  std::ifstream in(metrics_path);
  if (!in) throw tnp::ConfigError("cannot read " + metrics_path);
  const auto summary = tnp::bench::report(in);
  const fs::path dir = out.empty() ? fs::path(metrics_path).parent_path() : fs::path(out);
  if (!dir.empty()) fs::create_directories(dir);
  std::ofstream file(dir / "summary.csv");
  tnp::bench::write_summary_csv(file, summary);
  tnp::bench::write_summary_csv(std::cout, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transferable neural-process hyperparameter optimization"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error");

  CommonFlags pre, meta, run, bench;
  add_common(app.add_subcommand("pretrain", "pre-train the surrogate on GP prior functions"), pre, false);
  add_common(app.add_subcommand("metatrain", "build histories and meta-train"), meta, true);
  add_common(app.add_subcommand("run", "one SMBO run per method on the first target"), run, true);
  add_common(app.add_subcommand("bench", "all targets, seeds and methods"), bench, true);
  auto* rep = app.add_subcommand("report", "summarize a metrics.csv");
  std::string metrics_path;
  std::string report_out;
  rep->add_option("metrics", metrics_path, "metrics.csv")->required();
  rep->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (app.got_subcommand("pretrain")) return cmd_pretrain(pre);
    if (app.got_subcommand("metatrain")) return cmd_metatrain(meta);
    if (app.got_subcommand("run")) return cmd_bench(run, true);
    if (app.got_subcommand("bench")) return cmd_bench(bench, false);
    if (app.got_subcommand("report")) return cmd_report(metrics_path, report_out);
  } catch (const tnp::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 64;
  } catch (const tnp::IngestError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 65;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

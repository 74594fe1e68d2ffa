#include "tnp/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "tnp/bench/csv.hpp"
#include "tnp/errors.hpp"
#include "tnp/tasks/history_gen.hpp"

namespace tnp::bench {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTargetOffset = 0;
constexpr std::uint64_t kHistoricalOffset = 1'000'000;

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

bool ExperimentConfig::needs_model() const {
  return std::any_of(methods.begin(), methods.end(), [](const std::string& m) {
    return smbo::method_by_name(m).surrogate == smbo::SurrogateKind::kNeuralProcess;
  });
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("experiment: methods list is empty");
  for (const auto& m : methods) smbo::method_by_name(m);
  if (std::set<std::string>(methods.begin(), methods.end()).size() != methods.size()) {
    throw ConfigError("experiment: duplicate method");
  }
  family.validate();
  if (targets == 0 || seeds == 0) throw ConfigError("experiment: targets and seeds must be positive");
  smbo.validate();
  if (parallelism == 0) throw ConfigError("experiment: parallelism must be positive");
  const bool meta_needed = std::any_of(methods.begin(), methods.end(), [](const std::string& m) {
    const auto& spec = smbo::method_by_name(m);
    return spec.meta_trained || spec.use_history;
  });
  if (meta_needed && historical_tasks == 0) {
    throw ConfigError("experiment: transfer methods need at least one historical task");
  }
  if (historical_tasks > 0 && history_trials < 2) {
    throw ConfigError("experiment: history_trials must be at least 2");
  }
  if (needs_model()) model.validate();
}

ExperimentConfig experiment_config_from_json(const json& doc) {
  try {
    reject_unknown(doc,
                   {"seed", "methods", "family", "targets", "seeds", "M", "history_trials",
                    "history_method", "smbo", "model", "pretrain", "meta", "output_dir",
                    "parallelism"},
                   "experiment");
    ExperimentConfig c;
    read(doc, "seed", c.seed);
    read(doc, "methods", c.methods);
    read(doc, "targets", c.targets);
    read(doc, "seeds", c.seeds);
    read(doc, "M", c.historical_tasks);
    read(doc, "history_trials", c.history_trials);
    read(doc, "history_method", c.history_method);
    read(doc, "output_dir", c.output_dir);
    read(doc, "parallelism", c.parallelism);
    if (doc.contains("family")) {
      const json& f = doc.at("family");
      reject_unknown(f, {"kind", "seed", "dim", "length_scale_min", "length_scale_max", "files"},
                     "family");
      if (f.contains("kind")) c.family.kind = tasks::family_kind_from_string(f.at("kind").get<std::string>());
      read(f, "seed", c.family.seed);
      read(f, "dim", c.family.dim);
      read(f, "length_scale_min", c.family.gp_length_scale_min);
      read(f, "length_scale_max", c.family.gp_length_scale_max);
      read(f, "files", c.family.tabular_files);
    }
    if (doc.contains("smbo")) {
      const json& s = doc.at("smbo");
      reject_unknown(s, {"trials", "n_init", "n_candidates"}, "smbo");
      read(s, "trials", c.smbo.trials);
      read(s, "n_init", c.smbo.n_init);
      read(s, "n_candidates", c.smbo.n_candidates);
    }
    c.model.d = c.family.kind == tasks::FamilyKind::kBranin ? 2 : static_cast<nn::Index>(c.family.dim);
    if (doc.contains("model")) {
      const json& m = doc.at("model");
      reject_unknown(m, {"r", "heads", "hidden", "attention_scale", "sigma_floor"}, "model");
      read(m, "r", c.model.r);
      read(m, "heads", c.model.heads);
      read(m, "hidden", c.model.hidden);
      read(m, "sigma_floor", c.model.sigma_floor);
      if (m.contains("attention_scale")) {
        c.model.attention_scale = np::attention_scale_from_string(m.at("attention_scale").get<std::string>());
      }
    }
    if (doc.contains("pretrain")) {
      const json& p = doc.at("pretrain");
      reject_unknown(p,
                     {"checkpoint", "batches", "batch_size", "learning_rate", "length_scale_min",
                      "length_scale_max", "min_points", "max_points", "seed"},
                     "pretrain");
      if (p.contains("checkpoint")) c.pretrain_checkpoint = p.at("checkpoint").get<std::string>();
      read(p, "batches", c.pretrain.batches);
      read(p, "batch_size", c.pretrain.batch_size);
      read(p, "learning_rate", c.pretrain.learning_rate);
      read(p, "length_scale_min", c.pretrain.length_scale_min);
      read(p, "length_scale_max", c.pretrain.length_scale_max);
      read(p, "min_points", c.pretrain.min_points);
      read(p, "max_points", c.pretrain.max_points);
      read(p, "seed", c.pretrain.seed);
    }
    c.pretrain.dim = static_cast<std::size_t>(c.model.d);
    if (doc.contains("meta")) {
      const json& m = doc.at("meta");
      reject_unknown(m,
                     {"epochs", "epsilon", "alpha_inner", "k", "softmax_temperature", "init_lr",
                      "ascend", "n_init"},
                     "meta");
      read(m, "epochs", c.meta.epochs);
      read(m, "epsilon", c.meta.epsilon);
      read(m, "alpha_inner", c.meta.alpha_inner);
      read(m, "k", c.meta.k);
      read(m, "softmax_temperature", c.meta.softmax_temperature);
      read(m, "init_lr", c.meta.init_lr);
      read(m, "ascend", c.meta.ascend);
    }
    c.meta.n_init = c.smbo.n_init;
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return experiment_config_from_json(doc);
}

std::size_t effective_parallelism(std::size_t requested) {
  std::size_t n = std::max<std::size_t>(requested, 1);
  if (const char* env = std::getenv("TNP_THREADS"); env != nullptr && *env != '\0') {
    try {
      const auto cap = static_cast<std::size_t>(std::stoul(env));
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      spdlog::warn("ignoring malformed TNP_THREADS='{}'", env);
    }
  }
  return n;
}

PreparedModels prepare_models(const ExperimentConfig& config) {
  PreparedModels out;
  if (!config.needs_model()) return out;

  np::NpParams theta;
  if (config.pretrain_checkpoint) {
    theta = np::load_np_params(*config.pretrain_checkpoint);
    if (theta.config.d != config.model.d) throw ConfigError("pretrained checkpoint has the wrong dimension");
  } else {
    np::PretrainConfig pc = config.pretrain;
    pc.seed = mix_seed(config.seed, pc.seed);
    spdlog::info("pretraining for {} batches", pc.batches);
    theta = np::pretrain(np::init_np_params(config.model, mix_seed(config.seed, 1)), pc).params;
  }
  meta::MetaState base = meta::make_meta_state(theta, config.meta.n_init, mix_seed(config.seed, 2));
  base.epsilon = config.meta.epsilon;
  base.alpha_inner = config.meta.alpha_inner;
  base.k = config.meta.k;
  base.softmax_temperature = config.meta.softmax_temperature;
  base.init_lr = config.meta.init_lr;
  base.ascend = config.meta.ascend;
  out.pretrained = base;

  if (config.historical_tasks > 0) {
    for (std::size_t m = 0; m < config.historical_tasks; ++m) {
      const auto task = tasks::make_member(config.family, kHistoricalOffset + m);
      out.historical.push_back(tasks::precompute_history(
          task, config.history_method, config.history_trials, mix_seed(config.seed, 100 + m),
          &*out.pretrained, config.smbo.n_candidates));
    }
    const bool meta_needed = std::any_of(config.methods.begin(), config.methods.end(),
                                         [](const std::string& m) { return smbo::method_by_name(m).meta_trained; });
    if (meta_needed) {
      spdlog::info("meta-training on {} historical tasks for {} epochs", out.historical.size(),
                   config.meta.epochs);
      out.meta_trained = meta::meta_train(base, out.historical, config.meta.epochs, mix_seed(config.seed, 3));
    }
  }
  return out;
}

RunCurve to_curve(const RunOutput& run, std::optional<double> known_optimum) {
  RunCurve c;
  c.method = run.method;
  c.task_id = run.task_id;
  c.seed = run.seed;
  c.known_optimum = known_optimum;
  c.observed_min = std::numeric_limits<double>::infinity();
  c.observed_max = -std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : run.result.records) {
    // Point 0 is the best of the initial design.
    if (!r.initial && c.best_so_far.empty()) c.best_so_far.push_back(best);
    c.observed_min = std::min(c.observed_min, r.y);
    c.observed_max = std::max(c.observed_max, r.y);
    best = std::max(best, r.y);
    if (!r.initial) c.best_so_far.push_back(best);
  }
  if (c.best_so_far.empty()) c.best_so_far.push_back(best);
  return c;
}

void write_trials_csv(std::ostream& out, std::span<const RunOutput> runs) {
  out << "run_id,method,task_id,seed,trial,x,y,best_so_far,millis\n";
  for (const auto& run : runs) {
    const std::string run_id = run.task_id + "/" + std::to_string(run.seed) + "/" + run.method;
    for (const auto& r : run.result.records) {
      out << run_id << ',' << run.method << ',' << run.task_id << ',' << run.seed << ',' << r.trial
          << ',' << join_coords(r.x) << ',' << format_real(r.y) << ',' << format_real(r.best_so_far)
          << ',' << format_real(r.millis) << '\n';
    }
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, prepare_models(config));
}

ExperimentResult run_experiment(const ExperimentConfig& config, const PreparedModels& models) {
  config.validate();
  struct Unit {
    std::size_t target;
    std::size_t seed_index;
  };
  std::vector<Unit> units;
  for (std::size_t t = 0; t < config.targets; ++t) {
    for (std::size_t s = 0; s < config.seeds; ++s) units.push_back({t, s});
  }
  std::vector<tasks::BlackBoxTask> targets;
  for (std::size_t t = 0; t < config.targets; ++t) {
    targets.push_back(tasks::make_member(config.family, kTargetOffset + t));
  }

  struct UnitOutput {
    std::vector<RunOutput> runs;
    std::string failure;
  };
  std::vector<UnitOutput> outputs(units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) {
      const Unit& u = units[i];
      const auto& task = targets[u.target];
      const std::uint64_t run_seed = mix_seed(config.seed, 10'000 + u.seed_index);
      UnitOutput& out = outputs[i];
      for (const auto& name : config.methods) {
        const auto& method = smbo::method_by_name(name);
        smbo::SmboConfig sc = config.smbo;
        sc.seed = run_seed;
        const meta::MetaState* state = nullptr;
        if (method.surrogate == smbo::SurrogateKind::kNeuralProcess || method.learned_init) {
          state = method.meta_trained ? &*models.meta_trained : &*models.pretrained;
        }
        std::span<const np::HistorySet> hist;
        if (method.use_history) hist = models.historical;
        try {
          out.runs.push_back({name, task.id(), u.seed_index, smbo::run_smbo(task, method, sc, state, hist)});
        } catch (const std::exception& e) {
          out.failure = task.id() + "/" + std::to_string(u.seed_index) + "/" + name + ": " + e.what();
          spdlog::error("run failed: {}", out.failure);
          out.runs.clear();
          break;
        }
      }
    }
  };
  const std::size_t threads = std::min(effective_parallelism(config.parallelism), units.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  for (auto& o : outputs) {
    if (!o.failure.empty()) result.failures.push_back(o.failure);
    for (auto& r : o.runs) result.runs.push_back(std::move(r));
  }
  std::sort(result.runs.begin(), result.runs.end(), [](const RunOutput& a, const RunOutput& b) {
    return std::tie(a.task_id, a.seed, a.method) < std::tie(b.task_id, b.seed, b.method);
  });
  std::map<std::string, std::optional<double>> optimum;
  for (const auto& t : targets) {
    optimum[t.id()] = t.optimum() ? std::optional<double>(t.optimum()->value) : std::nullopt;
  }
  std::vector<RunCurve> curves;
  for (const auto& r : result.runs) curves.push_back(to_curve(r, optimum.at(r.task_id)));
  if (!curves.empty()) {
    result.metrics = compute_metrics(curves);
    result.summary = report(result.metrics);
  }

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    const std::filesystem::path dir(config.output_dir);
    std::ofstream trials(dir / "trials.csv");
    write_trials_csv(trials, result.runs);
    std::ofstream metrics(dir / "metrics.csv");
    write_metrics_csv(metrics, result.metrics);
    std::ofstream summary(dir / "summary.csv");
    write_summary_csv(summary, result.summary);
    if (!result.failures.empty()) {
      std::ofstream failures(dir / "failures.txt");
      for (const auto& f : result.failures) failures << f << '\n';
    }
  }
  return result;
}

}  // namespace tnp::bench

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tnp/bench/experiment.hpp"
#include "tnp/bench/metrics.hpp"
#include "tnp/bench/report.hpp"
#include "tnp/errors.hpp"
#include "tnp/rng.hpp"

using namespace tnp::bench;

namespace {

RunCurve curve(std::string method, std::vector<double> best, std::string task = "t", std::uint64_t seed = 0) {
  RunCurve c;
  c.method = std::move(method);
  c.task_id = std::move(task);
  c.seed = seed;
  c.observed_min = *std::min_element(best.begin(), best.end());
  c.observed_max = *std::max_element(best.begin(), best.end());
  c.best_so_far = std::move(best);
  return c;
}

ExperimentConfig small_bench(std::size_t parallelism) {
  ExperimentConfig cfg;
  cfg.seed = 3;
  cfg.methods = {"random", "gp"};
  cfg.family.kind = tnp::tasks::FamilyKind::kQuad;
  cfg.family.seed = 17;
  cfg.targets = 2;
  cfg.seeds = 3;
  cfg.smbo.trials = 10;
  cfg.smbo.n_candidates = 128;
  cfg.parallelism = parallelism;
  return cfg;
}

std::string metrics_text(const ExperimentResult& r) {
  std::ostringstream out;
  write_metrics_csv(out, r.metrics);
  return out.str();
}

}  // namespace

TEST_CASE("tie-averaged ranks") {
  const std::vector<double> v{0.9, 0.5, 0.5};
  CHECK(tie_averaged_ranks(v) == std::vector<double>{1.0, 2.5, 2.5});
  const std::vector<double> w{0.1, 0.3, 0.2, 0.3};
  CHECK(tie_averaged_ranks(w) == std::vector<double>{4.0, 1.5, 3.0, 1.5});
}

TEST_CASE("average_rank examples") {
  const std::vector<RunCurve> strict{curve("a", {0.5, 0.7, 0.9}), curve("b", {0.1, 0.2, 0.3})};
  const auto r = average_rank(strict);
  CHECK(r.at("a") == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(r.at("b") == std::vector<double>{2.0, 2.0, 2.0});

  const std::vector<RunCurve> equal{curve("a", {0.5, 0.6}), curve("b", {0.5, 0.6})};
  CHECK(average_rank(equal).at("a") == std::vector<double>{1.5, 1.5});

  const std::vector<RunCurve> bad{curve("a", {0.5, 0.6}), curve("b", {0.5})};
  CHECK_THROWS_AS(average_rank(bad), tnp::ContractError);
  const std::vector<RunCurve> lone{curve("a", {0.5})};
  CHECK_THROWS_AS(average_rank(lone), tnp::ContractError);
}

TEST_CASE("adtm examples") {
  CHECK(adtm(2.0, 0.0, 2.0) == 0.0);
  CHECK(adtm(0.0, 0.0, 2.0) == 1.0);
  CHECK(adtm(1.5, 0.0, 2.0) == 0.25);
  CHECK(adtm(1.0, 1.0, 1.0) == 0.0);
  CHECK(adtm(3.0, 0.0, 2.0) == 0.0);
}

TEST_CASE("rank sums and ADTM bounds over random curves") {
  tnp::Rng rng(1);
  for (int c = 0; c < 200; ++c) {
    const std::size_t methods = 2 + rng.uniform_index(4);
    const std::size_t len = 1 + rng.uniform_index(8);
    std::vector<RunCurve> runs;
    for (std::size_t m = 0; m < methods; ++m) {
      std::vector<double> best(len);
      double b = rng.uniform_index(3) == 0 ? 0.0 : rng.normal();
      for (double& v : best) {
        if (rng.uniform() < 0.5) b = std::max(b, std::round(rng.normal() * 2) / 2);
        v = b;
      }
      runs.push_back(curve("m" + std::to_string(m), best));
    }
    const auto rows = compute_metrics(runs);
    const double n = static_cast<double>(methods);
    for (std::size_t t = 0; t < len; ++t) {
      double sum = 0.0;
      for (const auto& r : rows) {
        if (r.trial == t) sum += r.rank;
      }
      CHECK(sum == doctest::Approx(n * (n + 1) / 2).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].adtm >= 0.0);
      CHECK(rows[i].adtm <= 1.0);
      if (i > 0 && rows[i].trial > 0) CHECK(rows[i].adtm <= rows[i - 1].adtm);
    }
  }
}

TEST_CASE("report on a single method has mean rank 1") {
  const std::vector<RunCurve> runs{curve("only", {0.1, 0.4}, "t1"), curve("only", {0.2, 0.3}, "t2")};
  for (const auto& s : report(compute_metrics(runs))) CHECK(s.mean_rank == 1.0);
}

TEST_CASE("report aggregates a hand fixture") {
  std::istringstream csv(
      "method,task_id,seed,trial,best_so_far,rank,adtm,regret\n"
      "a,t1,0,0,0.5,1,0.2,0.5\n"
      "b,t1,0,0,0.4,2,0.6,0.6\n"
      "a,t2,0,0,0.1,2,0.8,0.9\n"
      "b,t2,0,0,0.3,1,0.4,0.7\n");
  const auto s = report(csv);
  REQUIRE(s.size() == 2);
  CHECK(s[0].method == "a");
  CHECK(s[0].mean_rank == 1.5);
  CHECK(s[0].mean_adtm == doctest::Approx(0.5));
  CHECK(s[0].median_regret == doctest::Approx(0.7));
  CHECK(s[0].q25 == doctest::Approx(0.6));
  CHECK(s[0].q75 == doctest::Approx(0.8));
  CHECK(s[1].mean_rank == 1.5);
  CHECK(s[1].mean_adtm == doctest::Approx(0.5));
  CHECK(s[1].median_regret == doctest::Approx(0.65));

  std::ostringstream out;
  write_summary_csv(out, s);
  CHECK(out.str().substr(0, out.str().find('\n')) == "method,trial,mean_rank,mean_adtm,median_regret,q25,q75");
}

TEST_CASE("malformed metrics rows report their line") {
  std::istringstream csv(
      "method,task_id,seed,trial,best_so_far,rank,adtm,regret\n"
      "a,t1,0,0,0.5,1,0.2,0.5\n"
      "a,t1,0,1,oops,1,0.2,0.5\n");
  try {
    report(csv);
    FAIL("expected IngestError");
  } catch (const tnp::IngestError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream header("method,trial\n");
  CHECK_THROWS_AS(report(header), tnp::IngestError);
}

TEST_CASE("metrics CSV round trip") {
  const std::vector<RunCurve> runs{curve("a", {0.1, 0.4}), curve("b", {0.3, 0.3})};
  const auto rows = compute_metrics(runs);
  std::ostringstream out;
  write_metrics_csv(out, rows);
  std::istringstream in(out.str());
  const auto back = read_metrics_csv(in);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].method == rows[i].method);
    CHECK(back[i].rank == rows[i].rank);
    CHECK(back[i].adtm == rows[i].adtm);
    CHECK(back[i].best_so_far == rows[i].best_so_far);
  }
}

TEST_CASE("experiment validation rejects empty or unknown methods") {
  auto cfg = small_bench(1);
  cfg.methods.clear();
  CHECK_THROWS_AS(run_experiment(cfg), tnp::ConfigError);
  cfg.methods = {"random", "nope"};
  CHECK_THROWS_AS(cfg.validate(), tnp::ConfigError);
  CHECK_THROWS_AS(experiment_config_from_json({{"methods", {"random"}}, {"bogus", 1}}), tnp::ConfigError);
}

TEST_CASE("experiment JSON reads nested sections") {
  const auto cfg = experiment_config_from_json(nlohmann::json::parse(R"({
    "seed": 5, "methods": ["random", "gp"], "family": {"kind": "branin", "seed": 2},
    "targets": 3, "seeds": 4, "smbo": {"trials": 7, "n_candidates": 64}, "parallelism": 2
  })"));
  CHECK(cfg.seed == 5);
  CHECK(cfg.family.kind == tnp::tasks::FamilyKind::kBranin);
  CHECK(cfg.targets == 3);
  CHECK(cfg.smbo.trials == 7);
  CHECK(cfg.smbo.n_candidates == 64);
  CHECK(cfg.parallelism == 2);
  CHECK_FALSE(cfg.needs_model());
}

TEST_CASE("trials.csv row count and files on disk") {
  auto cfg = small_bench(1);
  const auto dir = std::filesystem::temp_directory_path() / "tnp_bench_rows";
  std::filesystem::remove_all(dir);
  cfg.output_dir = dir.string();
  const auto result = run_experiment(cfg);
  CHECK(result.failures.empty());
  CHECK(result.runs.size() == 2 * 2 * 3);
  std::ifstream trials(dir / "trials.csv");
  std::size_t lines = 0;
  for (std::string line; std::getline(trials, line);) ++lines;
  CHECK(lines - 1 == 2 * 2 * 3 * (3 + 10));
  CHECK(std::filesystem::exists(dir / "metrics.csv"));
  CHECK(std::filesystem::exists(dir / "summary.csv"));
  CHECK(result.metrics.size() == 2 * 2 * 3 * 11);
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiments are reproducible across runs and parallelism") {
  const auto a = metrics_text(run_experiment(small_bench(1)));
  const auto b = metrics_text(run_experiment(small_bench(1)));
  const auto c = metrics_text(run_experiment(small_bench(4)));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("summary is a function of metrics alone") {
  const auto r = run_experiment(small_bench(1));
  std::istringstream in(metrics_text(r));
  const auto s = report(in);
  REQUIRE(s.size() == r.summary.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].mean_rank == r.summary[i].mean_rank);
    CHECK(s[i].median_regret == r.summary[i].median_regret);
  }
}

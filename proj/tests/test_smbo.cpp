#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "tnp/errors.hpp"
#include "tnp/smbo/acquisition.hpp"
#include "tnp/smbo/candidates.hpp"
#include "tnp/smbo/gp_surrogate.hpp"
#include "tnp/smbo/smbo.hpp"
#include "tnp/tasks/families.hpp"

using tnp::Rng;
using tnp::nn::Index;
using tnp::nn::RealArray;
using tnp::np::GaussianPrediction;
using namespace tnp::smbo;

namespace {

std::vector<std::vector<double>> rows(const RealArray& x) {
  std::vector<std::vector<double>> out;
  for (Index i = 0; i < x.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(x.cols()));
    for (Index j = 0; j < x.cols(); ++j) r[static_cast<std::size_t>(j)] = x(i, j);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

TEST_CASE("EI with zero stddev") {
  CHECK(expected_improvement(0.3, 0.0, 0.5) == 0.0);
  CHECK(expected_improvement(0.5, 0.0, 0.5) == 0.0);
  CHECK(expected_improvement(0.8, 0.0, 0.5) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("EI closed form agrees with Monte Carlo at reference points") {
  CHECK(expected_improvement(0.0, 1.0, 0.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
  CHECK(expected_improvement(0.0, 1.0, 0.0) ==
        doctest::Approx(oracle::ei_monte_carlo(0.0, 1.0, 0.0, 1000000, 1)).epsilon(1e-2));
  CHECK(expected_improvement(1.0, 1.0, 0.0) == doctest::Approx(1.0833).epsilon(1e-4));
  CHECK(expected_improvement(1.0, 1.0, 0.0) ==
        doctest::Approx(oracle::ei_monte_carlo(1.0, 1.0, 0.0, 1000000, 2)).epsilon(1e-2));
}

TEST_CASE("EI is non-negative, increasing in the mean and, below the incumbent, in the stddev") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double mu = rng.uniform(-3.0, 3.0);
    const double sd = rng.uniform(0.0, 2.0);
    const double best = rng.uniform(-3.0, 3.0);
    const double ei = expected_improvement(mu, sd, best);
    CHECK(ei >= 0.0);
    const double dm = rng.uniform(0.0, 1.0);
    CHECK(expected_improvement(mu + dm, sd, best) >= ei);
    if (mu <= best) CHECK(expected_improvement(mu, sd + rng.uniform(0.0, 1.0), best) >= ei);
  }
}

TEST_CASE("propose_next selection rules") {
  const std::vector<GaussianPrediction> one{{0.1, 0.2}};
  CHECK(propose_next(one, 0.0) == 0);

  const std::vector<GaussianPrediction> same(5, GaussianPrediction{0.3, 0.4});
  CHECK(propose_next(same, 0.0) == 0);

  std::vector<GaussianPrediction> preds(6, GaussianPrediction{0.0, 0.5});
  preds[4].mean = 0.2;
  CHECK(propose_next(preds, 0.1) == 4);

  std::vector<bool> mask(6, true);
  mask[4] = false;
  CHECK(propose_next(preds, 0.1, mask) == 0);
  CHECK_THROWS(propose_next({}, 0.0));
}

TEST_CASE("propose_next picks the candidate of maximal EI") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GaussianPrediction> preds(20);
    for (auto& p : preds) p = {rng.normal(), rng.uniform(0.01, 1.0)};
    const double best = rng.normal();
    const std::size_t pick = propose_next(preds, best);
    const double top = expected_improvement(preds[pick].mean, preds[pick].stddev, best);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const double ei = expected_improvement(preds[i].mean, preds[i].stddev, best);
      CHECK(ei <= top);
      if (i < pick) CHECK(ei < top);
    }
  }
}

TEST_CASE("Sobol candidates are deterministic, distinct and inside the unit cube") {
  for (std::size_t d : {1u, 2u, 5u}) {
    const RealArray a = make_candidates(d, 512, 9);
    const RealArray b = make_candidates(d, 512, 9);
    CHECK((a.array() == b.array()).all());
    CHECK(a.rows() == 512);
    CHECK((a.array() >= 0.0).all());
    CHECK((a.array() < 1.0).all());
    std::set<std::vector<double>> seen;
    for (const auto& r : rows(a)) seen.insert(r);
    CHECK(seen.size() == 512);
    CHECK_FALSE((make_candidates(d, 512, 10).array() == a.array()).all());
  }
}

TEST_CASE("1-D Sobol candidates leave no gap of 4/512 or more") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RealArray c = make_candidates(1, 512, seed);
    std::vector<double> v(c.data(), c.data() + c.size());
    std::sort(v.begin(), v.end());
    double gap = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) gap = std::max(gap, v[i] - v[i - 1]);
    CHECK(gap < 4.0 / 512.0);
  }
}

TEST_CASE("GP interpolates observed points and reverts to the prior far away") {
  RealArray x(3, 1);
  x << 0.1, 0.5, 0.9;
  Eigen::VectorXd y(3);
  y << -0.5, 1.2, 0.3;
  const GpFit fit = fit_gp(x, y);
  const auto at = gp_predict(fit, x);
  for (Index i = 0; i < 3; ++i) {
    CHECK(at[static_cast<std::size_t>(i)].mean == doctest::Approx(y(i)).epsilon(1e-4));
    CHECK(at[static_cast<std::size_t>(i)].stddev <= 1e-2);
  }
  RealArray far(1, 1);
  far << 100.0;
  const auto p = gp_predict(fit, far)[0];
  CHECK(std::abs(p.mean) < 1e-6);
  CHECK(p.stddev == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("GP on a 3-point history matches the dense oracle") {
  RealArray x(3, 1);
  x << 0.2, 0.45, 0.8;
  Eigen::VectorXd y(3);
  y << 0.3, -1.0, 0.6;
  const GpFit fit = fit_gp(x, y);
  const RealArray q = make_candidates(1, 32, 1);
  const auto preds = gp_predict(fit, q);
  const auto xs = rows(x);
  const std::vector<double> ys(y.data(), y.data() + 3);
  for (Index i = 0; i < q.rows(); ++i) {
    const auto [m, s] = oracle::gp_posterior(xs, ys, {q(i, 0)}, fit.length_scale, fit.noise);
    CHECK(preds[static_cast<std::size_t>(i)].mean == doctest::Approx(m).epsilon(1e-8));
    CHECK(preds[static_cast<std::size_t>(i)].stddev == doctest::Approx(s).epsilon(1e-8));
  }
}

TEST_CASE("GP length scale maximises the oracle marginal likelihood") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed + 100);
    const std::size_t d = 1 + rng.uniform_index(3);
    const auto h = gen::random_history(rng, d, 2 + rng.uniform_index(9));
    const GpFit fit = fit_gp(h.x_matrix(), h.y_column().col(0));
    const auto xs = rows(h.x_matrix());
    std::vector<double> ys;
    for (const auto& o : h.observations()) ys.push_back(o.y);
    double best_ls = 0.0, best_lm = -1e300;
    for (double ls : kDefaultLengthScales) {
      const double lm = oracle::gp_log_marginal(xs, ys, ls, 1e-6);
      if (lm > best_lm) best_lm = lm, best_ls = ls;
    }
    CHECK(fit.length_scale == best_ls);
    CHECK(fit.log_marginal == doctest::Approx(best_lm).epsilon(1e-6));
  }
}

TEST_CASE("matern52 reference values") {
  CHECK(matern52(0.0, 0.3) == 1.0);
  const double t = std::sqrt(5.0) * 0.5 / 0.5;
  CHECK(matern52(0.5, 0.5) == doctest::Approx((1 + t + t * t / 3) * std::exp(-t)).epsilon(1e-14));
  CHECK_THROWS_AS(fit_gp_fixed(RealArray::Zero(1, 1), Eigen::VectorXd::Zero(1), 0.5, 0.0),
                  tnp::ConfigError);
}

TEST_CASE("run_smbo with T = 0 reports the best initial observation") {
  const auto task = tnp::tasks::quad_family(3);
  SmboConfig cfg;
  cfg.trials = 0;
  cfg.seed = 5;
  const auto r = run_smbo(task, method_by_name("random"), cfg);
  REQUIRE(r.records.size() == 3);
  double best = -1e300;
  for (const auto& rec : r.records) {
    CHECK(rec.initial);
    best = std::max(best, rec.y);
  }
  CHECK(r.best_y == best);
}

TEST_CASE("random and GP runs are reproducible with monotone best-so-far") {
  const auto task = tnp::tasks::quad_family(4);
  for (const char* name : {"random", "gp"}) {
    SmboConfig cfg;
    cfg.trials = 8;
    cfg.seed = 11;
    const auto a = run_smbo(task, method_by_name(name), cfg);
    const auto b = run_smbo(task, method_by_name(name), cfg);
    REQUIRE(a.records.size() == 11);
    const RealArray cand = run_candidates(task, cfg);
    std::set<std::vector<double>> pool;
    for (const auto& r : rows(cand)) pool.insert(r);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].x == b.records[i].x);
      CHECK(a.records[i].y == b.records[i].y);
      CHECK(a.records[i].trial == i);
      CHECK(pool.count(a.records[i].x) == 1);
      if (i > 0) CHECK(a.records[i].best_so_far >= a.records[i - 1].best_so_far);
    }
  }
}

TEST_CASE("every method shares the same random initial design") {
  const auto task = tnp::tasks::quad_family(6);
  SmboConfig cfg;
  cfg.trials = 1;
  cfg.seed = 21;
  const auto a = run_smbo(task, method_by_name("random"), cfg);
  const auto b = run_smbo(task, method_by_name("gp"), cfg);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.records[i].x == b.records[i].x);
}

TEST_CASE("non-finite scores are replaced by the observed minimum") {
  int calls = 0;
  tnp::tasks::BlackBoxTask task("nan", 1, [&calls](std::span<const double> x) {
    ++calls;
    return calls == 4 ? std::nan("") : x[0];
  });
  SmboConfig cfg;
  cfg.trials = 3;
  const auto r = run_smbo(task, method_by_name("random"), cfg);
  double min_before = 1e300;
  for (std::size_t i = 0; i < 3; ++i) min_before = std::min(min_before, r.records[i].y);
  CHECK(r.records[3].y == min_before);
  for (const auto& rec : r.records) CHECK(std::isfinite(rec.y));
}

TEST_CASE("neural methods require a state and registered names resolve") {
  const auto task = tnp::tasks::quad_family(1);
  CHECK_THROWS_AS(run_smbo(task, method_by_name("tnp"), SmboConfig{}), tnp::ConfigError);
  CHECK_THROWS_AS(method_by_name("nope"), tnp::ConfigError);
  for (const char* n : {"random", "gp", "cnp", "tnp", "tnp_no_init", "tnp_no_history"}) {
    CHECK(method_by_name(n).name == n);
  }
  SmboConfig bad;
  bad.n_init = 0;
  CHECK_THROWS_AS(bad.validate(), tnp::ConfigError);
}

TEST_CASE("initial indices are distinct and within range") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto idx = initial_candidate_indices(20, 5, seed);
    CHECK(idx.size() == 5);
    CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 5);
    for (auto i : idx) CHECK(i < 20);
  }
}

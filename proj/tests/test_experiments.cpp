#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kw/experiments.hpp"
#include "kw/spline.hpp"

using namespace kw;

namespace {

ExperimentConfig small(Target t) {
  ExperimentConfig c;
  c.model = t == Target::convex ? "exponential" : "truncated-exponential";
  c.target = t;
  c.n_grid = {50, 100, 200};
  c.replicates = 8;
  c.base_seed = 11;
  return c;
}

const CheckEntry* find(const LemmaReport& r, const std::string& prefix) {
  for (const auto& e : r.checks)
    if (e.name.rfind(prefix, 0) == 0) return &e;
  return nullptr;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("configuration validation") {
  ExperimentConfig c = small(Target::convex);
  CHECK_NOTHROW(validate(c));
  ExperimentConfig one = c;
  one.n_grid = {100};
  CHECK_THROWS_AS(run_convex_rate(one), std::invalid_argument);
  ExperimentConfig zero = c;
  zero.replicates = 0;
  CHECK_THROWS_AS(validate(zero), std::invalid_argument);
  ExperimentConfig desc = c;
  desc.n_grid = {200, 100, 50};
  CHECK_THROWS_AS(validate(desc), std::invalid_argument);
  ExperimentConfig fmt = c;
  fmt.format = "xml";
  CHECK_THROWS_AS(validate(fmt), std::invalid_argument);
  ExperimentConfig mono = small(Target::monotone);
  mono.model = "exponential";
  CHECK_THROWS_AS(validate(mono), std::invalid_argument);
  ExperimentConfig flat = c;
  flat.model = "uniform";
  CHECK_THROWS_AS(validate(flat), std::invalid_argument);
}

TEST_CASE("k rule") {
  // (1000 / log 1000)^{1/3} = 5.25, ^{1/5} = 2.70
  CHECK(k_rule(Target::monotone, 1.0, 1.0, 1000) == 6);
  CHECK(k_rule(Target::convex, 1.0, 1.0, 1000) == 3);
  CHECK(k_rule(Target::monotone, 1e-9, 1.0, 1000) == 1);
  CHECK(k_rule(Target::convex, 1e-9, 1.0, 1000) == 2);
  // beta enters squared
  CHECK(k_rule(Target::monotone, 1.0, 2.0, 1000) == k_rule(Target::monotone, 4.0, 1.0, 1000));
  for (std::size_t n = 100; n < 1000000; n *= 3)
    CHECK(k_rule(Target::convex, 1.0, 1.0, n) <= k_rule(Target::convex, 1.0, 1.0, 3 * n));
}

TEST_CASE("rate fit on an exact power law") {
  std::vector<std::size_t> n = {512, 1024, 2048, 4096};
  std::vector<double> mean;
  for (std::size_t v : n) mean.push_back(2.0 * std::pow(std::log(double(v)) / double(v), 0.4));
  RateFit f = fit_rate(n, mean);
  CHECK(f.slope == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(f.stderr_slope <= 1e-10);
  CHECK(f.pairs.size() == 4);
  CHECK_THROWS(fit_rate({10, 20}, {1, 2}));
  CHECK_THROWS(fit_rate({10, 20, 40}, {1, 2}));
}

TEST_CASE("rate runs are identical across worker counts") {
  for (Target t : {Target::convex, Target::monotone}) {
    ExperimentConfig a = small(t), b = small(t);
    b.workers = 3;
    RateResult ra = t == Target::convex ? run_convex_rate(a) : run_monotone_rate(a);
    RateResult rb = t == Target::convex ? run_convex_rate(b) : run_monotone_rate(b);
    CHECK(rate_csv(ra) == rate_csv(rb));
    CHECK(rate_summary_json(ra) == rate_summary_json(rb));
    REQUIRE(ra.rows.size() == 24);
    for (std::size_t i = 1; i < ra.rows.size(); ++i) {
      const auto &p = ra.rows[i - 1], &q = ra.rows[i];
      CHECK((p.n < q.n || (p.n == q.n && p.replicate + 1 == q.replicate)));
    }
    ExperimentConfig other = small(t);
    other.base_seed = 12;
    RateResult rc = t == Target::convex ? run_convex_rate(other) : run_monotone_rate(other);
    CHECK(rate_csv(ra) != rate_csv(rc));
  }
}

TEST_CASE("replicate table layout") {
  RateResult r = run_convex_rate(small(Target::convex));
  std::istringstream in(rate_csv(r));
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# ", 0) == 0);
  CHECK(line.find("case=convex") != std::string::npos);
  std::getline(in, line);
  CHECK(line == "model,n,k,replicate,sup_F_diff,sup_H_diff,event_An,seed,sqrt_n_sup_F_diff,sqrt_n_sup_H_diff");
  int rows = 0;
  while (std::getline(in, line)) {
    auto f = split(line);
    REQUIRE(f.size() == 10);
    CHECK(f[0] == "exponential");
    double sn = std::sqrt(std::stod(f[1]));
    CHECK(std::stod(f[8]) == doctest::Approx(sn * std::stod(f[4])).epsilon(1e-9));
    CHECK(std::stod(f[4]) >= 0);
    ++rows;
  }
  CHECK(rows == 24);
  RateResult m = run_monotone_rate(small(Target::monotone));
  std::istringstream im(rate_csv(m));
  std::getline(im, line);
  std::getline(im, line);
  CHECK(line == "model,n,k,replicate,sup_F_diff,sup_H_diff,event_An,seed");
  std::getline(im, line);
  CHECK(split(line)[5] == "NA");
}

TEST_CASE("event frequencies with a tiny c0 use k = 2") {
  ExperimentConfig c = small(Target::convex);
  c.c0_sweep = {1e-6};
  c.n_grid = {1000, 20000};
  c.replicates = 100;
  auto rows = run_event_frequency(c);
  REQUIRE(rows.size() == 2);
  for (const auto& e : rows) {
    CHECK(e.k == 2);
    CHECK(e.reps == 100);
    CHECK(e.vacuous == (e.bound > 1.0));
  }
  CHECK(rows.back().freq >= 0.9);
  std::string csv = events_csv(rows, Target::convex);
  CHECK(csv.find("c0,n,k,reps,hits,freq,bound,bound_status\n") != std::string::npos);
  ExperimentConfig none = c;
  none.c0_sweep.clear();
  CHECK_THROWS(run_event_frequency(none));
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<std::atomic<int>> seen(257);
  parallel_for(seen.size(), 4, [&](std::size_t i) { seen[i]++; });
  CHECK(std::all_of(seen.begin(), seen.end(), [](const std::atomic<int>& v) { return v.load() == 1; }));
  CHECK_THROWS_AS(parallel_for(50, 3, [](std::size_t i) { if (i == 17) throw std::runtime_error("x"); }), std::runtime_error);
}

TEST_CASE("lemma suite: argument checks") {
  ExperimentConfig c;
  CHECK_THROWS_AS(run_lemma_suite(c, {}), std::invalid_argument);
  CHECK_THROWS_AS(run_lemma_suite(c, {"uniform"}), std::invalid_argument);
}

TEST_CASE("lemma suite passes and catches a perturbed spline solver") {
  ExperimentConfig c;
  LemmaReport ok = run_lemma_suite(c, {"exponential"});
  for (const auto& e : ok.checks) {
    INFO(e.name);
    CHECK(e.pass);
  }
  CHECK(ok.all_pass());
  std::string js = lemma_json(ok);
  CHECK(js.find("\"pass\": true") != std::string::npos);

  set_spline_fault(1e-3);
  LemmaReport bad;
  try {
    bad = run_lemma_suite(c, {"exponential"});
  } catch (...) {
    set_spline_fault(0.0);
    throw;
  }
  set_spline_fault(0.0);
  const CheckEntry* drop = find(bad, "|t-r|/D^4 drop");
  REQUIRE(drop != nullptr);
  CHECK_FALSE(drop->pass);
  CHECK_FALSE(bad.all_pass());
}

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kw/model.hpp"

namespace kw {

enum class Target { monotone, convex };

struct ExperimentConfig {
  std::string model = "exponential";
  std::vector<double> params;
  std::vector<std::size_t> n_grid;
  long replicates = 100;
  std::uint64_t base_seed = 1;
  double c0 = 1.0;
  Target target = Target::convex;
  double tau_q = 0.75;
  std::string out;
  int workers = 1;
  std::string format = "csv";
  std::vector<double> c0_sweep = {0.5, 1.0, 2.0, 4.0};
};

//! Throws std::invalid_argument on an unusable configuration.
void validate(const ExperimentConfig& c);

//! ceil((c0 beta^2 n / log n)^{1/3}) (monotone) or ^{1/5} (convex), at
//! least 1 (monotone) or 2 (convex).
int k_rule(Target t, double c0, double beta, std::size_t n);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::vector<std::pair<double, double>> pairs;  // (log(log n / n), log mean)
};
//! OLS of log(mean) on log(n^{-1} log n); needs >= 3 points.
RateFit fit_rate(const std::vector<std::size_t>& n, const std::vector<double>& mean);

struct ReplicateRow {
  std::size_t n = 0;
  int k = 0;
  long replicate = 0;
  double sup_F = 0.0;
  double sup_H = 0.0;  // NaN for the monotone case
  bool event = false;
  std::uint64_t seed = 0;
};

struct RateResult {
  std::string model;
  Target target = Target::convex;
  std::vector<ReplicateRow> rows;  // ordered by (n, replicate)
  std::vector<std::size_t> n_grid;
  std::vector<double> mean_F, mean_H;
  RateFit fit_F, fit_H;
};

RateResult run_monotone_rate(const ExperimentConfig& c);
RateResult run_convex_rate(const ExperimentConfig& c);
std::string rate_csv(const RateResult& r);
std::string rate_summary_json(const RateResult& r);

struct EventRow {
  double c0 = 0.0;
  std::size_t n = 0;
  int k = 0;
  long reps = 0;
  long hits = 0;
  double freq = 0.0;
  double bound = 0.0;  // 12k exp(-C beta2^2 n/k^5) for convex, 2k exp(-n beta1^2/80k^3) for monotone
  bool vacuous = false;
};
std::vector<EventRow> run_event_frequency(const ExperimentConfig& c);
std::string events_csv(const std::vector<EventRow>& rows, Target t);

struct CheckEntry {
  std::string name;
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
};
struct LemmaReport {
  std::vector<CheckEntry> checks;
  bool all_pass() const;
};
//! Interpolation error constants 1/8, 1/24, 5/384 and the 19/4 modulus
//! chain for Y of model m on convex meshes with k in k_list (plus the I2
//! bound on the full-support mesh when the support is finite).
std::vector<CheckEntry> spline_constant_checks(const AnalyticModel& m, const std::vector<int>& k_list);

struct TailPoint {
  std::size_t n;
  int k;  // unused by the binomial check
  int j;
  double p;  // binomial check only
  double delta;
  double o1;  // binomial check only
};
struct TailPlan {
  std::vector<TailPoint> l31, l43, l52;
  long reps = 2000;
};
TailPlan default_tail_plan();
std::vector<CheckEntry> tail_checks(const AnalyticModel& m, const TailPlan& plan, std::uint64_t seed);

//! Deterministic inequality ledger plus Monte Carlo tail dominance.
LemmaReport run_lemma_suite(const ExperimentConfig& c, const std::vector<std::string>& models);
std::string lemma_json(const LemmaReport& r);

//! Runs fn(i) for i in [0, count) on `workers` threads; rethrows the first
//! failure after all workers stop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

//! CLI entry point; returns the process exit code (0 ok, 1 check failure,
//! 2 configuration error).
int run_cli(int argc, char** argv);

}  // namespace kw

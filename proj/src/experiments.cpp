#include "kw/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "kw/convex.hpp"
#include "kw/empirical.hpp"
#include "kw/kwbounds.hpp"
#include "kw/monotone.hpp"
#include "kw/rng.hpp"
#include "kw/spline.hpp"

namespace kw {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* target_name(Target t) { return t == Target::monotone ? "monotone" : "convex"; }

}  // namespace

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::size_t first_idx = count;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < first_idx) {
          first_idx = i;
          first = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

void validate(const ExperimentConfig& c) {
  if (c.n_grid.empty()) throw std::invalid_argument("n-grid is empty");
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] < 2) throw std::invalid_argument("n-grid entries must be >= 2");
    if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1])
      throw std::invalid_argument("n-grid must be strictly ascending");
  }
  if (c.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (c.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (!(c.c0 > 0)) throw std::invalid_argument("c0 must be positive");
  if (!(c.tau_q > 0 && c.tau_q < 1)) throw std::invalid_argument("tau quantile must lie in (0, 1)");
  if (c.format != "csv" && c.format != "json") throw std::invalid_argument("format must be csv or json");
  AnalyticModel m = make_model(c.model, c.params, c.tau_q);
  if (c.target == Target::monotone) {
    if (!m.finite_support()) throw std::invalid_argument("monotone case needs finite support");
    if (!m.strictly_decreasing()) throw std::invalid_argument("monotone case needs beta1 > 0");
  } else if (!m.strictly_convex()) {
    throw std::invalid_argument("convex case needs a strictly convex density");
  }
}

int k_rule(Target t, double c0, double beta, std::size_t n) {
  double nn = static_cast<double>(n);
  double base = c0 * beta * beta * nn / std::log(nn);
  double k = std::ceil(std::pow(base, t == Target::monotone ? 1.0 / 3.0 : 1.0 / 5.0));
  return std::max(t == Target::monotone ? 1 : 2, static_cast<int>(k));
}

RateFit fit_rate(const std::vector<std::size_t>& n, const std::vector<double>& mean) {
  if (n.size() != mean.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (n.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 grid points");
  RateFit fit;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    double nn = static_cast<double>(n[i]);
    double x = std::log(std::log(nn) / nn), y = std::log(mean[i]);
    fit.pairs.emplace_back(x, y);
    sx += x;
    sy += y;
  }
  const double m = static_cast<double>(n.size());
  double mx = sx / m, my = sy / m, sxx = 0, sxy = 0;
  for (auto [x, y] : fit.pairs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (auto [x, y] : fit.pairs) {
    double e = y - fit.intercept - fit.slope * x;
    sse += e * e;
  }
  fit.stderr_slope = std::sqrt(sse / (m - 2.0) / sxx);
  return fit;
}

namespace {

template <class Body>
RateResult run_rate(const ExperimentConfig& c, Target target, Body body) {
  ExperimentConfig cc = c;
  cc.target = target;
  validate(cc);
  if (c.n_grid.size() < 3) throw std::invalid_argument("rate fit needs at least 3 grid points");
  AnalyticModel m = make_model(c.model, c.params, c.tau_q);
  RateResult res;
  res.model = m.name();
  res.target = target;
  res.n_grid = c.n_grid;
  const std::size_t R = static_cast<std::size_t>(c.replicates);
  res.rows.resize(c.n_grid.size() * R);
  parallel_for(res.rows.size(), c.workers, [&](std::size_t idx) {
    std::size_t ni = idx / R;
    long r = static_cast<long>(idx % R);
    ReplicateRow& row = res.rows[idx];
    row.n = c.n_grid[ni];
    row.replicate = r;
    row.seed = replicate_seed(c.base_seed, row.n, static_cast<std::uint64_t>(r));
    try {
      body(m, row);
    } catch (const std::exception& e) {
      throw std::runtime_error("replicate n=" + std::to_string(row.n) + " r=" + std::to_string(r) +
                               ": " + e.what());
    }
  });
  for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
    double sf = 0, sh = 0;
    for (std::size_t r = 0; r < R; ++r) {
      sf += res.rows[ni * R + r].sup_F;
      sh += res.rows[ni * R + r].sup_H;
    }
    res.mean_F.push_back(sf / static_cast<double>(R));
    res.mean_H.push_back(sh / static_cast<double>(R));
  }
  res.fit_F = fit_rate(res.n_grid, res.mean_F);
  if (target == Target::convex) res.fit_H = fit_rate(res.n_grid, res.mean_H);
  return res;
}

}  // namespace

RateResult run_monotone_rate(const ExperimentConfig& c) {
  AnalyticModel probe = make_model(c.model, c.params, c.tau_q);
  double beta1 = probe.strictly_decreasing() ? constants(probe).beta1 : 0.0;
  return run_rate(c, Target::monotone, [&](const AnalyticModel& m, ReplicateRow& row) {
    EmpiricalData d = sample(m, row.n, row.seed);
    PiecewiseLinear F_hat = lcm(d);
    row.sup_F = sup_norm(F_hat.to_piecewise(), d.ecdf_piecewise(), 0.0, m.support_end());
    row.sup_H = std::numeric_limits<double>::quiet_NaN();
    row.k = k_rule(Target::monotone, c.c0, beta1, row.n);
    row.event = concavity_event(d, knot_mesh_monotone(m, row.k));
  });
}

RateResult run_convex_rate(const ExperimentConfig& c) {
  AnalyticModel probe = make_model(c.model, c.params, c.tau_q);
  double beta2 = probe.strictly_convex() ? constants(probe).beta2 : 0.0;
  return run_rate(c, Target::convex, [&](const AnalyticModel& m, ReplicateRow& row) {
    EmpiricalData d = sample(m, row.n, row.seed);
    ConvexLse lse = fit_lse(d);
    const double tau = m.tau();
    row.sup_F = sup_norm(lse.F_piecewise(), d.ecdf_piecewise(), 0.0, tau);
    row.sup_H = sup_norm(lse.H_piecewise(), d.Yn_piecewise(), 0.0, tau);
    row.k = k_rule(Target::convex, c.c0, beta2, row.n);
    row.event = convexity_event_An(d, knot_mesh_convex(m, row.k));
  });
}

std::string rate_csv(const RateResult& r) {
  std::ostringstream os;
  const bool convex = r.target == Target::convex;
  os << "# kwrate replicate table v1; case=" << target_name(r.target) << "\n";
  os << "model,n,k,replicate,sup_F_diff,sup_H_diff,event_An,seed";
  if (convex) os << ",sqrt_n_sup_F_diff,sqrt_n_sup_H_diff";
  os << "\n";
  for (const auto& row : r.rows) {
    os << r.model << ',' << row.n << ',' << row.k << ',' << row.replicate << ',' << fmt(row.sup_F)
       << ',' << fmt(row.sup_H) << ',' << (row.event ? 1 : 0) << ',' << row.seed;
    if (convex) {
      double sn = std::sqrt(static_cast<double>(row.n));
      os << ',' << fmt(sn * row.sup_F) << ',' << fmt(sn * row.sup_H);
    }
    os << "\n";
  }
  return os.str();
}

std::string rate_summary_json(const RateResult& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["case"] = target_name(r.target);
  auto fit_json = [](const RateFit& f) {
    nlohmann::ordered_json o;
    o["slope"] = f.slope;
    o["intercept"] = f.intercept;
    o["stderr"] = f.stderr_slope;
    return o;
  };
  nlohmann::ordered_json per_n = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.n_grid.size(); ++i) {
    nlohmann::ordered_json e;
    double sn = std::sqrt(static_cast<double>(r.n_grid[i]));
    e["n"] = r.n_grid[i];
    e["mean_sup_F_diff"] = r.mean_F[i];
    if (r.target == Target::convex) {
      e["mean_sup_H_diff"] = r.mean_H[i];
      e["sqrt_n_mean_sup_F_diff"] = sn * r.mean_F[i];
      e["sqrt_n_mean_sup_H_diff"] = sn * r.mean_H[i];
    }
    per_n.push_back(e);
  }
  j["per_n"] = per_n;
  j["fit_F"] = fit_json(r.fit_F);
  if (r.target == Target::convex) j["fit_H"] = fit_json(r.fit_H);
  return j.dump(2);
}

std::vector<EventRow> run_event_frequency(const ExperimentConfig& c) {
  validate(c);
  AnalyticModel m = make_model(c.model, c.params, c.tau_q);
  ModelConstants mc = constants(m);
  const bool convex = c.target == Target::convex;
  const double beta = convex ? mc.beta2 : mc.beta1;
  const std::size_t R = static_cast<std::size_t>(c.replicates);
  const std::size_t C = c.c0_sweep.size();
  if (C == 0) throw std::invalid_argument("c0 sweep is empty");

  // meshes per (c0, n)
  std::vector<KnotMesh> meshes(C * c.n_grid.size());
  for (std::size_t ci = 0; ci < C; ++ci)
    for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
      int k = k_rule(c.target, c.c0_sweep[ci], beta, c.n_grid[ni]);
      meshes[ci * c.n_grid.size() + ni] = convex ? knot_mesh_convex(m, k) : knot_mesh_monotone(m, k);
    }
  // one sample per (n, replicate), shared across the c0 sweep
  std::vector<unsigned char> hit(c.n_grid.size() * R * C, 0);
  parallel_for(c.n_grid.size() * R, c.workers, [&](std::size_t idx) {
    std::size_t ni = idx / R, r = idx % R;
    std::size_t n = c.n_grid[ni];
    EmpiricalData d = sample(m, n, replicate_seed(c.base_seed, n, r));
    for (std::size_t ci = 0; ci < C; ++ci) {
      const KnotMesh& mesh = meshes[ci * c.n_grid.size() + ni];
      bool ev = convex ? convexity_event_An(d, mesh) : concavity_event(d, mesh);
      hit[idx * C + ci] = ev ? 1 : 0;
    }
  });
  std::vector<EventRow> rows;
  for (std::size_t ci = 0; ci < C; ++ci)
    for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
      EventRow e;
      e.c0 = c.c0_sweep[ci];
      e.n = c.n_grid[ni];
      e.k = meshes[ci * c.n_grid.size() + ni].k;
      e.reps = c.replicates;
      for (std::size_t r = 0; r < R; ++r) e.hits += hit[(ni * R + r) * C + ci];
      e.freq = static_cast<double>(e.hits) / static_cast<double>(R);
      double nn = static_cast<double>(e.n);
      e.bound = convex ? bernstein_bound_L33(nn, e.k, beta) : kw_tail_bound(nn, e.k, beta);
      e.vacuous = e.bound > 1.0;
      rows.push_back(e);
    }
  return rows;
}

std::string events_csv(const std::vector<EventRow>& rows, Target t) {
  std::ostringstream os;
  os << "# kwrate event table v1; case=" << target_name(t) << "\n";
  os << "c0,n,k,reps,hits,freq,bound,bound_status\n";
  for (const auto& e : rows)
    os << fmt(e.c0) << ',' << e.n << ',' << e.k << ',' << e.reps << ',' << e.hits << ','
       << fmt(e.freq) << ',' << fmt(e.bound) << ',' << (e.vacuous ? "vacuous" : "informative")
       << "\n";
  return os.str();
}

}  // namespace kw

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "kw/experiments.hpp"
#include "kw/kwbounds.hpp"
#include "kw/monotone.hpp"
#include "kw/rng.hpp"
#include "kw/spline.hpp"

namespace kw {

namespace {

// Rounding floor of the tridiagonal solve, which grows like k; needed where
// the exact bound is 0 (f'' = 0) or attained (f'' constant).
double spline_rounding(int k, double tau) {
  return 8.0 * std::numeric_limits<double>::epsilon() * k * std::max(1.0, tau);
}

CheckEntry entry(std::string name, double lhs, double rhs, double allowance = 0.0) {
  CheckEntry e;
  e.name = std::move(name);
  e.lhs = lhs;
  e.rhs = rhs;
  e.margin = rhs - lhs;
  e.pass = lhs <= rhs + allowance;
  return e;
}

double sup_abs(const AnalyticModel& m, double (AnalyticModel::*fn)(double) const, double a, double b) {
  return grid_extremum([&](double t) { return std::abs((m.*fn)(t)); }, a, b, true).value;
}

}  // namespace

bool LemmaReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& e) { return e.pass; });
}

std::vector<CheckEntry> spline_constant_checks(const AnalyticModel& m, const std::vector<int>& k_list) {
  std::vector<CheckEntry> out;
  const double tau = m.tau();
  const double sup_fp = sup_abs(m, &AnalyticModel::fprime, 0.0, tau);
  const double sup_fpp = sup_abs(m, &AnalyticModel::fsecond, 0.0, tau);
  RealFn F = [&](double t) { return m.F(t); };
  RealFn f = [&](double t) { return m.f(t); };
  RealFn Y = [&](double t) { return m.Y(t); };
  RealFn negY = [&](double t) { return -m.Y(t); };
  RealFn negF = [&](double t) { return -m.F(t); };
  RealFn negf = [&](double t) { return -m.f(t); };
  Piecewise zero;
  zero.starts = {0.0};
  zero.coef = {{0.0, 0.0, 0.0, 0.0}};
  const std::string tag = "/" + m.name() + "/k=";

  for (int k : k_list) {
    KnotMesh mesh = knot_mesh_convex(m, k);
    const double a = mesh.mesh;
    const std::string sfx = tag + std::to_string(k);
    const double allow = spline_rounding(k, tau);

    double e2 = sup_norm(broken_line(F, mesh).to_piecewise(), F, f, 0.0, tau);
    out.push_back(entry("I2 1/8" + sfx, e2, a * a * sup_fp / 8.0, allow));

    CubicSpline s = interpolate_Y(m, mesh);
    Piecewise spw = s.to_piecewise();
    double e1 = sup_norm(spw.derivative(), F, f, 0.0, tau);
    out.push_back(entry("I4 derivative 1/24" + sfx, e1, a * a * a * sup_fpp / 24.0, allow));
    double e0 = sup_norm(spw, Y, F, 0.0, tau);
    out.push_back(entry("I4 value 5/384" + sfx, e0, 5.0 / 384.0 * a * a * a * a * sup_fpp, allow));

    DistBoundReport d = dist_bound_validator(zero, negY, negF, negf, mesh);
    out.push_back(entry("I4 derivative 19/4 omega" + sfx, d.deriv_err, d.deriv_bound, allow));
    out.push_back(entry("I4 value 19/8 |a| omega" + sfx, d.value_err, d.value_bound, allow));

    if (m.finite_support()) {
      KnotMesh mm = knot_mesh_monotone(m, k);
      double end = m.support_end();
      double sfp = sup_abs(m, &AnalyticModel::fprime, 0.0, end);
      double em = sup_norm(broken_line(F, mm).to_piecewise(), F, f, 0.0, end);
      out.push_back(entry("I2 1/8 full-support mesh" + sfx, em, mm.mesh * mm.mesh * sfp / 8.0, allow));
    }
  }
  return out;
}

TailPlan default_tail_plan() {
  TailPlan p;
  // Exp(1), k = 80 = 5 gamma1~ R, middle interval
  p.l31 = {{10000, 80, 40, 0, 12.0, 0}, {10000, 80, 40, 0, 16.0, 0}, {20000, 80, 40, 0, 10.0, 0}};
  p.l43 = {{10000, 80, 40, 0, 350.0, 0}, {10000, 80, 40, 0, 450.0, 0}, {20000, 80, 40, 0, 300.0, 0}};
  p.l52 = {{1000, 0, 0, 0.05, 0.3, 0.0}, {10000, 0, 0, 0.01, 0.25, 0.0}, {2000, 0, 0, 0.02, 0.3, -0.1},
           {10000, 0, 0, 0.01, 0.5, 0.0}, {10000, 0, 0, 0.01, 0.5, -0.1}};
  return p;
}

std::vector<CheckEntry> tail_checks(const AnalyticModel& m, const TailPlan& plan, std::uint64_t seed) {
  std::vector<CheckEntry> out;
  auto add = [&](const std::string& name, const TailCheck& t) {
    CheckEntry e = entry(name, t.freq, t.bound + t.slack);
    e.pass = e.pass && t.bound < 1.0;  // only nonvacuous points count
    out.push_back(e);
  };
  for (const auto& q : plan.l31)
    add("tail L31 n=" + std::to_string(q.n) + " delta=" + std::to_string(q.delta),
        tail_L31(m, q.n, q.k, q.j, q.delta, plan.reps, seed));
  for (const auto& q : plan.l43)
    add("tail L43 n=" + std::to_string(q.n) + " delta=" + std::to_string(q.delta),
        tail_L43(m, q.n, q.k, q.j, q.delta, plan.reps, seed));
  for (const auto& q : plan.l52)
    add("tail L52 n=" + std::to_string(q.n) + " p=" + std::to_string(q.p) + " delta=" + std::to_string(q.delta) + " o1=" + std::to_string(q.o1),
        tail_L52(q.n, q.p, q.delta, q.o1, plan.reps, seed));
  return out;
}

LemmaReport run_lemma_suite(const ExperimentConfig& c, const std::vector<std::string>& models) {
  if (models.empty()) throw std::invalid_argument("lemma suite: empty model list");
  LemmaReport rep;
  auto push = [&](CheckEntry e) { rep.checks.push_back(std::move(e)); };

  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    const std::string& name = models[mi];
    AnalyticModel m = make_model(name, name == c.model ? c.params : std::vector<double>{}, c.tau_q);
    if (!m.strictly_convex()) throw std::invalid_argument("lemma suite needs convex models: " + name);
    ModelConstants mc = constants(m);
    const std::string tag = "/" + name;

    // mesh ratio for k >= 5 gamma1~ R
    int kth = static_cast<int>(std::ceil(5.0 * mc.gamma1_tilde * mc.R - 1e-9));
    double worst = 0.0;
    std::vector<int> ks;
    for (int k = std::max(kth, 2); k <= std::max(kth, 2) + 200; ++k) ks.push_back(k);
    for (int k : {4 * kth, 10 * kth}) ks.push_back(std::max(k, 2));
    for (int k : ks) {
      MeshRatio r = mesh_ratio_check(m, knot_mesh_convex(m, k));
      worst = std::max({worst, r.max_f_ratio, r.max_delta_ratio});
    }
    push(entry("mesh ratio for k >= 5 gamma1~ R" + tag, worst, 2.0));
    push(entry("first k with mesh ratio <= 2" + tag, smallest_ratio_k(m), std::max(kth, 2)));

    TjRjReport tr = tj_rj_ratio_check(m, {25, 50, 100, 200});
    CheckEntry drop = entry("|t-r|/D^4 drop k=25..200" + tag, tr.ratio.back(), tr.ratio.front() / 4.0);
    drop.pass = drop.pass && tr.decreasing;
    push(drop);
    double worst20 = 0.0;
    for (std::size_t i = 0; i < tr.k.size(); ++i) worst20 = std::max(worst20, tr.max_abs[i] / tr.bound20[i]);
    push(entry("max|t-r| <= |a|^4 sup f''/24 (ratio)" + tag, worst20, 1.0));

    // Taylor bracket on random pairs; allowance covers rounding of R(s,t)
    double worst44 = -std::numeric_limits<double>::infinity(), allow44 = 0.0;
    bool ok44 = true;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      double u1 = uniform_open(c.base_seed ^ 0x44, 2 * i), u2 = uniform_open(c.base_seed ^ 0x44, 2 * i + 1);
      double s = m.tau() * std::min(u1, u2), t = m.tau() * std::max(u1, u2);
      if (!(t > s)) continue;
      TaylorBracket b = taylor_bounds_R(m, s, t);
      double viol = std::max(b.lower - b.value, b.value - b.upper);
      // closed-form Y cancels O(1) terms, so the error floor is absolute
      double allow = 4.0 * std::numeric_limits<double>::epsilon() *
                     (1.0 + std::abs(0.5 * (m.F(t) + m.F(s)) * (t - s)) + std::abs(m.Y(t)) + std::abs(m.Y(s)));
      if (viol > allow) ok44 = false;
      if (viol - allow > worst44 - allow44) {
        worst44 = viol;
        allow44 = allow;
      }
    }
    CheckEntry e44 = entry("Taylor bracket of R on 1000 pairs" + tag, worst44, allow44);
    e44.pass = ok44;
    push(e44);

    KnotMesh m50 = knot_mesh_convex(m, 50);
    // equality holds when f'' is constant; R(s,t)/D^3 carries an eps/D^3 rounding floor
    double worst45 = -std::numeric_limits<double>::infinity();
    BoundPair at{0, 0};
    double allow45 = 0.0;
    bool ok45 = true;
    for (int j = 1; j < 50; ++j) {
      BoundPair bp = slope_difference_bound(m, m50, j);
      double dj = m50.delta(j), dn = m50.delta(j + 1);
      double allow = 16.0 * std::numeric_limits<double>::epsilon() *
                     (1.0 + std::abs(m.Y(m50.knots[j + 1]))) * (1.0 / (dj * dj * dj) + 1.0 / (dn * dn * dn));
      if (bp.lhs - bp.rhs > allow) ok45 = false;
      if (bp.lhs - bp.rhs - allow > worst45) {
        worst45 = bp.lhs - bp.rhs - allow;
        at = bp;
        allow45 = allow;
      }
    }
    CheckEntry e45 = entry("slope difference bound, k=50 all j" + tag, at.lhs, at.rhs, allow45);
    e45.pass = ok45;
    push(e45);

    // T = R + W + b and B_j = 12 T_j / D^3 on one sample
    EmpiricalData d = sample(m, 1000, c.base_seed);
    KnotMesh m20 = knot_mesh_convex(m, 20);
    LemmaQuantities q = compute_quantities(d, m, m20);
    double dec = 0.0, bcons = 0.0;
    SlopePair sp = second_derivative_slopes(interpolate_Yn(d, m20));
    for (std::size_t j = 0; j < q.T.size(); ++j) {
      dec = std::max(dec, std::abs((q.T[j] - q.r[j]) - ((q.R[j] - q.r[j]) + q.W[j] + q.b[j])));
      bcons = std::max(bcons, std::abs(q.B[j] - sp.from_coef[j]) / std::max(1.0, std::abs(q.B[j])));
    }
    push(entry("T = R + W + b residual" + tag, dec, 1e-12));
    push(entry("B_j = 12 T_j / D^3 vs spline coefficients (relative)" + tag, bcons, 1e-9));

    // variance step of the Bernstein argument
    KnotMesh mk = knot_mesh_convex(m, std::max(kth, 2));
    double worstvar = 0.0;
    for (int j = 1; j <= mk.k; ++j) {
      double p = mk.cell_mass, fs = p / mk.delta(j);
      worstvar = std::max(worstvar, variance_h(m, mk.knots[j - 1], mk.knots[j]) / (p * p * p / (6.0 * fs * fs)));
    }
    push(entry("Var h <= p^3/(6 f*^2) (ratio)" + tag, worstvar, 1.0));

    for (auto& e : spline_constant_checks(m, {5, 20, 80, 200})) push(e);

    if (mi == 0)
      for (auto& e : tail_checks(m, default_tail_plan(), c.base_seed)) push(e);
  }
  return rep;
}

std::string lemma_json(const LemmaReport& r) {
  nlohmann::ordered_json j;
  j["pass"] = r.all_pass();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : r.checks) {
    nlohmann::ordered_json o;
    o["name"] = e.name;
    o["pass"] = e.pass;
    o["lhs"] = e.lhs;
    o["rhs"] = e.rhs;
    o["margin"] = e.margin;
    arr.push_back(o);
  }
  j["checks"] = arr;
  return j.dump(2);
}

}  // namespace kw

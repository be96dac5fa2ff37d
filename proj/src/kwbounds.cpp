#include "kw/kwbounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kw/numeric.hpp"
#include "kw/rng.hpp"

namespace kw {

double h_st(double s, double t, double x) { return (x > s && x <= t) ? x - 0.5 * (s + t) : 0.0; }

double R_value(const AnalyticModel& m, double s, double t) {
  return 0.5 * (m.F(t) + m.F(s)) * (t - s) - (m.Y(t) - m.Y(s));
}

double variance_h(const AnalyticModel& m, double s, double t) {
  const int N = 2000;  // composite Simpson, even N
  const double mid = 0.5 * (s + t), h = (t - s) / N;
  double acc = 0.0;
  for (int i = 0; i <= N; ++i) {
    double x = s + i * h;
    double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * (x - mid) * (x - mid) * m.f(x);
  }
  double e2 = acc * h / 3.0;
  double e1 = R_value(m, s, t);
  return e2 - e1 * e1;
}

double mean_value_point(const AnalyticModel& m, const KnotMesh& mesh, int j) {
  double s = mesh.knots[j - 1], t = mesh.knots[j];
  double target = (m.F(t) - m.F(s)) / (t - s);
  if (m.f(s) == m.f(t)) return 0.5 * (s + t);
  return bisect([&](double a) { return m.f(a) - target; }, s, t, 1e-14);
}

LemmaQuantities compute_quantities(const EmpiricalData& d, const AnalyticModel& m,
                                   const KnotMesh& mesh) {
  return compute_quantities(d, m, mesh, interpolate_Y(m, mesh));
}

LemmaQuantities compute_quantities(const EmpiricalData& d, const AnalyticModel& m,
                                   const KnotMesh& mesh, const CubicSpline& ys) {
  CubicSpline hn = interpolate_Yn(d, mesh);
  LemmaQuantities q;
  for (int j = 1; j <= mesh.k; ++j) {
    double s = mesh.knots[j - 1], t = mesh.knots[j], D = t - s;
    double dYn = d.Yn(t) - d.Yn(s);
    double dY = m.Y(t) - m.Y(s);
    double T = 0.5 * (hn.slopes[j - 1] + hn.slopes[j]) * D - dYn;
    double R = 0.5 * (d.ecdf(s) + d.ecdf(t)) * D - dYn;
    double tt = 0.5 * (ys.slopes[j - 1] + ys.slopes[j]) * D - dY;
    double r = 0.5 * (m.F(s) + m.F(t)) * D - dY;
    q.T.push_back(T);
    q.R.push_back(R);
    q.t.push_back(tt);
    q.r.push_back(r);
    q.W.push_back(T - tt - (R - r));
    q.b.push_back(tt - r);
    q.B.push_back(12.0 * T / (D * D * D));
    q.B_tilde.push_back(12.0 * R / (D * D * D));
    q.delta.push_back(D);
    double fs = (m.F(t) - m.F(s)) / D;
    q.fstar.push_back(fs);
    q.astar.push_back(mean_value_point(m, mesh, j));
  }
  return q;
}

TaylorBracket taylor_bounds_R(const AnalyticModel& m, double s, double t) {
  if (!(t > s)) throw std::invalid_argument("taylor_bounds_R: need s < t");
  auto fpp = [&](double x) { return m.fsecond(x); };
  double lo = grid_extremum(fpp, s, t, false, 1000).value;
  double hi = grid_extremum(fpp, s, t, true, 1000).value;
  double u = t - s;
  double base = m.fprime(s) * u * u * u / 12.0;
  return {base + u * u * u * u / 24.0 * lo, base + u * u * u * u / 24.0 * hi, R_value(m, s, t)};
}

BoundPair slope_difference_bound(const AnalyticModel& m, const KnotMesh& mesh, int j) {
  if (j < 1 || j >= mesh.k) throw std::invalid_argument("slope_difference_bound: 1 <= j <= k-1");
  auto fpp = [&](double x) { return m.fsecond(x); };
  double s = mesh.knots[j - 1], t = mesh.knots[j], u = mesh.knots[j + 1];
  double Dj = t - s, Dn = u - t;
  double lhs = R_value(m, s, t) / (Dj * Dj * Dj) - R_value(m, t, u) / (Dn * Dn * Dn);
  double sup_j = grid_extremum(fpp, s, t, true, 1000).value;
  double inf_n = grid_extremum(fpp, t, u, false, 1000).value;
  double astar = mean_value_point(m, mesh, j);
  double rhs = -m.fsecond(astar) * Dj / 12.0 + (sup_j * Dj - inf_n * Dn) / 24.0;
  return {lhs, rhs};
}

MeshRatio mesh_ratio_check(const AnalyticModel& m, const KnotMesh& mesh) {
  MeshRatio r{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (int j = 1; j <= mesh.k; ++j) {
    double fr = m.f(mesh.knots[j - 1]) / m.f(mesh.knots[j]);
    r.max_f_ratio = std::max(r.max_f_ratio, fr);
    r.min_f_ratio = std::min(r.min_f_ratio, fr);
    if (j < mesh.k) r.max_delta_ratio = std::max(r.max_delta_ratio, mesh.delta(j + 1) / mesh.delta(j));
  }
  return r;
}

int smallest_ratio_k(const AnalyticModel& m, int kmax) {
  for (int k = 2; k <= kmax; ++k) {
    MeshRatio r = mesh_ratio_check(m, knot_mesh_convex(m, k));
    if (r.max_f_ratio <= 2.0 && r.max_delta_ratio <= 2.0) return k;
  }
  return -1;
}

double bernstein_bound_L31(double n, double delta, double p, double fs) {
  return 2.0 * std::exp(-3.0 * n * delta * delta * fs * fs * p * p * p / (1.0 + p * delta * fs));
}

double bernstein_bound_L32(double n, double delta, double p, double fs) {
  return 6.0 * std::exp(-(n * delta * delta * fs * fs * p * p * p / 100.0) /
                        (1.0 + p * delta * fs / 30.0));
}

double bernstein_bound_L33(double n, double k, double beta2) {
  double p = 1.0 / k;
  return 12.0 * k * std::exp(-kL33Constant * beta2 * beta2 * n * std::pow(p, 5));
}

double bernstein_bound_L43(double n, double delta, double p, double fs) {
  return 4.0 * std::exp(-(n * delta * delta * fs * fs * p * p * p / 100.0) /
                        (1.0 + p * delta * fs / 30.0));
}

double binomial_bound_L52(double n, double p, double delta, double o1) {
  return 2.0 * std::exp(-0.5 * n * p * delta * delta * (1.0 + o1));
}

TjRjReport tj_rj_ratio_check(const AnalyticModel& m, const std::vector<int>& k_list) {
  TjRjReport rep;
  const double sup_fpp = grid_extremum([&](double x) { return std::abs(m.fsecond(x)); }, 0.0,
                                       m.tau(), true).value;
  for (int k : k_list) {
    KnotMesh mesh = knot_mesh_convex(m, k);
    CubicSpline ys = interpolate_Y(m, mesh);
    double mx = 0.0, ratio = 0.0;
    for (int j = 1; j <= k; ++j) {
      double s = mesh.knots[j - 1], t = mesh.knots[j], D = t - s;
      double tt = 0.5 * (ys.slopes[j - 1] + ys.slopes[j]) * D - (m.Y(t) - m.Y(s));
      double diff = std::abs(tt - R_value(m, s, t));
      mx = std::max(mx, diff);
      ratio = std::max(ratio, diff / (D * D * D * D));
    }
    double a4 = std::pow(mesh.mesh, 4);
    rep.k.push_back(k);
    rep.max_abs.push_back(mx);
    rep.ratio.push_back(ratio);
    rep.bound20.push_back(a4 * sup_fpp / 24.0);
    if (mx > rep.bound20.back()) rep.bound_ok = false;
    if (rep.ratio.size() > 1 && !(ratio < rep.ratio[rep.ratio.size() - 2])) rep.decreasing = false;
  }
  rep.drop4 = !rep.ratio.empty() && rep.ratio.back() < rep.ratio.front() / 4.0;
  return rep;
}

namespace {

TailCheck finish(long hits, long reps, double bound) {
  TailCheck c{};
  c.hits = hits;
  c.reps = reps;
  c.freq = static_cast<double>(hits) / static_cast<double>(reps);
  c.bound = bound;
  double b = std::min(1.0, bound);
  c.slack = 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(reps));
  c.ok = c.freq <= bound + c.slack;
  return c;
}

}  // namespace

TailCheck tail_L31(const AnalyticModel& m, std::size_t n, int k, int j, double delta, long reps,
                   std::uint64_t seed) {
  KnotMesh mesh = knot_mesh_convex(m, k);
  double s = mesh.knots[j - 1], t = mesh.knots[j];
  double p = mesh.cell_mass;
  double fs = p / mesh.delta(j);
  double r = R_value(m, s, t);
  double thr = delta * p * p * p;
  long hits = 0;
  for (long rep = 0; rep < reps; ++rep) {
    std::uint64_t sd = replicate_seed(seed, n, static_cast<std::uint64_t>(rep));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += h_st(s, t, m.Finv(uniform_open(sd, i)));
    if (std::abs(acc / static_cast<double>(n) - r) > thr) ++hits;
  }
  return finish(hits, reps, bernstein_bound_L31(static_cast<double>(n), delta, p, fs));
}

TailCheck tail_L43(const AnalyticModel& m, std::size_t n, int k, int j, double delta, long reps,
                   std::uint64_t seed) {
  KnotMesh mesh = knot_mesh_convex(m, k);
  CubicSpline ys = interpolate_Y(m, mesh);
  double p = mesh.cell_mass;
  double fs = p / mesh.delta(j);
  double thr = delta * p * p * p;
  long hits = 0;
  for (long rep = 0; rep < reps; ++rep) {
    EmpiricalData d = sample(m, n, replicate_seed(seed, n, static_cast<std::uint64_t>(rep)));
    LemmaQuantities q = compute_quantities(d, m, mesh, ys);
    if (std::abs(q.W[static_cast<std::size_t>(j - 1)]) >= thr) ++hits;
  }
  return finish(hits, reps, bernstein_bound_L43(static_cast<double>(n), delta, p, fs));
}

TailCheck tail_L52(std::size_t n, double p, double delta, double o1, long reps,
                   std::uint64_t seed) {
  long hits = 0;
  for (long rep = 0; rep < reps; ++rep) {
    std::uint64_t sd = replicate_seed(seed, n, static_cast<std::uint64_t>(rep));
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < n; ++i) cnt += uniform_open(sd, i) <= p;
    double g = static_cast<double>(cnt) / static_cast<double>(n);
    if (std::abs(g - p) >= delta * p) ++hits;
  }
  return finish(hits, reps, binomial_bound_L52(static_cast<double>(n), p, delta, o1));
}

}  // namespace kw

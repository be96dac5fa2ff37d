#pragma once

#include <cstdint>
#include <vector>

#include "kw/empirical.hpp"
#include "kw/model.hpp"
#include "kw/spline.hpp"

namespace kw {

//! Per-interval quantities, index j-1 for interval j = 1..k.
struct LemmaQuantities {
  std::vector<double> T, R, t, r, W, b;
  std::vector<double> B, B_tilde;
  std::vector<double> delta;
  std::vector<double> fstar;  // f(a_j*), f(a_j*) delta_j = F(tau)/k
  std::vector<double> astar;
};

LemmaQuantities compute_quantities(const EmpiricalData& d, const AnalyticModel& m,
                                   const KnotMesh& mesh);
//! Same, reusing the complete spline of Y on this mesh.
LemmaQuantities compute_quantities(const EmpiricalData& d, const AnalyticModel& m,
                                   const KnotMesh& mesh, const CubicSpline& y_spline);

//! h_{s,t}(x) = (x - (s+t)/2) 1_{(s,t]}(x)
double h_st(double s, double t, double x);
//! R(s,t) = 0.5 (F(t) + F(s)) (t - s) - int_s^t F
double R_value(const AnalyticModel& m, double s, double t);
//! Exact-quadrature Var h_{s,t}(X).
double variance_h(const AnalyticModel& m, double s, double t);

//! Mean-value point a* in [a_{j-1}, a_j] with f(a*) = cell_mass / delta_j.
double mean_value_point(const AnalyticModel& m, const KnotMesh& mesh, int j);

struct TaylorBracket {
  double lower, upper, value;
};
//! f'(s)(t-s)^3/12 + (t-s)^4/24 * {inf, sup} f'' on [s, t], and R(s,t).
TaylorBracket taylor_bounds_R(const AnalyticModel& m, double s, double t);

struct BoundPair {
  double lhs, rhs;
};
//! lhs = r_j/D_j^3 - r_{j+1}/D_{j+1}^3,
//! rhs = -f''(a_j*) D_j/12 + (sup_{I_j} f'' D_j - inf_{I_{j+1}} f'' D_{j+1})/24.
BoundPair slope_difference_bound(const AnalyticModel& m, const KnotMesh& mesh, int j);

struct MeshRatio {
  double max_f_ratio;      // max_j f(a_{j-1}) / f(a_j)
  double max_delta_ratio;  // max_j D_{j+1} / D_j
  double min_f_ratio;
};
MeshRatio mesh_ratio_check(const AnalyticModel& m, const KnotMesh& mesh);
//! Smallest k >= 2 whose convex mesh has both ratios <= 2.
int smallest_ratio_k(const AnalyticModel& m, int kmax = 100000);

double bernstein_bound_L31(double n, double delta, double p, double fstar);
double bernstein_bound_L32(double n, double delta, double p, double fstar);
inline constexpr double kL33Constant = 1.0 / 4246732800.0;
double bernstein_bound_L33(double n, double k, double beta2);
double bernstein_bound_L43(double n, double delta, double p, double fstar);
//! 2 exp(-0.5 n p delta^2 (1 + o1))
double binomial_bound_L52(double n, double p, double delta, double o1 = 0.0);

struct TjRjReport {
  std::vector<int> k;
  std::vector<double> max_abs;  // max_j |t_j - r_j|
  std::vector<double> ratio;    // max_j |t_j - r_j| / D_j^4
  std::vector<double> bound20;  // |a|^4 sup f'' / 24
  bool bound_ok = true;
  bool decreasing = true;
  bool drop4 = false;  // last ratio < first / 4
};
TjRjReport tj_rj_ratio_check(const AnalyticModel& m, const std::vector<int>& k_list);

//! Monte Carlo tail frequency against its analytic bound.
struct TailCheck {
  double freq;
  double bound;
  long hits;
  long reps;
  double slack;  // 3 binomial standard deviations at the bound
  bool ok;
};
TailCheck tail_L31(const AnalyticModel& m, std::size_t n, int k, int j, double delta, long reps,
                   std::uint64_t seed);
TailCheck tail_L43(const AnalyticModel& m, std::size_t n, int k, int j, double delta, long reps,
                   std::uint64_t seed);
TailCheck tail_L52(std::size_t n, double p, double delta, double o1, long reps, std::uint64_t seed);

}  // namespace kw

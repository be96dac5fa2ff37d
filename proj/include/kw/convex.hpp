#pragma once

#include <utility>
#include <vector>

#include "kw/empirical.hpp"
#include "kw/piecewise.hpp"

namespace kw {

//! f(x) = sum_i c_i (theta_i - x)_+ with c_i > 0.
struct ConvexLse {
  std::vector<double> kinks;
  std::vector<double> weights;

  // fit diagnostics
  std::vector<double> q_history;  // Q after every accepted support-reduction step
  int iterations = 0;
  double final_min_D = 0.0;  // continuous min of H - Y_n at exit
  double tol = 0.0;

  double f(double x) const;
  double F(double x) const;
  double H(double x) const;
  double mass() const;  // integral of f over [0, inf)
  Piecewise f_piecewise() const;
  Piecewise F_piecewise() const;
  Piecewise H_piecewise() const;
};

struct LseOptions {
  double tol = -1.0;  // <= 0 selects 1e-9 * X_(n)
  long max_iter = -1; // <= 0 selects 100 n
};

//! Least-squares convex decreasing density by support reduction over
//! candidates {X_(i)} u midpoints u {2 X_(n)}, then continuous refinement of
//! the directional derivative until min D >= -tol on [0, 3 X_(n)].
ConvexLse fit_lse(const EmpiricalData& d, LseOptions opt = {});

//! int (ti - x)_+ (tj - x)_+ dx
double gram_entry(double ti, double tj);
//! Q = 0.5 int f^2 - (1/n) sum f(X_i) via the Gram closed form.
double objective_Q(const std::vector<double>& kinks, const std::vector<double>& weights,
                   const EmpiricalData& d);
//! D(theta) = int (theta - x)_+ f dx - (1/n) sum (theta - X_i)_+
double directional_derivative(const ConvexLse& lse, const EmpiricalData& d, double theta);

struct CharacterizationReport {
  double min_gap;       // min of H - Y_n over [0, X_(n)]
  double max_kink_gap;  // max |H - Y_n| over kinks
  double min_gap_tail;  // min of H - Y_n over [X_(n), 3 X_(n)]
};
CharacterizationReport characterization_report(const ConvexLse& lse, const EmpiricalData& d);

//! (||F~ - h||, 2 ||ECDF - h||) over [a, b].
std::pair<double, double> marshall_A(const ConvexLse& lse, const EmpiricalData& d, const RealFn& h,
                                     const RealFn& hp, double a, double b);
//! (||H~ - G||, ||Y_n - G||) over [a, b].
std::pair<double, double> marshall_Aprime(const ConvexLse& lse, const EmpiricalData& d,
                                          const RealFn& G, const RealFn& Gp, double a, double b);

}  // namespace kw

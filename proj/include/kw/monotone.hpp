#pragma once

#include <utility>
#include <vector>

#include "kw/empirical.hpp"
#include "kw/model.hpp"
#include "kw/piecewise.hpp"

namespace kw {

//! Continuous piecewise-linear function through (x[i], y[i]).
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> y;

  //! Linear interpolation; constant extension outside [x.front(), x.back()].
  double eval(double t) const;
  double left_slope(double t) const;
  double right_slope(double t) const;
  bool is_concave() const;
  Piecewise to_piecewise() const;
};

//! Least concave majorant of (0,0), (X_(i), i/n) on [0, X_(n)]. Collinear
//! points are dropped from the vertex set.
PiecewiseLinear lcm(const EmpiricalData& d);
//! Upper concave hull of arbitrary points sorted by x.
PiecewiseLinear upper_hull(const std::vector<double>& x, const std::vector<double>& y);

//! Left slope of the LCM at t in (0, X_(n)].
double grenander_density(const PiecewiseLinear& lcm, double t);

//! (||estimate - h||, ||ECDF - h||) over [a, b].
std::pair<double, double> marshall_check(const PiecewiseLinear& estimate, const RealFn& h,
                                         const RealFn& hp, const EmpiricalData& d, double a,
                                         double b);
std::pair<double, double> marshall_check(const PiecewiseLinear& estimate, const Piecewise& h,
                                         const EmpiricalData& d, double a, double b);

//! Linear interpolant of g at the mesh knots.
PiecewiseLinear broken_line(const RealFn& g, const KnotMesh& mesh);

//! True iff (ECDF(a_j) - ECDF(a_{j-1})) / delta_j is nonincreasing in j.
bool concavity_event(const EmpiricalData& d, const KnotMesh& mesh);

//! 2k exp(-n beta1^2 / (80 k^3)), the bound as stated.
double kw_tail_bound(double n, double k, double beta1);
//! 4k exp(-n beta1^2 / (80 k^3)), the constant the proof actually reaches.
double kw_tail_bound_proof(double n, double k, double beta1);

}  // namespace kw

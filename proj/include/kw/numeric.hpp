#pragma once

#include <functional>
#include <vector>

namespace kw {

using RealFn = std::function<double(double)>;

//! Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
//! Throws std::runtime_error when the bracket is invalid.
double bisect(const RealFn& f, double lo, double hi, double tol = 1e-12);

//! Minimizer of a unimodal f on [lo, hi].
double golden_min(const RealFn& f, double lo, double hi, double tol = 1e-12);

struct Extremum {
  double x;
  double value;
};

//! Global inf (or sup) of f over [lo, hi]: scan `grid` + 1 equispaced
//! points, then refine by golden section between the neighbours of the
//! best grid point.
Extremum grid_extremum(const RealFn& f, double lo, double hi, bool maximize,
                       int grid = 10000);

//! Real roots of c0 + c1 x + c2 x^2 inside the open interval (lo, hi).
std::vector<double> quadratic_roots_in(double c0, double c1, double c2,
                                       double lo, double hi);

}  // namespace kw

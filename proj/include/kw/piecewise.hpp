#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "kw/numeric.hpp"

namespace kw {

//! Piecewise polynomial of degree <= 3, possibly discontinuous.
//! Piece i lives on [starts[i], starts[i+1]) and the last piece extends to
//! +inf; left of starts[0] the first piece is extrapolated. Coefficients
//! are in the local variable (x - starts[i]). Values are right-continuous.
struct Piecewise {
  using Coef = std::array<double, 4>;

  std::vector<double> starts;
  std::vector<Coef> coef;

  std::size_t piece_index(double t) const;
  double eval(double t) const;
  double eval_left(double t) const;
  double deriv(double t) const;

  //! Coefficients of the piece active at `at`, re-expanded about `about`.
  Coef local(std::size_t piece, double about) const;

  Piecewise derivative() const;
  //! Antiderivative vanishing at starts[0]; requires degree <= 2.
  Piecewise integral() const;
};

Piecewise operator-(const Piecewise& a, const Piecewise& b);

struct Range {
  double min;
  double max;
  double argmin;
  double argmax;
};

//! Exact range of g - h on [a, b]: both one-sided limits at every
//! breakpoint of either object, plus interior critical points of each
//! cubic piece of the difference.
Range diff_range(const Piecewise& g, const Piecewise& h, double a, double b);

//! Range of g - h for smooth h with derivative hp. Interior critical
//! points are located by sign changes of (g' - hp) on `subdiv` cells per
//! piece, refined by bisection.
Range diff_range(const Piecewise& g, const RealFn& h, const RealFn& hp, double a, double b,
                 int subdiv = 16);

double sup_norm(const Piecewise& g, const Piecewise& h, double a, double b);
double sup_norm(const Piecewise& g, const RealFn& h, const RealFn& hp, double a, double b,
                int subdiv = 16);

}  // namespace kw

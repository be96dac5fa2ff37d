#pragma once

#include <array>
#include <vector>

#include "kw/empirical.hpp"
#include "kw/model.hpp"
#include "kw/piecewise.hpp"

namespace kw {

enum class SplineKind { complete, hermite };

//! C1 (hermite) or C2 (complete) piecewise cubic on knots a_0 < ... < a_k.
//! coef[j] holds the cubic of interval [a_j, a_{j+1}] in (x - a_j).
struct CubicSpline {
  SplineKind kind = SplineKind::complete;
  std::vector<double> knots;
  std::vector<double> values;
  std::vector<double> slopes;  // first derivative at every knot
  std::vector<std::array<double, 4>> coef;

  int k() const { return static_cast<int>(knots.size()) - 1; }
  double eval(double t) const;
  double deriv(double t) const;
  double second(double t) const;
  //! Constant third derivative on interval j = 1..k.
  double third(int j) const { return 6.0 * coef[static_cast<std::size_t>(j - 1)][3]; }
  Piecewise to_piecewise() const;
};

CubicSpline complete_spline(const std::vector<double>& knots, const std::vector<double>& values,
                            double s0, double sk);
CubicSpline hermite_spline(const std::vector<double>& knots, const std::vector<double>& values,
                           const std::vector<double>& slopes);

//! Complete spline of Y_n at the knots with s_0 = 0, s_k = ECDF(a_k).
CubicSpline interpolate_Yn(const EmpiricalData& d, const KnotMesh& mesh);
//! Complete spline of Y at the knots with s_0 = F(a_0), s_k = F(a_k).
CubicSpline interpolate_Y(const AnalyticModel& m, const KnotMesh& mesh);

struct SlopePair {
  std::vector<double> from_coef;     // 6 c3 per interval
  std::vector<double> from_formula;  // 12/D^3 (0.5 (s_{j-1} + s_j) D - dY)
};
SlopePair second_derivative_slopes(const CubicSpline& s);

//! 12/D^3 (0.5 (ECDF(a_{j-1}) + ECDF(a_j)) D - dY_n), j = 1..k.
std::vector<double> hermite_slopes_Bj_tilde(const EmpiricalData& d, const KnotMesh& mesh);

//! B_1 <= ... <= B_k for the complete spline of Y_n.
bool convexity_event_An(const EmpiricalData& d, const KnotMesh& mesh);

struct DistBoundReport {
  double deriv_err;    // ||g' - (I4 g)'||
  double value_err;    // ||g - I4 g||
  double omega;        // modulus of g' at |a|
  double deriv_bound;  // 19/4 omega
  double value_bound;  // 19/8 |a| omega
  bool deriv_ok;
  bool value_ok;
};

//! g = P - G with P piecewise (degree <= 3) and G smooth (G1 = G', G2 = G'').
//! G2 must be monotone between breakpoints of P' for the modulus to be exact.
DistBoundReport dist_bound_validator(const Piecewise& P, const RealFn& G, const RealFn& G1,
                                     const RealFn& G2, const KnotMesh& mesh);

//! Test hook: scales interior slopes of every complete spline by (1 + eps).
void set_spline_fault(double eps);

}  // namespace kw

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kw/model.hpp"
#include "kw/numeric.hpp"
#include "kw/piecewise.hpp"

namespace kw {

//! Sorted sample with exact evaluation of the ECDF and its integral.
class EmpiricalData {
 public:
  EmpiricalData() = default;
  explicit EmpiricalData(std::vector<double> xs, std::uint64_t seed = 0);

  std::size_t n() const { return x_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& sorted() const { return x_; }
  double max() const { return x_.back(); }

  double ecdf(double t) const;       // #{X_i <= t} / n
  double ecdf_left(double t) const;  // #{X_i < t} / n
  double Yn(double t) const;         // (1/n) sum (t - X_i)_+

  Piecewise ecdf_piecewise() const;
  Piecewise Yn_piecewise() const;

 private:
  std::vector<double> x_;
  std::vector<double> prefix_;  // prefix_[i] = X_(1) + ... + X_(i)
  std::uint64_t seed_ = 0;
};

//! Inverse-CDF sample; U_i is Philox draw i of stream `seed`.
EmpiricalData sample(const AnalyticModel& m, std::size_t n, std::uint64_t seed);

//! max_i max(i/n - F(X_(i)), F(X_(i)) - (i-1)/n)
double ks_statistic(const EmpiricalData& d, const AnalyticModel& m);

//! Exact sup |ECDF - F| over [a, b].
double sup_ecdf_vs_F(const EmpiricalData& d, const AnalyticModel& m, double a, double b);

//! Modulus of continuity sup{|g(t) - g(s)| : s, t in [a, b], |t - s| <= h}
//! for g given by right values, left limits and its breakpoints. Exact when
//! g is piecewise linear, or a step function plus a smooth part whose
//! derivative is monotone between breakpoints.
double modulus(const RealFn& g, const RealFn& g_left, std::vector<double> breaks, double h,
               double a, double b);
double modulus(const Piecewise& g, double h, double a, double b);
//! Modulus of scale * (ECDF - G) for smooth G with monotone derivative.
double modulus_ecdf_minus(const EmpiricalData& d, const RealFn& G, double h, double a, double b,
                          double scale = 1.0);

}  // namespace kw

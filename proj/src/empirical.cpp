#include "kw/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kw/rng.hpp"

namespace kw {

EmpiricalData::EmpiricalData(std::vector<double> xs, std::uint64_t seed)
    : x_(std::move(xs)), seed_(seed) {
  if (x_.empty()) throw std::invalid_argument("empirical data needs n >= 1");
  std::sort(x_.begin(), x_.end());
  if (x_.front() < 0.0) throw std::invalid_argument("sample values must be nonnegative");
  prefix_.resize(x_.size() + 1, 0.0);
  for (std::size_t i = 0; i < x_.size(); ++i) prefix_[i + 1] = prefix_[i] + x_[i];
}

double EmpiricalData::ecdf(double t) const {
  auto c = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
  return static_cast<double>(c) / static_cast<double>(x_.size());
}

double EmpiricalData::ecdf_left(double t) const {
  auto c = std::lower_bound(x_.begin(), x_.end(), t) - x_.begin();
  return static_cast<double>(c) / static_cast<double>(x_.size());
}

double EmpiricalData::Yn(double t) const {
  auto c = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
  return (static_cast<double>(c) * t - prefix_[c]) / static_cast<double>(x_.size());
}

Piecewise EmpiricalData::ecdf_piecewise() const {
  Piecewise p;
  const double n = static_cast<double>(x_.size());
  if (x_.front() > 0.0) {
    p.starts.push_back(0.0);
    p.coef.push_back({0.0, 0.0, 0.0, 0.0});
  }
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (i + 1 < x_.size() && x_[i + 1] == x_[i]) continue;  // ties: one jump of summed height
    p.starts.push_back(x_[i]);
    p.coef.push_back({static_cast<double>(i + 1) / n, 0.0, 0.0, 0.0});
  }
  return p;
}

Piecewise EmpiricalData::Yn_piecewise() const { return ecdf_piecewise().integral(); }

EmpiricalData sample(const AnalyticModel& m, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = m.Finv(uniform_open(seed, i));
  return EmpiricalData(std::move(xs), seed);
}

double ks_statistic(const EmpiricalData& d, const AnalyticModel& m) {
  const auto& x = d.sorted();
  const double n = static_cast<double>(x.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double Fx = m.F(x[i]);
    ks = std::max({ks, (i + 1) / n - Fx, Fx - i / n});
  }
  return ks;
}

double sup_ecdf_vs_F(const EmpiricalData& d, const AnalyticModel& m, double a, double b) {
  return sup_norm(
      d.ecdf_piecewise(), [&](double t) { return m.F(t); }, [&](double t) { return m.f(t); }, a, b);
}

namespace {

struct Points {
  std::vector<double> p, vr, vl;
};

double sweep(const Points& P, const RealFn& g, const RealFn& g_left, double h, double a,
             double b) {
  double best = 0.0;
  auto take = [&](double u, double v) { best = std::max(best, std::abs(u - v)); };
  const std::size_t m = P.p.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0) take(P.vr[i], P.vl[i]);
    for (std::size_t j = i + 1; j < m && P.p[j] - P.p[i] <= h; ++j) {
      take(P.vr[j], P.vr[i]);
      take(P.vl[j], P.vl[i]);
      take(P.vl[j], P.vr[i]);
      if (P.p[j] - P.p[i] < h) take(P.vr[j], P.vl[i]);
    }
    double t = P.p[i] + h;
    if (t < b) {
      double gt = g(t), gtl = g_left(t);
      take(gt, P.vr[i]);
      take(gtl, P.vr[i]);
      take(gtl, P.vl[i]);
    }
    double s = P.p[i] - h;
    if (s > a) {
      double gs = g(s), gsl = g_left(s);
      take(P.vr[i], gs);
      take(P.vl[i], gs);
      take(P.vl[i], gsl);
    }
  }
  return best;
}

Points collect(std::vector<double> breaks, const RealFn& g, const RealFn& g_left, double a,
               double b) {
  Points P;
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  for (double c : breaks)
    if (c >= a && c <= b && (P.p.empty() || c > P.p.back())) P.p.push_back(c);
  for (std::size_t i = 0; i < P.p.size(); ++i) {
    P.vr.push_back(g(P.p[i]));
    P.vl.push_back(i == 0 ? P.vr.back() : g_left(P.p[i]));
  }
  return P;
}

}  // namespace

double modulus(const RealFn& g, const RealFn& g_left, std::vector<double> breaks, double h,
               double a, double b) {
  if (!(h > 0)) throw std::invalid_argument("modulus: h must be positive");
  Points P = collect(std::move(breaks), g, g_left, a, b);
  return sweep(P, g, g_left, h, a, b);
}

double modulus(const Piecewise& g, double h, double a, double b) {
  return modulus([&](double t) { return g.eval(t); }, [&](double t) { return g.eval_left(t); },
                 g.starts, h, a, b);
}

double modulus_ecdf_minus(const EmpiricalData& d, const RealFn& G, double h, double a, double b,
                          double scale) {
  if (!(h > 0)) throw std::invalid_argument("modulus: h must be positive");
  RealFn g = [&](double t) { return scale * (d.ecdf(t) - G(t)); };
  RealFn gl = [&](double t) { return scale * (d.ecdf_left(t) - G(t)); };
  // fast path for the breakpoint values: counts come from the sorted order
  Points P;
  const auto& x = d.sorted();
  const double n = static_cast<double>(x.size());
  auto push = [&](double c, double right, double left) {
    P.p.push_back(c);
    double Gc = G(c);
    P.vr.push_back(scale * (right - Gc));
    P.vl.push_back(scale * (left - Gc));
  };
  push(a, d.ecdf(a), d.ecdf(a));
  std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), a) - x.begin());
  while (i < x.size() && x[i] < b) {
    std::size_t j = i;
    while (j + 1 < x.size() && x[j + 1] == x[i]) ++j;
    push(x[i], (j + 1) / n, i / n);
    i = j + 1;
  }
  if (b > a) push(b, d.ecdf(b), d.ecdf_left(b));
  return sweep(P, g, gl, h, a, b);
}

}  // namespace kw

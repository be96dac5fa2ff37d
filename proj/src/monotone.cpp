#include "kw/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kw {

namespace {

std::size_t segment_left(const std::vector<double>& x, double t) {
  // segment i covers (x[i], x[i+1]]
  auto it = std::lower_bound(x.begin(), x.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  return i == 0 ? 0 : std::min(i - 1, x.size() - 2);
}

}  // namespace

double PiecewiseLinear::eval(double t) const {
  if (t <= x.front()) return y.front();
  if (t >= x.back()) return y.back();
  std::size_t i = segment_left(x, t);
  double w = (t - x[i]) / (x[i + 1] - x[i]);
  return y[i] + w * (y[i + 1] - y[i]);
}

double PiecewiseLinear::left_slope(double t) const {
  std::size_t i = segment_left(x, t);
  return (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
}

double PiecewiseLinear::right_slope(double t) const {
  auto it = std::upper_bound(x.begin(), x.end(), t);
  std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  i = std::min(i, x.size() - 2);
  return (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
}

bool PiecewiseLinear::is_concave() const {
  for (std::size_t i = 0; i + 2 < x.size(); ++i) {
    double s0 = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    double s1 = (y[i + 2] - y[i + 1]) / (x[i + 2] - x[i + 1]);
    if (s1 > s0) return false;
  }
  return true;
}

Piecewise PiecewiseLinear::to_piecewise() const {
  Piecewise p;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    p.starts.push_back(x[i]);
    p.coef.push_back({y[i], (y[i + 1] - y[i]) / (x[i + 1] - x[i]), 0.0, 0.0});
  }
  p.starts.push_back(x.back());
  p.coef.push_back({y.back(), 0.0, 0.0, 0.0});
  return p;
}

PiecewiseLinear upper_hull(const std::vector<double>& x, const std::vector<double>& y) {
  PiecewiseLinear h;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!h.x.empty() && x[i] == h.x.back()) {
      if (y[i] <= h.y.back()) continue;
      h.x.pop_back();
      h.y.pop_back();
    }
    while (h.x.size() >= 2) {
      std::size_t m = h.x.size();
      double cross = (h.x[m - 1] - h.x[m - 2]) * (y[i] - h.y[m - 2]) -
                     (h.y[m - 1] - h.y[m - 2]) * (x[i] - h.x[m - 2]);
      if (cross < 0) break;  // strict right turn keeps the middle vertex
      h.x.pop_back();
      h.y.pop_back();
    }
    h.x.push_back(x[i]);
    h.y.push_back(y[i]);
  }
  return h;
}

PiecewiseLinear lcm(const EmpiricalData& d) {
  const auto& s = d.sorted();
  const double n = static_cast<double>(s.size());
  std::vector<double> x{0.0}, y{0.0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 1 < s.size() && s[i + 1] == s[i]) continue;
    x.push_back(s[i]);
    y.push_back((i + 1) / n);
  }
  auto h = upper_hull(x, y);
  if (h.x.size() == 1) {  // degenerate sample at 0
    h.x.push_back(h.x[0]);
    h.y.push_back(h.y[0]);
  }
  return h;
}

double grenander_density(const PiecewiseLinear& l, double t) {
  if (!(t > l.x.front() && t <= l.x.back()))
    throw std::out_of_range("grenander_density: t outside (0, X_(n)]");
  return l.left_slope(t);
}

std::pair<double, double> marshall_check(const PiecewiseLinear& est, const RealFn& h,
                                         const RealFn& hp, const EmpiricalData& d, double a,
                                         double b) {
  double lhs = sup_norm(est.to_piecewise(), h, hp, a, b);
  double rhs = sup_norm(d.ecdf_piecewise(), h, hp, a, b);
  return {lhs, rhs};
}

std::pair<double, double> marshall_check(const PiecewiseLinear& est, const Piecewise& h,
                                         const EmpiricalData& d, double a, double b) {
  return {sup_norm(est.to_piecewise(), h, a, b), sup_norm(d.ecdf_piecewise(), h, a, b)};
}

PiecewiseLinear broken_line(const RealFn& g, const KnotMesh& mesh) {
  PiecewiseLinear out;
  out.x = mesh.knots;
  for (double a : mesh.knots) out.y.push_back(g(a));
  return out;
}

bool concavity_event(const EmpiricalData& d, const KnotMesh& mesh) {
  double prev = 0.0;
  for (int j = 1; j <= mesh.k; ++j) {
    double slope = (d.ecdf(mesh.knots[j]) - d.ecdf(mesh.knots[j - 1])) / mesh.delta(j);
    if (j > 1 && slope > prev) return false;
    prev = slope;
  }
  return true;
}

double kw_tail_bound(double n, double k, double beta1) {
  return 2.0 * k * std::exp(-n * beta1 * beta1 / (80.0 * k * k * k));
}

double kw_tail_bound_proof(double n, double k, double beta1) {
  return 4.0 * k * std::exp(-n * beta1 * beta1 / (80.0 * k * k * k));
}

}  // namespace kw

#include "kw/spline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

namespace kw {

namespace {

std::atomic<double> g_fault{0.0};

std::size_t interval_of(const std::vector<double>& knots, double t) {
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  std::size_t i = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
  return std::min(i, knots.size() - 2);
}

void fill_coefficients(CubicSpline& s) {
  s.coef.clear();
  for (std::size_t j = 0; j + 1 < s.knots.size(); ++j) {
    double d = s.knots[j + 1] - s.knots[j];
    double m = (s.values[j + 1] - s.values[j]) / d;
    double s0 = s.slopes[j], s1 = s.slopes[j + 1];
    s.coef.push_back({s.values[j], s0, (3.0 * m - 2.0 * s0 - s1) / d, (s0 + s1 - 2.0 * m) / (d * d)});
  }
}

void check_knots(const std::vector<double>& knots, std::size_t nvalues) {
  if (knots.size() < 2) throw std::invalid_argument("spline needs k >= 1");
  if (nvalues != knots.size()) throw std::invalid_argument("spline: one value per knot");
  for (std::size_t j = 1; j < knots.size(); ++j)
    if (!(knots[j] > knots[j - 1])) throw std::invalid_argument("spline knots must increase");
}

}  // namespace

void set_spline_fault(double eps) { g_fault.store(eps); }

double CubicSpline::eval(double t) const {
  std::size_t j = interval_of(knots, t);
  const auto& c = coef[j];
  double y = t - knots[j];
  return c[0] + y * (c[1] + y * (c[2] + y * c[3]));
}

double CubicSpline::deriv(double t) const {
  std::size_t j = interval_of(knots, t);
  const auto& c = coef[j];
  double y = t - knots[j];
  return c[1] + y * (2.0 * c[2] + y * 3.0 * c[3]);
}

double CubicSpline::second(double t) const {
  std::size_t j = interval_of(knots, t);
  const auto& c = coef[j];
  return 2.0 * c[2] + 6.0 * c[3] * (t - knots[j]);
}

Piecewise CubicSpline::to_piecewise() const {
  Piecewise p;
  p.starts.assign(knots.begin(), knots.end() - 1);
  p.coef = coef;
  return p;
}

CubicSpline complete_spline(const std::vector<double>& knots, const std::vector<double>& values,
                            double s0, double sk) {
  check_knots(knots, values.size());
  const std::size_t k = knots.size() - 1;
  CubicSpline s;
  s.kind = SplineKind::complete;
  s.knots = knots;
  s.values = values;
  s.slopes.assign(k + 1, 0.0);
  s.slopes[0] = s0;
  s.slopes[k] = sk;
  if (k >= 2) {
    // delta_j s_{j-1} + 2 s_j + (1 - delta_j) s_{j+1} = 3 (delta_j m_j + (1 - delta_j) m_{j+1})
    std::size_t m = k - 1;
    std::vector<double> sub(m), sup(m), rhs(m);
    for (std::size_t j = 1; j < k; ++j) {
      double dl = knots[j] - knots[j - 1], dr = knots[j + 1] - knots[j];
      double ml = (values[j] - values[j - 1]) / dl, mr = (values[j + 1] - values[j]) / dr;
      double delta = dr / (dl + dr);
      sub[j - 1] = delta;
      sup[j - 1] = 1.0 - delta;
      rhs[j - 1] = 3.0 * (delta * ml + (1.0 - delta) * mr);
    }
    rhs[0] -= sub[0] * s0;
    rhs[m - 1] -= sup[m - 1] * sk;
    // Thomas elimination; diagonal 2 dominates sub + sup = 1
    std::vector<double> c(m), d(m);
    double piv = 2.0;
    c[0] = sup[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < m; ++i) {
      piv = 2.0 - sub[i] * c[i - 1];
      if (!(std::abs(piv) > 0)) throw std::runtime_error("complete_spline: singular system");
      c[i] = sup[i] / piv;
      d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
    }
    s.slopes[m] = d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) s.slopes[i + 1] = d[i] - c[i] * s.slopes[i + 2];
    double eps = g_fault.load();
    if (eps != 0.0)
      for (std::size_t j = 1; j < k; ++j) s.slopes[j] *= 1.0 + eps;
  }
  fill_coefficients(s);
  return s;
}

CubicSpline hermite_spline(const std::vector<double>& knots, const std::vector<double>& values,
                           const std::vector<double>& slopes) {
  check_knots(knots, values.size());
  if (slopes.size() != knots.size()) throw std::invalid_argument("hermite: one slope per knot");
  CubicSpline s;
  s.kind = SplineKind::hermite;
  s.knots = knots;
  s.values = values;
  s.slopes = slopes;
  fill_coefficients(s);
  return s;
}

CubicSpline interpolate_Yn(const EmpiricalData& d, const KnotMesh& mesh) {
  std::vector<double> v;
  v.reserve(mesh.knots.size());
  for (double a : mesh.knots) v.push_back(d.Yn(a));
  return complete_spline(mesh.knots, v, 0.0, d.ecdf(mesh.knots.back()));
}

CubicSpline interpolate_Y(const AnalyticModel& m, const KnotMesh& mesh) {
  std::vector<double> v;
  v.reserve(mesh.knots.size());
  for (double a : mesh.knots) v.push_back(m.Y(a));
  return complete_spline(mesh.knots, v, m.F(mesh.knots.front()), m.F(mesh.knots.back()));
}

SlopePair second_derivative_slopes(const CubicSpline& s) {
  SlopePair out;
  for (int j = 1; j <= s.k(); ++j) {
    double d = s.knots[j] - s.knots[j - 1];
    out.from_coef.push_back(s.third(j));
    out.from_formula.push_back(12.0 / (d * d * d) *
                               (0.5 * (s.slopes[j - 1] + s.slopes[j]) * d -
                                (s.values[j] - s.values[j - 1])));
  }
  return out;
}

std::vector<double> hermite_slopes_Bj_tilde(const EmpiricalData& d, const KnotMesh& mesh) {
  std::vector<double> out;
  for (int j = 1; j <= mesh.k; ++j) {
    double s = mesh.knots[j - 1], t = mesh.knots[j], D = t - s;
    double bracket = 0.5 * (d.ecdf(s) + d.ecdf(t)) * D - (d.Yn(t) - d.Yn(s));
    out.push_back(12.0 / (D * D * D) * bracket);
  }
  return out;
}

bool convexity_event_An(const EmpiricalData& d, const KnotMesh& mesh) {
  auto B = second_derivative_slopes(interpolate_Yn(d, mesh)).from_formula;
  for (std::size_t j = 1; j < B.size(); ++j)
    if (B[j] < B[j - 1]) return false;
  return true;
}

DistBoundReport dist_bound_validator(const Piecewise& P, const RealFn& G, const RealFn& G1,
                                     const RealFn& G2, const KnotMesh& mesh) {
  const double a = mesh.knots.front(), b = mesh.knots.back();
  std::vector<double> v;
  for (double x : mesh.knots) v.push_back(P.eval(x) - G(x));
  Piecewise P1 = P.derivative();
  // right derivative at a_0; the terminal slope uses the right-continuous value at a_k
  CubicSpline S = complete_spline(mesh.knots, v, P1.eval(a) - G1(a), P1.eval(b) - G1(b));
  Piecewise Spw = S.to_piecewise();

  DistBoundReport r{};
  r.value_err = sup_norm(P - Spw, G, G1, a, b);
  r.deriv_err = sup_norm(P1 - Spw.derivative(), G1, G2, a, b);
  RealFn gp = [&](double t) { return P1.eval(t) - G1(t); };
  RealFn gpl = [&](double t) { return P1.eval_left(t) - G1(t); };
  r.omega = modulus(gp, gpl, P1.starts, mesh.mesh, a, b);
  r.deriv_bound = 19.0 / 4.0 * r.omega;
  r.value_bound = 19.0 / 8.0 * mesh.mesh * r.omega;
  r.deriv_ok = r.deriv_err <= r.deriv_bound;
  r.value_ok = r.value_err <= r.value_bound;
  return r;
}

}  // namespace kw

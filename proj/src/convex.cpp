#include "kw/convex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kw {

namespace {

// Node values v_i = f(z_i) for nodes z_0 = 0 < z_1 < ... < z_m = kinks.
std::vector<double> node_values(const std::vector<double>& th, const std::vector<double>& c) {
  const std::size_t m = th.size();
  std::vector<double> v(m + 1, 0.0);
  // f(z_i) = sum_{l > i} c_l (z_l - z_i), accumulated from the right
  double slope_sum = 0.0;  // sum of c_l for l > i
  for (std::size_t i = m; i-- > 0;) {
    double zi = i == 0 ? 0.0 : th[i - 1];
    double zn = th[i];
    slope_sum += c[i];
    v[i] = v[i + 1] + slope_sum * (zn - zi);
  }
  return v;
}

Piecewise f_from_nodes(const std::vector<double>& th, const std::vector<double>& v) {
  Piecewise p;
  double z0 = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    p.starts.push_back(z0);
    p.coef.push_back({v[i], (v[i + 1] - v[i]) / (th[i] - z0), 0.0, 0.0});
    z0 = th[i];
  }
  p.starts.push_back(z0);
  p.coef.push_back({0.0, 0.0, 0.0, 0.0});
  return p;
}

struct Solver {
  const EmpiricalData& d;
  std::vector<double> prefix;  // prefix sums of sorted data

  explicit Solver(const EmpiricalData& data) : d(data) {
    const auto& x = d.sorted();
    prefix.assign(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
  }

  // b_i = (1/n) sum_j phi_i(X_j) for hats at z_0 .. z_{m-1}
  std::vector<double> rhs(const std::vector<double>& th) const {
    const auto& x = d.sorted();
    const std::size_t m = th.size();
    std::vector<double> b(m, 0.0);
    std::size_t lo = 0;
    double z0 = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
      double z1 = th[i - 1];
      std::size_t hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), z1) - x.begin());
      double cnt = static_cast<double>(hi - lo);
      double sum = prefix[hi] - prefix[lo];
      double h = z1 - z0;
      b[i - 1] += (cnt * z1 - sum) / h;
      if (i < m) b[i] += (sum - cnt * z0) / h;
      lo = hi;
      z0 = z1;
    }
    for (double& bi : b) bi /= static_cast<double>(x.size());
    return b;
  }

  // Unconstrained least squares on the span of the generators at th.
  // Returns false when the mass matrix is numerically singular.
  bool solve(const std::vector<double>& th, std::vector<double>& c, std::vector<double>& v,
             double& q) const {
    const std::size_t m = th.size();
    std::vector<double> b = rhs(th);
    std::vector<double> h(m + 1, 0.0);
    for (std::size_t i = 1; i <= m; ++i) h[i] = th[i - 1] - (i == 1 ? 0.0 : th[i - 2]);
    std::vector<double> diag(m), off(m), cp(m), dp(m);
    for (std::size_t i = 0; i < m; ++i) {
      diag[i] = ((i == 0 ? 0.0 : h[i]) + h[i + 1]) / 3.0;
      off[i] = i + 1 < m ? h[i + 1] / 6.0 : 0.0;
    }
    double piv = diag[0];
    if (!(piv > 0)) return false;
    cp[0] = off[0] / piv;
    dp[0] = b[0] / piv;
    for (std::size_t i = 1; i < m; ++i) {
      piv = diag[i] - off[i - 1] * cp[i - 1];
      if (!(piv > 1e-300) || !(piv > 1e-14 * diag[i])) return false;
      cp[i] = off[i] / piv;
      dp[i] = (b[i] - off[i - 1] * dp[i - 1]) / piv;
    }
    v.assign(m + 1, 0.0);
    v[m - 1] = dp[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) v[i] = dp[i] - cp[i] * v[i + 1];
    c.assign(m, 0.0);
    for (std::size_t i = 1; i <= m; ++i) {
      double s_i = (v[i] - v[i - 1]) / h[i];
      double s_next = i < m ? (v[i + 1] - v[i]) / h[i + 1] : 0.0;
      c[i - 1] = s_next - s_i;
    }
    q = 0.0;
    for (std::size_t i = 0; i < m; ++i) q -= 0.5 * b[i] * v[i];
    return true;
  }

  double objective(const std::vector<double>& th, const std::vector<double>& c) const {
    if (th.empty()) return 0.0;
    std::vector<double> v = node_values(th, c);
    std::vector<double> b = rhs(th);
    double q = 0.0, z0 = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) {
      double hh = th[i] - z0;
      q += 0.5 * hh * (v[i] * v[i] + v[i] * v[i + 1] + v[i + 1] * v[i + 1]) / 3.0;
      q -= b[i] * v[i];
      z0 = th[i];
    }
    return q;
  }
};

}  // namespace

double gram_entry(double ti, double tj) {
  double a = std::min(ti, tj), b = std::max(ti, tj);
  if (a <= 0.0) return 0.0;
  return a * a * b / 2.0 - a * a * a / 6.0;
}

double objective_Q(const std::vector<double>& kinks, const std::vector<double>& weights,
                   const EmpiricalData& d) {
  double quad = 0.0;
  for (std::size_t i = 0; i < kinks.size(); ++i)
    for (std::size_t j = 0; j < kinks.size(); ++j)
      quad += weights[i] * weights[j] * gram_entry(kinks[i], kinks[j]);
  double lin = 0.0;
  for (double x : d.sorted())
    for (std::size_t i = 0; i < kinks.size(); ++i) lin += weights[i] * std::max(0.0, kinks[i] - x);
  return 0.5 * quad - lin / static_cast<double>(d.n());
}

double ConvexLse::f(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < kinks.size(); ++i) s += weights[i] * std::max(0.0, kinks[i] - x);
  return s;
}

double ConvexLse::F(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < kinks.size(); ++i) {
    double u = std::min(x, kinks[i]);
    s += weights[i] * (kinks[i] * u - u * u / 2.0);
  }
  return s;
}

double ConvexLse::H(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < kinks.size(); ++i) {
    double t = kinks[i];
    s += weights[i] * (x <= t ? t * x * x / 2.0 - x * x * x / 6.0 : t * t * x / 2.0 - t * t * t / 6.0);
  }
  return s;
}

double ConvexLse::mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < kinks.size(); ++i) s += weights[i] * kinks[i] * kinks[i] / 2.0;
  return s;
}

Piecewise ConvexLse::f_piecewise() const { return f_from_nodes(kinks, node_values(kinks, weights)); }
Piecewise ConvexLse::F_piecewise() const { return f_piecewise().integral(); }
Piecewise ConvexLse::H_piecewise() const { return F_piecewise().integral(); }

double directional_derivative(const ConvexLse& lse, const EmpiricalData& d, double theta) {
  return lse.H(theta) - d.Yn(theta);
}

ConvexLse fit_lse(const EmpiricalData& d, LseOptions opt) {
  const auto& x = d.sorted();
  const double scale = d.max();
  if (!(scale > 0)) throw std::invalid_argument("fit_lse: sample must have a positive maximum");
  const double tol = opt.tol > 0 ? opt.tol : 1e-9 * scale;
  const long max_iter = opt.max_iter > 0 ? opt.max_iter : 100L * static_cast<long>(d.n());

  // candidate kinks and Y_n there (fixed for the whole fit)
  std::vector<double> cand;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || (i > 0 && x[i] == x[i - 1])) continue;
    if (!cand.empty()) cand.push_back(0.5 * (cand.back() + x[i]));
    cand.push_back(x[i]);
  }
  std::sort(cand.begin(), cand.end());
  cand.push_back(2.0 * scale);
  std::vector<double> y_cand(cand.size());
  for (std::size_t i = 0; i < cand.size(); ++i) y_cand[i] = d.Yn(cand[i]);
  const Piecewise yn_pw = d.Yn_piecewise();

  Solver solver(d);
  ConvexLse out;
  out.tol = tol;
  std::vector<double> th, c;
  const double merge = 1e-12 * scale;

  for (long iter = 0;; ++iter) {
    if (iter >= max_iter)
      throw std::runtime_error("fit_lse: no convergence after " + std::to_string(max_iter) +
                               " iterations, residual " + std::to_string(out.final_min_D));
    out.iterations = static_cast<int>(iter);
    Piecewise hpw = f_from_nodes(th, node_values(th, c)).integral().integral();

    // most negative directional derivative over the candidate set
    double best = 0.0, theta_star = -1.0;
    std::size_t piece = 0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      while (piece + 1 < hpw.starts.size() && hpw.starts[piece + 1] <= cand[i]) ++piece;
      const auto& q = hpw.coef[piece];
      double y = cand[i] - hpw.starts[piece];
      double D = q[0] + y * (q[1] + y * (q[2] + y * q[3])) - y_cand[i];
      if (D < best) {
        best = D;
        theta_star = cand[i];
      }
    }
    if (best >= -tol) {
      Range r = diff_range(hpw, yn_pw, 0.0, 3.0 * scale);
      out.final_min_D = r.min;
      if (r.min >= -tol) break;
      theta_star = r.argmin;
    } else {
      out.final_min_D = best;
    }

    auto pos = std::lower_bound(th.begin(), th.end(), theta_star);
    if ((pos != th.end() && *pos - theta_star < merge) ||
        (pos != th.begin() && theta_star - *(pos - 1) < merge))
      break;  // already active: residual is rounding noise
    std::size_t inew = static_cast<std::size_t>(pos - th.begin());
    th.insert(pos, theta_star);
    c.insert(c.begin() + static_cast<long>(inew), 0.0);

    // support reduction: move toward the unconstrained solution, dropping
    // generators whose coefficient would cross zero
    bool stalled = false;
    for (int inner = 0;; ++inner) {
      std::vector<double> cn, v;
      double q;
      bool ok = solver.solve(th, cn, v, q);
      if (!ok) {
        // perturb and retry: drop the generator closest to its left neighbour
        if (th.size() <= 1 || inner > static_cast<int>(th.size()) + 5)
          throw std::runtime_error("fit_lse: singular active-set system");
        std::size_t worst = 0;
        double gap = th[0];
        for (std::size_t i = 1; i < th.size(); ++i)
          if (th[i] - th[i - 1] < gap) {
            gap = th[i] - th[i - 1];
            worst = i;
          }
        th.erase(th.begin() + static_cast<long>(worst));
        c.erase(c.begin() + static_cast<long>(worst));
        continue;
      }
      bool all_pos = std::all_of(cn.begin(), cn.end(), [](double w) { return w > 0.0; });
      if (all_pos) {
        c = cn;
        break;
      }
      double t = 1.0;
      std::size_t hit = cn.size();
      for (std::size_t i = 0; i < cn.size(); ++i)
        if (cn[i] <= 0.0) {
          double denom = c[i] - cn[i];
          double ti = denom > 0.0 ? c[i] / denom : 0.0;
          if (ti < t || hit == cn.size()) {
            t = ti;
            hit = i;
          }
        }
      if (t <= 0.0 && c[hit] <= 0.0 && th[hit] == theta_star) {
        stalled = true;  // entering generator refused: numerical floor reached
        th.erase(th.begin() + static_cast<long>(hit));
        c.erase(c.begin() + static_cast<long>(hit));
        break;
      }
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += t * (cn[i] - c[i]);
      c[hit] = 0.0;
      for (std::size_t i = c.size(); i-- > 0;)
        if (c[i] <= 0.0) {
          th.erase(th.begin() + static_cast<long>(i));
          c.erase(c.begin() + static_cast<long>(i));
        }
      if (th.empty()) break;
    }
    out.q_history.push_back(solver.objective(th, c));
    if (stalled) break;
  }
  out.kinks = th;
  out.weights = c;
  return out;
}

CharacterizationReport characterization_report(const ConvexLse& lse, const EmpiricalData& d) {
  Piecewise h = lse.H_piecewise();
  Piecewise y = d.Yn_piecewise();
  const double xn = d.max();
  CharacterizationReport r{};
  r.min_gap = diff_range(h, y, 0.0, xn).min;
  r.min_gap_tail = diff_range(h, y, xn, 3.0 * xn).min;
  r.max_kink_gap = 0.0;
  for (double t : lse.kinks) r.max_kink_gap = std::max(r.max_kink_gap, std::abs(h.eval(t) - y.eval(t)));
  return r;
}

std::pair<double, double> marshall_A(const ConvexLse& lse, const EmpiricalData& d, const RealFn& h,
                                     const RealFn& hp, double a, double b) {
  return {sup_norm(lse.F_piecewise(), h, hp, a, b), 2.0 * sup_norm(d.ecdf_piecewise(), h, hp, a, b)};
}

std::pair<double, double> marshall_Aprime(const ConvexLse& lse, const EmpiricalData& d,
                                          const RealFn& G, const RealFn& Gp, double a, double b) {
  return {sup_norm(lse.H_piecewise(), G, Gp, a, b), sup_norm(d.Yn_piecewise(), G, Gp, a, b)};
}

}  // namespace kw

#include "kw/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace kw {

double bisect(const RealFn& f, double lo, double hi, double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw std::runtime_error("bisect: root not bracketed");
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_min(const RealFn& f, double lo, double hi, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

Extremum grid_extremum(const RealFn& f, double lo, double hi, bool maximize, int grid) {
  const double sgn = maximize ? -1.0 : 1.0;
  auto x_at = [&](int i) { return i == grid ? hi : lo + (hi - lo) * i / grid; };
  int best = 0;
  double best_v = sgn * f(lo);
  for (int i = 1; i <= grid; ++i) {
    double v = sgn * f(x_at(i));
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = x_at(best > 0 ? best - 1 : 0);
  double b = x_at(best < grid ? best + 1 : grid);
  if (b > a) {
    double x = golden_min([&](double t) { return sgn * f(t); }, a, b, 1e-14 * (1.0 + std::abs(b)));
    double v = sgn * f(x);
    if (v < best_v) return {x, sgn * v};
  }
  return {x_at(best), sgn * best_v};
}

std::vector<double> quadratic_roots_in(double c0, double c1, double c2, double lo, double hi) {
  std::vector<double> out;
  auto keep = [&](double r) {
    if (std::isfinite(r) && r > lo && r < hi) out.push_back(r);
  };
  const double scale = std::abs(c0) + std::abs(c1) * (hi - lo) + std::abs(c2) * (hi - lo) * (hi - lo);
  if (scale == 0.0) return out;
  if (std::abs(c2) * (hi - lo) * (hi - lo) <= 1e-15 * scale) {
    if (c1 != 0.0) keep(-c0 / c1);
    return out;
  }
  double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0) return out;
  double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  keep(q / c2);
  if (q != 0.0) keep(c0 / q);
  return out;
}

}  // namespace kw

#include "kw/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kw {

namespace {

inline double horner(const Piecewise::Coef& c, double y) {
  return c[0] + y * (c[1] + y * (c[2] + y * c[3]));
}

inline double horner_d(const Piecewise::Coef& c, double y) {
  return c[1] + y * (2.0 * c[2] + y * 3.0 * c[3]);
}

Piecewise::Coef shift(const Piecewise::Coef& c, double d) {
  return {c[0] + d * (c[1] + d * (c[2] + d * c[3])),
          c[1] + d * (2.0 * c[2] + 3.0 * c[3] * d),
          c[2] + 3.0 * c[3] * d,
          c[3]};
}

void note(Range& r, double x, double v) {
  if (v < r.min) {
    r.min = v;
    r.argmin = x;
  }
  if (v > r.max) {
    r.max = v;
    r.argmax = x;
  }
}

Range empty_range() {
  const double inf = std::numeric_limits<double>::infinity();
  return {inf, -inf, 0.0, 0.0};
}

// sorted breakpoints of both objects strictly inside (a, b), with a and b
std::vector<double> cell_edges(const std::vector<double>& s1, const std::vector<double>* s2,
                               double a, double b) {
  std::vector<double> e{a, b};
  for (double s : s1)
    if (s > a && s < b) e.push_back(s);
  if (s2)
    for (double s : *s2)
      if (s > a && s < b) e.push_back(s);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

}  // namespace

std::size_t Piecewise::piece_index(double t) const {
  auto it = std::upper_bound(starts.begin(), starts.end(), t);
  if (it == starts.begin()) return 0;
  return static_cast<std::size_t>(it - starts.begin()) - 1;
}

double Piecewise::eval(double t) const {
  std::size_t i = piece_index(t);
  return horner(coef[i], t - starts[i]);
}

double Piecewise::eval_left(double t) const {
  auto it = std::lower_bound(starts.begin(), starts.end(), t);
  std::size_t i = it == starts.begin() ? 0 : static_cast<std::size_t>(it - starts.begin()) - 1;
  return horner(coef[i], t - starts[i]);
}

double Piecewise::deriv(double t) const {
  std::size_t i = piece_index(t);
  return horner_d(coef[i], t - starts[i]);
}

Piecewise::Coef Piecewise::local(std::size_t piece, double about) const {
  return shift(coef[piece], about - starts[piece]);
}

Piecewise Piecewise::derivative() const {
  Piecewise d;
  d.starts = starts;
  d.coef.reserve(coef.size());
  for (const auto& c : coef) d.coef.push_back({c[1], 2.0 * c[2], 3.0 * c[3], 0.0});
  return d;
}

Piecewise Piecewise::integral() const {
  Piecewise out;
  out.starts = starts;
  out.coef.reserve(coef.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < coef.size(); ++i) {
    const auto& c = coef[i];
    if (c[3] != 0.0) throw std::logic_error("Piecewise::integral: degree > 2");
    out.coef.push_back({acc, c[0], c[1] / 2.0, c[2] / 3.0});
    if (i + 1 < coef.size()) acc = horner(out.coef.back(), starts[i + 1] - starts[i]);
  }
  return out;
}

Piecewise operator-(const Piecewise& a, const Piecewise& b) {
  Piecewise out;
  out.starts = a.starts;
  out.starts.insert(out.starts.end(), b.starts.begin(), b.starts.end());
  std::sort(out.starts.begin(), out.starts.end());
  out.starts.erase(std::unique(out.starts.begin(), out.starts.end()), out.starts.end());
  for (double s : out.starts) {
    auto ca = a.local(a.piece_index(s), s);
    auto cb = b.local(b.piece_index(s), s);
    out.coef.push_back({ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2], ca[3] - cb[3]});
  }
  return out;
}

Range diff_range(const Piecewise& g, const Piecewise& h, double a, double b) {
  Range r = empty_range();
  auto edges = cell_edges(g.starts, &h.starts, a, b);
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    double u = edges[e], v = edges[e + 1];
    auto cg = g.local(g.piece_index(u), u);
    auto ch = h.local(h.piece_index(u), u);
    Piecewise::Coef d = {cg[0] - ch[0], cg[1] - ch[1], cg[2] - ch[2], cg[3] - ch[3]};
    note(r, u, d[0]);
    note(r, v, horner(d, v - u));  // left limit at v
    for (double y : quadratic_roots_in(d[1], 2.0 * d[2], 3.0 * d[3], 0.0, v - u))
      note(r, u + y, horner(d, y));
  }
  note(r, b, g.eval(b) - h.eval(b));
  return r;
}

Range diff_range(const Piecewise& g, const RealFn& h, const RealFn& hp, double a, double b,
                 int subdiv) {
  Range r = empty_range();
  auto edges = cell_edges(g.starts, nullptr, a, b);
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    double u = edges[e], v = edges[e + 1];
    auto c = g.local(g.piece_index(u), u);
    auto d = [&](double x) { return horner(c, x - u) - h(x); };
    auto dp = [&](double x) { return horner_d(c, x - u) - hp(x); };
    note(r, u, d(u));
    note(r, v, d(v));
    double x0 = u, s0 = dp(u);
    for (int m = 1; m <= subdiv; ++m) {
      double x1 = m == subdiv ? v : u + (v - u) * m / subdiv;
      double s1 = dp(x1);
      if ((s0 < 0 && s1 > 0) || (s0 > 0 && s1 < 0)) {
        double root = bisect(dp, x0, x1, 1e-15 * (1.0 + std::abs(x1)));
        note(r, root, d(root));
      }
      x0 = x1;
      s0 = s1;
    }
  }
  note(r, b, g.eval(b) - h(b));
  return r;
}

double sup_norm(const Piecewise& g, const Piecewise& h, double a, double b) {
  Range r = diff_range(g, h, a, b);
  return std::max(std::abs(r.min), std::abs(r.max));
}

double sup_norm(const Piecewise& g, const RealFn& h, const RealFn& hp, double a, double b,
                int subdiv) {
  Range r = diff_range(g, h, hp, a, b, subdiv);
  return std::max(std::abs(r.min), std::abs(r.max));
}

}  // namespace kw

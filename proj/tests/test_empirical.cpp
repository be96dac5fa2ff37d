#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "kw/empirical.hpp"
#include "kw/numeric.hpp"
#include "kw/piecewise.hpp"
#include "kw/rng.hpp"

using namespace kw;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = PhiloxCounter;
  using K = PhiloxKey;
  CHECK(philox4x32_10(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniform stream: open interval, moments, seeds") {
  double s = 0, s2 = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    double u = uniform_open(12345, i);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  CHECK(std::abs(s / N - 0.5) < 5 * std::sqrt(1.0 / 12.0 / N));
  CHECK(std::abs(s2 / N - 1.0 / 3.0) < 5 * std::sqrt(4.0 / 45.0 / N));
  CHECK(uniform_open(1, 7) == uniform_open(1, 7));
  CHECK(uniform_open(1, 7) != uniform_open(2, 7));
  CHECK(replicate_seed(1, 100, 3) != replicate_seed(1, 100, 4));
  CHECK(replicate_seed(1, 100, 3) != replicate_seed(1, 200, 3));
}

TEST_CASE("sampling is inverse-CDF and reproducible") {
  AnalyticModel m = make_model("exponential");
  CHECK(m.Finv(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  EmpiricalData one = sample(m, 1, 77);
  CHECK(one.sorted()[0] == m.Finv(uniform_open(77, 0)));
  EmpiricalData a = sample(m, 500, 9), b = sample(m, 500, 9);
  CHECK(a.sorted() == b.sorted());
  CHECK(std::is_sorted(a.sorted().begin(), a.sorted().end()));
  CHECK_THROWS_AS(sample(m, 0, 1), std::invalid_argument);
  CHECK_THROWS(EmpiricalData(std::vector<double>{}));
  CHECK_THROWS(EmpiricalData({1.0, -0.5}));
}

TEST_CASE("KS distance below 1.95/sqrt(n) in at least 99% of 1000 seeds") {
  AnalyticModel m = make_model("exponential");
  int below = 0;
  for (int s = 0; s < 1000; ++s) {
    EmpiricalData d = sample(m, 1000, replicate_seed(42, 1000, s));
    below += ks_statistic(d, m) < 1.95 / std::sqrt(1000.0);
  }
  CHECK(below >= 990);
}

TEST_CASE("ECDF and Yn on a two-point sample") {
  EmpiricalData d({3.0, 1.0});
  CHECK(d.ecdf(1.0) == 0.5);
  CHECK(d.ecdf_left(1.0) == 0.0);
  CHECK(d.ecdf(3.0) == 1.0);
  CHECK(d.ecdf(d.max()) == 1.0);
  CHECK(d.Yn(0.0) == 0.0);
  CHECK(d.Yn(3.0) == 1.0);
  CHECK(d.Yn(2.0) == 0.5);
  CHECK(d.Yn(5.0) == 3.0);
  Piecewise e = d.ecdf_piecewise();
  CHECK(e.eval(1.0) == 0.5);
  CHECK(e.eval_left(1.0) == 0.0);
  Piecewise y = d.Yn_piecewise();
  for (double t : {0.0, 0.5, 1.0, 2.2, 3.0, 7.0}) CHECK(y.eval(t) == doctest::Approx(d.Yn(t)).epsilon(1e-15));
}

TEST_CASE("ties accumulate jump heights") {
  EmpiricalData d({2.0, 1.0, 2.0, 4.0});
  CHECK(d.ecdf(2.0) == 0.75);
  CHECK(d.ecdf_left(2.0) == 0.25);
  Piecewise e = d.ecdf_piecewise();
  CHECK(e.eval(2.0) == 0.75);
  CHECK(e.eval_left(2.0) == 0.25);
}

TEST_CASE("Yn is convex and matches its closed form") {
  // dyadic data, n = 256 and dyadic t keep every operation exact, so the
  // slope comparison needs no tolerance
  std::vector<double> xs;
  for (int i = 0; i < 256; ++i) xs.push_back(std::floor(uniform_open(3, i) * 4096) / 1024);
  EmpiricalData d(xs);
  for (int i = 0; i < 3000; ++i) {
    double u[3] = {std::floor(uniform_open(8, 3 * i) * 6144) / 1024, std::floor(uniform_open(8, 3 * i + 1) * 6144) / 1024,
                   std::floor(uniform_open(8, 3 * i + 2) * 6144) / 1024};
    std::sort(u, u + 3);
    if (!(u[0] < u[1] && u[1] < u[2])) continue;
    double s12 = (d.Yn(u[1]) - d.Yn(u[0])) / (u[1] - u[0]), s23 = (d.Yn(u[2]) - d.Yn(u[1])) / (u[2] - u[1]);
    CHECK(s12 <= s23);
  }
  AnalyticModel m = make_model("exponential");
  EmpiricalData e = sample(m, 300, 5);
  for (double t : {0.1, 0.9, 2.5, 10.0}) {
    double ref = 0;
    for (double x : e.sorted()) ref += std::max(t - x, 0.0);
    CHECK(e.Yn(t) == doctest::Approx(ref / 300).epsilon(1e-13));
  }
}

TEST_CASE("exact sup norm") {
  EmpiricalData two({1.0, 3.0});
  Piecewise zero{{0.0}, {{0, 0, 0, 0}}};
  CHECK(sup_norm(two.ecdf_piecewise(), zero, 0.0, 3.0) == 1.0);
  CHECK(sup_norm(two.ecdf_piecewise(), two.ecdf_piecewise(), 0.0, 3.0) == 0.0);

  AnalyticModel m = make_model("exponential");
  EmpiricalData d = sample(m, 100, 2024);
  double tau = m.tau();
  double exact = sup_ecdf_vs_F(d, m, 0.0, tau);
  double pw = sup_norm(d.ecdf_piecewise(), [&](double t) { return m.F(t); }, [&](double t) { return m.f(t); },
                       0.0, tau);
  // grid oracle: 10^6 points plus both one-sided values at every sample point
  double grid = 0;
  for (int i = 0; i <= 1000000; ++i) {
    double t = tau * i / 1e6;
    grid = std::max(grid, std::abs(d.ecdf(t) - m.F(t)));
  }
  for (double x : d.sorted())
    if (x <= tau) grid = std::max({grid, std::abs(d.ecdf(x) - m.F(x)), std::abs(d.ecdf_left(x) - m.F(x))});
  CHECK(std::abs(exact - grid) <= 1e-9);
  CHECK(std::abs(pw - grid) <= 1e-9);
  // full line agrees with the KS statistic
  CHECK(std::abs(sup_ecdf_vs_F(d, m, 0.0, 1e3) - ks_statistic(d, m)) <= 1e-12);
}

TEST_CASE("modulus of continuity") {
  Piecewise lin{{0.0}, {{0.5, -1.7, 0, 0}}};
  CHECK(modulus(lin, 0.3, 0.0, 4.0) == doctest::Approx(1.7 * 0.3).epsilon(1e-14));
  EmpiricalData two({1.0, 3.0});
  CHECK(modulus(two.ecdf_piecewise(), 2.5, 0.0, 4.0) == 1.0);
  CHECK(modulus(two.ecdf_piecewise(), 1.5, 0.0, 4.0) == 0.5);
  CHECK(modulus(two.ecdf_piecewise(), 10.0, 0.0, 4.0) == 1.0);  // range of g
  CHECK_THROWS(modulus(lin, 0.0, 0.0, 1.0));

  // window-count oracle: for a step function the sup is attained on a
  // closed window [X_i, X_i + h]
  AnalyticModel m = make_model("exponential");
  for (int s = 0; s < 20; ++s) {
    EmpiricalData d = sample(m, 60, s);
    const auto& x = d.sorted();
    for (double h : {0.01, 0.1, 0.4}) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t c = 0;
        for (double y : x) c += (y >= x[i] && y <= x[i] + h);
        best = std::max(best, c);
      }
      Piecewise e = d.ecdf_piecewise();
      CHECK(modulus(e, h, 0.0, x.back() + 1.0) == doctest::Approx(best / 60.0).epsilon(1e-14));
      CHECK(modulus_ecdf_minus(d, [](double) { return 0.0; }, h, 0.0, x.back() + 1.0) ==
            doctest::Approx(best / 60.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("modulus of ECDF minus a smooth function against a dense oracle") {
  AnalyticModel m = make_model("exponential");
  EmpiricalData d = sample(m, 40, 3);
  RealFn F = [&](double t) { return m.F(t); };
  double h = 0.2, a = 0.0, b = 2.0;
  double exact = modulus_ecdf_minus(d, F, h, a, b);
  // oracle: s on a fine grid plus sample points, t in [s - h, s + h] on a fine grid plus sample points
  std::vector<double> pts;
  for (int i = 0; i <= 4000; ++i) pts.push_back(a + (b - a) * i / 4000.0);
  for (double x : d.sorted())
    for (double off : {0.0, h, -h})
      if (x + off >= a && x + off <= b) pts.push_back(x + off);
  std::sort(pts.begin(), pts.end());
  auto vals = [&](double t) {
    return std::array<double, 2>{d.ecdf(t) - m.F(t), d.ecdf_left(t) - m.F(t)};
  };
  double lower = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i; j < pts.size() && pts[j] - pts[i] <= h; ++j) {
      auto u = vals(pts[i]), v = vals(pts[j]);
      for (double p : u)
        for (double q : v) lower = std::max(lower, std::abs(p - q));
    }
  CHECK(exact >= lower - 1e-15);
  CHECK(exact <= lower + 1e-3);  // grid step 5e-4 times sup f = 1, doubled
}

TEST_CASE("uniform empirical process modulus at the Stute scale") {
  AnalyticModel u = make_model("uniform");
  const std::size_t n = 10000;
  const double p = std::pow(static_cast<double>(n), -0.4);
  double sum = 0;
  const int reps = 40;
  for (int r = 0; r < reps; ++r) {
    EmpiricalData d = sample(u, n, replicate_seed(5, n, r));
    double w = modulus_ecdf_minus(d, [](double t) { return t; }, p, 0.0, 1.0, std::sqrt(static_cast<double>(n)));
    sum += w / std::sqrt(2 * p * std::log(1 / p));
  }
  double mean = sum / reps;
  CHECK(mean >= 0.6);
  CHECK(mean <= 1.3);
}

TEST_CASE("numeric helpers") {
  CHECK(bisect([](double x) { return x * x - 2; }, 0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS(bisect([](double x) { return x * x + 1; }, 0, 2));
  CHECK(golden_min([](double x) { return (x - 0.3) * (x - 0.3); }, 0, 1) == doctest::Approx(0.3).epsilon(1e-8));
  Extremum e = grid_extremum([](double x) { return std::sin(x); }, 0, 3, true);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.x == doctest::Approx(M_PI / 2).epsilon(1e-6));
  auto r = quadratic_roots_in(-2, 0, 1, -5, 5);
  REQUIRE(r.size() == 2);
  std::sort(r.begin(), r.end());
  CHECK(r[0] == doctest::Approx(-std::sqrt(2.0)));
  CHECK(r[1] == doctest::Approx(std::sqrt(2.0)));
  CHECK(quadratic_roots_in(1, 0, 1, -5, 5).empty());
}

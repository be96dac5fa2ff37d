#include "kw/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kw/numeric.hpp"

namespace kw {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

class Exponential : public Family {
 public:
  explicit Exponential(double rate) : l_(rate) {}
  double f(double t) const override { return l_ * std::exp(-l_ * t); }
  double fprime(double t) const override { return -l_ * f(t); }
  double fsecond(double t) const override { return l_ * l_ * f(t); }
  double F(double t) const override { return -std::expm1(-l_ * t); }
  double Y(double t) const override { return t + std::expm1(-l_ * t) / l_; }
  double Finv_closed(double u) const override { return -std::log1p(-u) / l_; }
  double support_end() const override { return kInf; }

 private:
  double l_;
};

class TruncatedExponential : public Family {
 public:
  TruncatedExponential(double b, double rate) : b_(b), l_(rate), z_(-std::expm1(-rate * b)) {}
  double f(double t) const override { return t > b_ ? 0.0 : l_ * std::exp(-l_ * t) / z_; }
  double fprime(double t) const override { return -l_ * f(t); }
  double fsecond(double t) const override { return l_ * l_ * f(t); }
  double F(double t) const override { return t >= b_ ? 1.0 : -std::expm1(-l_ * t) / z_; }
  double Y(double t) const override {
    if (t <= b_) return (t + std::expm1(-l_ * t) / l_) / z_;
    return Y(b_) + (t - b_);
  }
  double Finv_closed(double u) const override {
    return u >= 1.0 ? b_ : std::min(b_, -std::log1p(-u * z_) / l_);
  }
  double support_end() const override { return b_; }

 private:
  double b_, l_, z_;
};

class ShiftedPower : public Family {
 public:
  ShiftedPower(double theta, double p)
      : th_(theta), p_(p), c_((p + 1.0) / std::pow(theta, p + 1.0)) {}
  double f(double t) const override { return c_ * std::pow(gap(t), p_); }
  double fprime(double t) const override { return -c_ * p_ * std::pow(gap(t), p_ - 1.0); }
  double fsecond(double t) const override {
    return c_ * p_ * (p_ - 1.0) * std::pow(gap(t), p_ - 2.0);
  }
  double F(double t) const override { return 1.0 - std::pow(gap(t) / th_, p_ + 1.0); }
  double Y(double t) const override {
    double s = std::min(t, th_);
    double y = s - th_ / (p_ + 2.0) * (1.0 - std::pow(gap(s) / th_, p_ + 2.0));
    return y + std::max(0.0, t - th_);
  }
  double Finv_closed(double u) const override {
    return th_ * (1.0 - std::pow(1.0 - u, 1.0 / (p_ + 1.0)));
  }
  double support_end() const override { return th_; }

 private:
  double gap(double t) const { return std::max(0.0, th_ - t); }
  double th_, p_, c_;
};

// w * 4(1-x)^3 + (1-w) * 2(1-x) on [0, 1]
class BetaLike : public Family {
 public:
  explicit BetaLike(double w) : w_(w) {}
  double f(double t) const override {
    double u = gap(t);
    return 4.0 * w_ * u * u * u + 2.0 * (1.0 - w_) * u;
  }
  double fprime(double t) const override {
    if (t >= 1.0) return 0.0;
    double u = gap(t);
    return -12.0 * w_ * u * u - 2.0 * (1.0 - w_);
  }
  double fsecond(double t) const override { return 24.0 * w_ * gap(t); }
  double F(double t) const override {
    double u = gap(t);
    return w_ * (1.0 - std::pow(u, 4)) + (1.0 - w_) * (1.0 - u * u);
  }
  double Y(double t) const override {
    double s = std::min(t, 1.0);
    double u = gap(s);
    double y = s - w_ * (1.0 - std::pow(u, 5)) / 5.0 - (1.0 - w_) * (1.0 - u * u * u) / 3.0;
    return y + std::max(0.0, t - 1.0);
  }
  double support_end() const override { return 1.0; }

 private:
  static double gap(double t) { return std::clamp(1.0 - t, 0.0, 1.0); }
  double w_;
};

class Uniform : public Family {
 public:
  explicit Uniform(double theta) : th_(theta) {}
  double f(double t) const override { return t > th_ ? 0.0 : 1.0 / th_; }
  double fprime(double) const override { return 0.0; }
  double fsecond(double) const override { return 0.0; }
  double F(double t) const override { return std::min(t, th_) / th_; }
  double Y(double t) const override {
    double s = std::min(t, th_);
    return s * s / (2.0 * th_) + std::max(0.0, t - th_);
  }
  double Finv_closed(double u) const override { return u * th_; }
  double support_end() const override { return th_; }

 private:
  double th_;
};

double param(const std::vector<double>& p, std::size_t i, double dflt) {
  return i < p.size() ? p[i] : dflt;
}

}  // namespace

AnalyticModel::AnalyticModel(std::string name, std::vector<double> params,
                             std::shared_ptr<const Family> fam, double tau_q,
                             bool strictly_decreasing, bool strictly_convex)
    : name_(std::move(name)),
      params_(std::move(params)),
      fam_(std::move(fam)),
      tau_q_(tau_q),
      tau_(0.0),
      strictly_decreasing_(strictly_decreasing),
      strictly_convex_(strictly_convex) {
  if (!(tau_q > 0.0 && tau_q < 1.0)) throw std::invalid_argument("tau quantile must lie in (0, 1)");
  tau_ = Finv(tau_q);
}

bool AnalyticModel::finite_support() const { return std::isfinite(support_end()); }

double AnalyticModel::Finv(double u) const {
  if (u <= 0.0) return 0.0;
  double x = fam_->Finv_closed(u);
  if (x >= 0.0) return x;
  return Finv_bisect(u);
}

double AnalyticModel::Finv_bisect(double u) const {
  if (u <= 0.0) return 0.0;
  double hi = support_end();
  if (!std::isfinite(hi)) {
    hi = 1.0;
    while (F(hi) < u) {
      hi *= 2.0;
      if (hi > 1e300) throw std::runtime_error("Finv: bracket search failed");
    }
  }
  if (u >= 1.0) return hi;
  return bisect([&](double t) { return F(t) - u; }, 0.0, hi, 1e-12);
}

AnalyticModel make_model(const std::string& name, const std::vector<double>& p, double tau_q) {
  auto bad = [&](const std::string& why) {
    return std::invalid_argument("model " + name + ": " + why);
  };
  if (name == "exponential") {
    double rate = param(p, 0, 1.0);
    if (!(rate > 0)) throw bad("rate must be positive");
    return AnalyticModel(name, {rate}, std::make_shared<Exponential>(rate), tau_q, true, true);
  }
  if (name == "truncated-exponential") {
    double b = param(p, 0, 2.0);
    double rate = param(p, 1, 1.0);
    if (!(b > 0) || !(rate > 0)) throw bad("need b > 0 and rate > 0");
    return AnalyticModel(name, {b, rate}, std::make_shared<TruncatedExponential>(b, rate), tau_q,
                         true, true);
  }
  if (name == "shifted-power") {
    double theta = param(p, 0, 1.0);
    double pw = param(p, 1, 2.0);
    if (!(theta > 0)) throw bad("theta must be positive");
    if (!(pw >= 2.0)) throw bad("power p >= 2 required for strict convexity");
    return AnalyticModel(name, {theta, pw}, std::make_shared<ShiftedPower>(theta, pw), tau_q, true,
                         true);
  }
  if (name == "beta-like") {
    double w = param(p, 0, 0.5);
    if (!(w >= 0.0 && w <= 1.0)) throw bad("weight must lie in [0, 1]");
    return AnalyticModel(name, {w}, std::make_shared<BetaLike>(w), tau_q, true, w > 0.0);
  }
  if (name == "uniform") {
    double theta = param(p, 0, 1.0);
    if (!(theta > 0)) throw bad("theta must be positive");
    return AnalyticModel(name, {theta}, std::make_shared<Uniform>(theta), tau_q, false, false);
  }
  throw std::invalid_argument("unknown model family: " + name);
}

std::vector<std::string> catalog_names() {
  return {"exponential", "truncated-exponential", "shifted-power", "beta-like", "uniform"};
}

ModelConstants constants(const AnalyticModel& m) {
  auto safe = [](double v, double fallback) { return std::isfinite(v) ? v : fallback; };
  const double tau = m.tau();
  const double a1 = m.finite_support() ? m.support_end() : m.Finv(1.0 - 1e-12);

  ModelConstants c{};
  auto neg_fp_f2 = [&](double t) {
    double f = m.f(t);
    return f > 0 ? safe(-m.fprime(t) / (f * f), kInf) : kInf;
  };
  c.beta1 = grid_extremum(neg_fp_f2, 0.0, a1, false).value;
  double sup_negfp = grid_extremum([&](double t) { return -m.fprime(t); }, 0.0, a1, true).value;
  double inf_f2 = grid_extremum([&](double t) { return m.f(t) * m.f(t); }, 0.0, a1, false).value;
  c.gamma1 = (m.finite_support() && inf_f2 > 0) ? sup_negfp / inf_f2 : kInf;

  c.beta2 = grid_extremum([&](double t) { return m.fsecond(t) / std::pow(m.f(t), 3); }, 0.0, tau,
                          false).value;
  c.gamma1_tilde = grid_extremum(neg_fp_f2, 0.0, tau, true).value;
  double sup_fpp = grid_extremum([&](double t) { return m.fsecond(t); }, 0.0, tau, true).value;
  double inf_f3 = grid_extremum([&](double t) { return std::pow(m.f(t), 3); }, 0.0, tau, false).value;
  c.gamma2 = sup_fpp / inf_f3;
  c.R = std::max(1.0, m.f(0.0)) / m.f(tau);

  if (!std::isfinite(c.beta2) || !std::isfinite(c.gamma1_tilde) || !std::isfinite(c.gamma2) ||
      !std::isfinite(c.R))
    throw std::runtime_error("constants: non-finite regularity constant for " + m.name());
  return c;
}

KnotMesh mesh_from_knots(std::vector<double> knots, double cell_mass) {
  if (knots.size() < 2) throw std::invalid_argument("mesh needs at least two knots");
  KnotMesh mesh;
  mesh.k = static_cast<int>(knots.size()) - 1;
  mesh.knots = std::move(knots);
  for (int j = 1; j <= mesh.k; ++j) {
    double d = mesh.knots[j] - mesh.knots[j - 1];
    if (!(d > 0)) throw std::invalid_argument("mesh knots must be strictly increasing");
    mesh.deltas.push_back(d);
    mesh.mesh = std::max(mesh.mesh, d);
  }
  mesh.p = 1.0 / mesh.k;
  mesh.cell_mass = cell_mass;
  return mesh;
}

KnotMesh knot_mesh_convex(const AnalyticModel& m, int k) {
  if (k < 2) throw std::invalid_argument("convex mesh requires k >= 2");
  std::vector<double> a(static_cast<std::size_t>(k) + 1);
  a[0] = 0.0;
  for (int j = 1; j < k; ++j) a[j] = m.Finv(m.tau_q() * j / k);
  a[k] = m.tau();
  return mesh_from_knots(std::move(a), m.tau_q() / k);
}

KnotMesh knot_mesh_monotone(const AnalyticModel& m, int k) {
  if (k < 1) throw std::invalid_argument("monotone mesh requires k >= 1");
  if (!m.finite_support()) throw std::invalid_argument("monotone mesh requires finite support");
  std::vector<double> a(static_cast<std::size_t>(k) + 1);
  a[0] = 0.0;
  for (int j = 1; j < k; ++j) a[j] = m.Finv(static_cast<double>(j) / k);
  a[k] = m.support_end();
  return mesh_from_knots(std::move(a), 1.0 / k);
}

}  // namespace kw

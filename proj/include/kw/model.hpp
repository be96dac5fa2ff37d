#pragma once

#include <memory>
#include <string>
#include <vector>

namespace kw {

//! Closed forms of one density family. All functions take t >= 0.
class Family {
 public:
  virtual ~Family() = default;
  virtual double f(double t) const = 0;
  virtual double fprime(double t) const = 0;
  virtual double fsecond(double t) const = 0;
  virtual double F(double t) const = 0;
  virtual double Y(double t) const = 0;  // int_0^t F
  //! Closed-form inverse, or negative when the family has none.
  virtual double Finv_closed(double /*u*/) const { return -1.0; }
  virtual double support_end() const = 0;
};

class AnalyticModel {
 public:
  AnalyticModel(std::string name, std::vector<double> params, std::shared_ptr<const Family> fam,
                double tau_q, bool strictly_decreasing, bool strictly_convex);

  const std::string& name() const { return name_; }
  const std::vector<double>& params() const { return params_; }
  double support_end() const { return fam_->support_end(); }
  bool finite_support() const;
  double tau() const { return tau_; }
  double tau_q() const { return tau_q_; }  // F(tau)
  bool strictly_decreasing() const { return strictly_decreasing_; }
  bool strictly_convex() const { return strictly_convex_; }

  double f(double t) const { return fam_->f(t); }
  double fprime(double t) const { return fam_->fprime(t); }
  double fsecond(double t) const { return fam_->fsecond(t); }
  double F(double t) const { return fam_->F(t); }
  double Y(double t) const { return fam_->Y(t); }
  double Finv(double u) const;
  //! Bisection inverse on [0, support_end] to 1e-12, regardless of closed forms.
  double Finv_bisect(double u) const;
  bool has_closed_inverse() const { return fam_->Finv_closed(0.5) >= 0.0; }

 private:
  std::string name_;
  std::vector<double> params_;
  std::shared_ptr<const Family> fam_;
  double tau_q_;
  double tau_;
  bool strictly_decreasing_;
  bool strictly_convex_;
};

//! Catalog: "exponential" [rate], "truncated-exponential" [b] or [b, rate],
//! "shifted-power" [theta, p] with p >= 2, "beta-like" [w] (mixture
//! w*Beta(1,4) + (1-w)*Beta(1,2); w = 0 is the triangular density),
//! "uniform" [theta]. Empty params select defaults.
AnalyticModel make_model(const std::string& name, const std::vector<double>& params = {},
                         double tau_q = 0.75);

std::vector<std::string> catalog_names();

struct ModelConstants {
  double beta1;         // inf -f'/f^2 over (0, alpha1)
  double gamma1;        // sup(-f') / inf f^2 over (0, alpha1); may be +inf
  double beta2;         // inf f''/f^3 over (0, tau)
  double gamma1_tilde;  // sup -f'/f^2 over (0, tau)
  double gamma2;        // sup f'' / inf f^3 over (0, tau)
  double R;             // max{1, f(0)} / f(tau)
};

//! Grid of 10^4 cells plus golden-section refinement; relative accuracy ~1e-6.
//! Throws when beta2, gamma1_tilde, gamma2 or R is not finite.
ModelConstants constants(const AnalyticModel& m);

struct KnotMesh {
  int k = 0;
  std::vector<double> knots;   // a_0 .. a_k
  std::vector<double> deltas;  // deltas[j-1] = a_j - a_{j-1}
  double mesh = 0.0;           // max delta
  double p = 0.0;              // 1/k
  double cell_mass = 0.0;      // F(a_j) - F(a_{j-1})
  double delta(int j) const { return deltas[static_cast<std::size_t>(j - 1)]; }
};

//! a_j = Finv((j/k) F(tau)), a_k = tau exactly. k >= 2.
KnotMesh knot_mesh_convex(const AnalyticModel& m, int k);
//! a_j = Finv(j/k), a_k = support end. Requires finite support.
KnotMesh knot_mesh_monotone(const AnalyticModel& m, int k);
//! Mesh from explicit knots (used for hand-made examples).
KnotMesh mesh_from_knots(std::vector<double> knots, double cell_mass = 0.0);

}  // namespace kw

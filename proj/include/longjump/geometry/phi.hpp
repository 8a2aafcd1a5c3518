#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "longjump/geometry/weight.hpp"
#include "longjump/util/num.hpp"

namespace longjump {

// Space-time scaling transform attached to a radial jump profile phi.
//
//   Phi(t) = t^2 / I(t),   I(t) = integral_0^t 2s / (1 + phi(s)) ds,
//
// extended linearly across [0, 1] (Phi(t) = t * Phi(1)) and Phi(0) = 0.
// Phi is nondecreasing: 1 + phi is nondecreasing, so
// I(t) >= t^2 / (1 + phi(t)), which is exactly the condition for
// d/dt [t^2 / I(t)] >= 0.
//
// For the pure power profile phi(s) = (1+s)^a - 1 the integral is closed
// form; the power-log profile is integrated adaptively.
class PhiTransform {
 public:
  enum class Kind { Base, Power, PowerLog };

  // Phi_0(t) = max(t, t^2): the transform of a bounded-step base move.
  static PhiTransform base() {
    PhiTransform p;
    p.kind_ = Kind::Base;
    p.cls_ = {2.0, 0.0};
    p.phi1_ = 1.0;
    return p;
  }

  static PhiTransform power(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("transform needs alpha > 0");
    PhiTransform p;
    p.kind_ = Kind::Power;
    p.alpha_ = alpha;
    p.cls_ = transform_class(alpha, 0.0);
    p.phi1_ = 1.0 / p.integral(1.0);
    return p;
  }

  static PhiTransform power_log(double w, double beta) {
    if (!(w > 0.0) || !(w >= std::fabs(beta)))
      throw std::invalid_argument("transform needs w >= |beta| > 0 profile");
    PhiTransform p;
    p.kind_ = Kind::PowerLog;
    p.alpha_ = w;
    p.beta_ = beta;
    p.cls_ = transform_class(w, beta);
    p.c1_ = std::pow(std::log(std::exp(1.0) + 1.0), beta);
    p.phi1_ = 1.0 / p.integral(1.0);
    return p;
  }

  Kind kind() const { return kind_; }
  GrowthClass growth_class() const { return cls_; }

  double eval(double t) const {
    if (t <= 0.0) return 0.0;
    if (kind_ == Kind::Base) return std::max(t, t * t);
    if (t < 1.0) return t * phi1_;
    return t * t / integral(t);
  }

  // Least t with Phi(t) >= y.
  double inverse(double y) const {
    if (y <= 0.0) return 0.0;
    if (kind_ == Kind::Base) return y <= 1.0 ? y : std::sqrt(y);
    if (y <= phi1_) return y / phi1_;
    return monotone_inverse([this](double t) { return eval(t); }, y);
  }

  // The inverse transform packaged as a budget profile.  If Phi has growth
  // class (a, b) then Phi^{-1} has class (1/a, -b/a).
  Weight inverse_weight() const {
    PhiTransform copy = *this;
    GrowthClass inv{1.0 / cls_.index, -cls_.logPower / cls_.index};
    std::ostringstream os;
    os << "inv[" << describe() << "]";
    return Weight::from_callable(
        [copy](double t) { return copy.inverse(t); },
        [copy](double y) { return copy.eval(y); }, inv, os.str());
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::Base: os << "scale_base"; break;
      case Kind::Power: os << "scale_power(" << alpha_ << ")"; break;
      case Kind::PowerLog:
        os << "scale_power_log(" << alpha_ << "," << beta_ << ")";
        break;
    }
    return os.str();
  }

  // Growth class of Phi for a profile of class (alpha, beta):
  //   alpha < 2             -> (alpha, beta)       I grows like t^(2-alpha)
  //   alpha = 2, beta < 1   -> (2, beta - 1)       I grows like log^(1-beta)
  //   alpha = 2, beta > 1   -> (2, 0)              I converges
  //   alpha > 2             -> (2, 0)              I converges
  // The boundary case (2, 1) gives an iterated-log scale with no clean class
  // and is rejected.
  static GrowthClass transform_class(double alpha, double beta) {
    if (nearly_equal(alpha, 2.0)) {
      if (nearly_equal(beta, 1.0))
        throw std::invalid_argument(
            "profile class (2,1) has no polynomial scaling class");
      if (beta < 1.0) return {2.0, beta - 1.0};
      return {2.0, 0.0};
    }
    if (alpha < 2.0) return {alpha, beta};
    return {2.0, 0.0};
  }

 private:
  PhiTransform() = default;

  // I(t) for the power profile: substituting u = 1+s turns the integrand
  // into 2(u-1)u^{-alpha} on [1, 1+t].
  double integral_power(double t) const {
    double A = 1.0 + t;
    if (nearly_equal(alpha_, 1.0)) return 2.0 * (t - std::log1p(t));
    if (nearly_equal(alpha_, 2.0))
      return 2.0 * (std::log(A) + 1.0 / A - 1.0);
    double a = alpha_;
    double top = (std::pow(A, 2.0 - a) - 1.0) / (2.0 - a);
    double bot = (std::pow(A, 1.0 - a) - 1.0) / (1.0 - a);
    return 2.0 * (top - bot);
  }

  double integral_power_log(double t) const {
    // On [0,1] the profile is linear, phi(s) = c1 * s, and the integral of
    // 2s/(1+c1*s) is closed form.
    double c = c1_;
    double head = c < 1e-12 ? 1.0 : (2.0 / (c * c)) * (c - std::log1p(c));
    if (t <= 1.0) {
      return c < 1e-12 ? t * t
                       : (2.0 / (c * c)) * (c * t - std::log1p(c * t));
    }
    auto f = [this](double s) {
      double hat = 1.0 + std::pow(s, alpha_) *
                             std::pow(std::log(std::exp(1.0) + s), beta_);
      return 2.0 * s / hat;
    };
    double coarse = adaptive_simpson(f, 1.0, t, 1e-4 * std::max(1.0, t));
    double eps = 1e-9 * std::max(std::fabs(coarse) + head, 1e-6);
    return head + adaptive_simpson(f, 1.0, t, eps);
  }

  double integral(double t) const {
    return kind_ == Kind::Power ? integral_power(t) : integral_power_log(t);
  }

  Kind kind_ = Kind::Base;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double c1_ = 0.0;    // profile slope on [0,1] for power-log
  double phi1_ = 1.0;  // Phi(1)
  GrowthClass cls_{2.0, 0.0};
};

}  // namespace longjump

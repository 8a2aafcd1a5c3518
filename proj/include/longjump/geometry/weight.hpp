#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "longjump/util/checked.hpp"
#include "longjump/util/num.hpp"

namespace longjump {

// Asymptotic growth class t^index * log(t)^logPower.  Classes are ordered
// lexicographically (index first), which matches eventual pointwise
// domination: a larger index always wins, and at equal index a larger log
// power wins.
struct GrowthClass {
  double index = 0.0;
  double logPower = 0.0;
};

inline bool nearly_equal(double a, double b, double tol = 1e-12) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool operator==(const GrowthClass& a, const GrowthClass& b) {
  return nearly_equal(a.index, b.index) && nearly_equal(a.logPower, b.logPower);
}

inline bool class_less(const GrowthClass& a, const GrowthClass& b) {
  if (!nearly_equal(a.index, b.index)) return a.index < b.index;
  if (!nearly_equal(a.logPower, b.logPower)) return a.logPower < b.logPower;
  return false;
}

inline GrowthClass class_max(const GrowthClass& a, const GrowthClass& b) {
  return class_less(a, b) ? b : a;
}

inline GrowthClass class_product(const GrowthClass& a, const GrowthClass& b) {
  return {a.index + b.index, a.logPower + b.logPower};
}

namespace detail {

// Interface for nondecreasing functions F : [0, inf) -> [0, inf) with
// F(0) = 0 used as per-letter budget profiles.  inverse(y) returns the least
// t with F(t) >= y.
class WeightImpl {
 public:
  virtual ~WeightImpl() = default;
  virtual double eval(double t) const = 0;
  virtual double inverse(double y) const = 0;
  virtual GrowthClass growth_class() const = 0;
  virtual std::string describe() const = 0;
};

class PowerWeight final : public WeightImpl {
 public:
  explicit PowerWeight(double w) : w_(w) {
    if (!(w > 0.0)) throw std::invalid_argument("power weight needs w > 0");
  }
  double eval(double t) const override {
    if (t <= 0.0) return 0.0;
    return std::pow(1.0 + t, w_) - 1.0;
  }
  double inverse(double y) const override {
    if (y <= 0.0) return 0.0;
    return std::pow(1.0 + y, 1.0 / w_) - 1.0;
  }
  GrowthClass growth_class() const override { return {w_, 0.0}; }
  std::string describe() const override {
    std::ostringstream os;
    os << "power(" << w_ << ")";
    return os.str();
  }

 private:
  double w_;
};

// t^w * log(e + t)^beta for t >= 1, linearly interpolated through the origin
// on [0, 1].  Monotone when w >= |beta|: the derivative carries the factor
// w*log(e+t) + beta*t/(e+t), and log(e+t) >= 1 > t/(e+t).
class PowerLogWeight final : public WeightImpl {
 public:
  PowerLogWeight(double w, double beta) : w_(w), beta_(beta) {
    if (!(w > 0.0)) throw std::invalid_argument("power_log weight needs w > 0");
    if (!(w >= std::fabs(beta)))
      throw std::invalid_argument("power_log weight needs w >= |beta|");
    f1_ = std::pow(std::log(std::exp(1.0) + 1.0), beta_);
  }
  double eval(double t) const override {
    if (t <= 0.0) return 0.0;
    if (t < 1.0) return t * f1_;
    return std::pow(t, w_) * std::pow(std::log(std::exp(1.0) + t), beta_);
  }
  double inverse(double y) const override {
    if (y <= 0.0) return 0.0;
    if (y <= f1_) return y / f1_;
    return monotone_inverse([this](double t) { return eval(t); }, y);
  }
  GrowthClass growth_class() const override { return {w_, beta_}; }
  std::string describe() const override {
    std::ostringstream os;
    os << "power_log(" << w_ << "," << beta_ << ")";
    return os.str();
  }

 private:
  double w_, beta_, f1_;
};

class MergedWeight final : public WeightImpl {
 public:
  explicit MergedWeight(std::vector<std::shared_ptr<const WeightImpl>> parts)
      : parts_(std::move(parts)) {
    if (parts_.empty()) throw std::invalid_argument("merged weight needs parts");
    cls_ = parts_[0]->growth_class();
    for (std::size_t i = 1; i < parts_.size(); ++i)
      cls_ = class_max(cls_, parts_[i]->growth_class());
  }
  double eval(double t) const override {
    double m = parts_[0]->eval(t);
    for (std::size_t i = 1; i < parts_.size(); ++i)
      m = std::max(m, parts_[i]->eval(t));
    return m;
  }
  double inverse(double y) const override {
    // max(F_1, ..., F_k)(t) >= y as soon as the cheapest part reaches y.
    double m = parts_[0]->inverse(y);
    for (std::size_t i = 1; i < parts_.size(); ++i)
      m = std::min(m, parts_[i]->inverse(y));
    return m;
  }
  GrowthClass growth_class() const override { return cls_; }
  std::string describe() const override {
    std::string s = "max(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ",";
      s += parts_[i]->describe();
    }
    return s + ")";
  }
  const std::vector<std::shared_ptr<const WeightImpl>>& parts() const {
    return parts_;
  }

 private:
  std::vector<std::shared_ptr<const WeightImpl>> parts_;
  GrowthClass cls_;
};

// Adapter for transform inverses and other externally supplied monotone
// profiles.
class CallableWeight final : public WeightImpl {
 public:
  template <typename F, typename G>
  CallableWeight(F f, G g, GrowthClass cls, std::string name)
      : f_(std::move(f)), g_(std::move(g)), cls_(cls), name_(std::move(name)) {}
  double eval(double t) const override { return t <= 0.0 ? 0.0 : f_(t); }
  double inverse(double y) const override { return y <= 0.0 ? 0.0 : g_(y); }
  GrowthClass growth_class() const override { return cls_; }
  std::string describe() const override { return name_; }

 private:
  std::function<double(double)> f_;
  std::function<double(double)> g_;
  GrowthClass cls_;
  std::string name_;
};

}  // namespace detail

// Value-semantic handle for a budget profile.
class Weight {
 public:
  Weight() = default;

  static Weight power(double w) {
    return Weight(std::make_shared<detail::PowerWeight>(w));
  }
  static Weight power_log(double w, double beta) {
    return Weight(std::make_shared<detail::PowerLogWeight>(w, beta));
  }
  static Weight merged(const std::vector<Weight>& parts) {
    if (parts.size() == 1) return parts[0];
    std::vector<std::shared_ptr<const detail::WeightImpl>> impls;
    impls.reserve(parts.size());
    for (const auto& p : parts) {
      p.require();
      // Flatten nested merges so describe() stays readable.
      if (auto* m = dynamic_cast<const detail::MergedWeight*>(p.impl_.get())) {
        for (const auto& q : m->parts()) impls.push_back(q);
      } else {
        impls.push_back(p.impl_);
      }
    }
    return Weight(std::make_shared<detail::MergedWeight>(std::move(impls)));
  }
  template <typename F, typename G>
  static Weight from_callable(F f, G g, GrowthClass cls, std::string name) {
    return Weight(std::make_shared<detail::CallableWeight>(
        std::move(f), std::move(g), cls, std::move(name)));
  }

  bool valid() const { return impl_ != nullptr; }
  double eval(double t) const {
    require();
    return impl_->eval(t);
  }
  double inverse(double y) const {
    require();
    return impl_->inverse(y);
  }
  GrowthClass growth_class() const {
    require();
    return impl_->growth_class();
  }
  double index() const { return growth_class().index; }
  std::string describe() const {
    require();
    return impl_->describe();
  }

  // Integer letter budget at radius R.
  i64 budget(double R) const {
    double f = eval(R);
    double s = floor_snapped(f);
    if (s < 0.0) return 0;
    return static_cast<i64>(s);
  }

 private:
  explicit Weight(std::shared_ptr<const detail::WeightImpl> p)
      : impl_(std::move(p)) {}
  void require() const {
    if (!impl_) throw std::logic_error("empty Weight");
  }
  std::shared_ptr<const detail::WeightImpl> impl_;
};

}  // namespace longjump

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qprop {

/// Scalar profile applied to a fixed base value. Arguments (p0, p1):
///   QuadraticRamp: (p0 + p1*t)^2
///   Sine:          sin(p0*t + p1)
///   Cosine:        cos(p0*t + p1)
enum class Profile { QuadraticRamp, Sine, Cosine };

inline double profile_eval(Profile p, double p0, double p1, double t) {
  switch (p) {
    case Profile::QuadraticRamp: {
      const double s = p0 + p1 * t;
      return s * s;
    }
    case Profile::Sine:
      return std::sin(p0 * t + p1);
    case Profile::Cosine:
      return std::cos(p0 * t + p1);
  }
  throw std::logic_error("unknown profile");
}

inline Profile profile_from_name(const std::string& name) {
  if (name == "quadratic_ramp") return Profile::QuadraticRamp;
  if (name == "sin") return Profile::Sine;
  if (name == "cos") return Profile::Cosine;
  throw std::invalid_argument("unknown time-dependence preset: " + name);
}

inline const char* profile_name(Profile p) {
  switch (p) {
    case Profile::QuadraticRamp: return "quadratic_ramp";
    case Profile::Sine: return "sin";
    case Profile::Cosine: return "cos";
  }
  return "?";
}

/// Time-dependent coefficient of the Hamiltonian, in one of three
/// serializable forms: a constant, a sampled table with linear
/// interpolation (evaluation outside the table range is an error), or a
/// named analytic profile scaling a base value.
///
/// T is double, Eigen::VectorXd or Eigen::MatrixXd.
template <class T>
class TimeDep {
 public:
  enum class Kind { Constant, Table, Preset };

  static TimeDep constant(T value) {
    TimeDep d;
    d.kind_ = Kind::Constant;
    d.values_.push_back(std::move(value));
    return d;
  }

  static TimeDep table(std::vector<double> times, std::vector<T> values) {
    if (times.size() < 2 || times.size() != values.size())
      throw std::invalid_argument("time table needs >= 2 samples, one value per time");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw std::invalid_argument("table times must be strictly increasing");
    TimeDep d;
    d.kind_ = Kind::Table;
    d.times_ = std::move(times);
    d.values_ = std::move(values);
    return d;
  }

  static TimeDep preset(T base, Profile profile, double p0, double p1) {
    TimeDep d;
    d.kind_ = Kind::Preset;
    d.values_.push_back(std::move(base));
    d.profile_ = profile;
    d.p0_ = p0;
    d.p1_ = p1;
    return d;
  }

  T operator()(double t) const {
    switch (kind_) {
      case Kind::Constant:
        return values_.front();
      case Kind::Table: {
        // tolerate round-off from accumulated uniform grids at the endpoints
        const double slack = 1e-12 * (times_.back() - times_.front());
        if (t < times_.front() - slack || t > times_.back() + slack)
          throw std::out_of_range("time " + std::to_string(t) + " outside table range [" +
                                  std::to_string(times_.front()) + ", " +
                                  std::to_string(times_.back()) + "]");
        t = std::clamp(t, times_.front(), times_.back());
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        if (it == times_.end()) return values_.back();
        const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
        return values_[lo] + w * (values_[hi] - values_[lo]);
      }
      case Kind::Preset:
        return values_.front() * profile_eval(profile_, p0_, p1_, t);
    }
    throw std::logic_error("unknown time-dependence kind");
  }

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }

  /// True only when the value is a constant exact zero.
  bool is_zero() const {
    if (kind_ != Kind::Constant) return false;
    if constexpr (std::is_same_v<T, double>) {
      return values_.front() == 0.0;
    } else {
      return values_.front().cwiseAbs().maxCoeff() == 0.0;
    }
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<T>& values() const { return values_; }
  Profile profile() const { return profile_; }
  double p0() const { return p0_; }
  double p1() const { return p1_; }

 private:
  Kind kind_ = Kind::Constant;
  std::vector<double> times_;
  std::vector<T> values_;
  Profile profile_ = Profile::QuadraticRamp;
  double p0_ = 0.0, p1_ = 0.0;
};

using MatrixTimeDep = TimeDep<Eigen::MatrixXd>;
using VectorTimeDep = TimeDep<Eigen::VectorXd>;
using ScalarTimeDep = TimeDep<double>;

}  // namespace qprop

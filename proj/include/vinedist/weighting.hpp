#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "vinedist/errors.hpp"

namespace vinedist {

/// Point of the closed half-plane x <= y (birth, death).
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

inline double sup_distance(PlanePoint a, PlanePoint b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

/// Closest diagonal point; the same for every L^p metric.
inline PlanePoint diagonal_projection(PlanePoint a) {
  const double m = 0.5 * (a.x + a.y);
  return {m, m};
}

inline bool on_diagonal(PlanePoint a) { return a.x == a.y; }

enum class WeightingKind { Uniform, Standard, Custom };

/// Weighting function on the half-plane. The built-ins are linear along
/// segments, which lets segment integrals be evaluated in closed form. Custom
/// evaluators must be nonnegative, positive off the diagonal and uniformly
/// continuous; none of that is checked.
class Weighting {
 public:
  static Weighting uniform() { return Weighting(WeightingKind::Uniform, "uniform", {}); }
  static Weighting standard() { return Weighting(WeightingKind::Standard, "standard", {}); }
  static Weighting custom(std::string name, std::function<double(PlanePoint)> fn) {
    return Weighting(WeightingKind::Custom, std::move(name), std::move(fn));
  }

  static Weighting from_name(const std::string& name) {
    if (name == "uniform") return uniform();
    if (name == "standard") return standard();
    throw Error(ErrorKind::InvalidArgument, "unknown weighting '" + name + "' (expected uniform or standard)");
  }

  double operator()(PlanePoint p) const {
    switch (kind_) {
      case WeightingKind::Uniform: return 1.0;
      case WeightingKind::Standard: return (p.y - p.x) / std::sqrt(2.0);
      case WeightingKind::Custom: return fn_(p);
    }
    return 0.0;
  }

  WeightingKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  bool is_linear() const noexcept { return kind_ != WeightingKind::Custom; }

 private:
  Weighting(WeightingKind kind, std::string name, std::function<double(PlanePoint)> fn)
      : kind_(kind), name_(std::move(name)), fn_(std::move(fn)) {}

  WeightingKind kind_;
  std::string name_;
  std::function<double(PlanePoint)> fn_;
};

}  // namespace vinedist

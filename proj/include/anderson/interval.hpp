#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

namespace anderson {

/// The half-open interval ]a, b]. Every eigenvalue count in the library uses
/// this convention.
class HalfOpenInterval {
 public:
  HalfOpenInterval(double a, double b) : a_(a), b_(b) {
    if (!(a < b)) {
      throw std::invalid_argument("interval ]" + std::to_string(a) + "," +
                                  std::to_string(b) + "] requires a < b");
    }
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double length() const { return b_ - a_; }

  bool contains(double x) const { return a_ < x && x <= b_; }

  /// True when this interval is a subset of `other`.
  bool subset_of(const HalfOpenInterval& other) const {
    return other.a_ <= a_ && b_ <= other.b_;
  }

  friend bool operator==(const HalfOpenInterval&,
                         const HalfOpenInterval&) = default;

 private:
  double a_;
  double b_;
};

/// Gap between two intervals; zero when they touch or overlap.
inline double distance(const HalfOpenInterval& x, const HalfOpenInterval& y) {
  return std::max({0.0, y.a() - x.b(), x.a() - y.b()});
}

}  // namespace anderson

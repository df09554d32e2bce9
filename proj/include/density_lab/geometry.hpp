#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "density_lab/exact.hpp"

namespace dlab {

struct Point {
  std::vector<Rational> coords;

  Point() = default;
  explicit Point(std::vector<Rational> c) : coords(std::move(c)) {}
  static Point origin(int d) { return Point(std::vector<Rational>(static_cast<std::size_t>(d), Rational(0))); }

  int dimension() const { return static_cast<int>(coords.size()); }
  const Rational& operator[](std::size_t j) const { return coords[j]; }
  Rational& operator[](std::size_t j) { return coords[j]; }

  Rational norm_squared() const;
  bool is_origin() const;

  friend Point operator-(const Point& a, const Point& b);
  friend Point operator+(const Point& a, const Point& b);
  friend bool operator==(const Point& a, const Point& b) { return a.coords == b.coords; }
};

/// Parses "p/q,p/q,..." into a point.
Point parse_point(const std::string& text);

struct AxisBox {
  Point lo;
  Point hi;
};

/// Spherical shell { y : inner <= |y - center| <= outer }.  The center is the
/// origin unless a translated family produced the annulus.
struct Annulus {
  Rational inner;
  Rational outer;
  std::optional<Point> center;

  Point center_or_origin(int d) const { return center ? *center : Point::origin(d); }
};

struct Ball {
  Point center;
  Rational radius;
};

using Primitive = std::variant<AxisBox, Annulus, Ball>;

/// Throws InvalidArgument when the primitive violates its invariants.
void validate(const Primitive& p, int d);

/// Dimension implied by the primitive, or nullopt for an origin annulus.
std::optional<int> primitive_dimension(const Primitive& p);

std::string primitive_kind(const Primitive& p);

Primitive translate(const Primitive& p, const Point& shift);

/// Exact membership test.
bool contains(const Primitive& p, const Point& y);

/// True when the interiors of `a` and `b` are certified not to intersect.
bool certified_disjoint(const Primitive& a, const Primitive& b, int d);

/// A finite, ordered family of pairwise-disjoint primitives in R^d.
struct SetFamily {
  int dimension = 2;
  std::vector<Primitive> primitives;
  std::string provenance;

  SetFamily() = default;
  SetFamily(int d, std::vector<Primitive> prims, std::string tag = "ad-hoc");

  bool empty() const { return primitives.empty(); }
  std::size_t size() const { return primitives.size(); }

  /// The family A - x.
  SetFamily translated(const Point& x) const;

  /// Concatenation; throws OverlapDetected unless every cross pair is
  /// certified disjoint.
  SetFamily disjoint_union(const SetFamily& other) const;

  /// Index of the first pair that cannot be certified disjoint, if any.
  std::optional<std::pair<std::size_t, std::size_t>> first_uncertified_pair() const;

  /// Index of the primitive containing y, if any.
  std::optional<std::size_t> locate(const Point& y) const;
};

class OverlapDetected : public Error {
 public:
  using Error::Error;
};

/// Closed interval [lo, hi] of distances.  Endpoints are exact; the doubles
/// are their rounded values (relative error well under 2^-45).
class Interval {
 public:
  Interval(ExactReal lo, ExactReal hi);

  const ExactReal& lo() const { return lo_; }
  const ExactReal& hi() const { return hi_; }
  double lo_value() const { return lo_value_; }
  double hi_value() const { return hi_value_; }

  /// Exact squares of the endpoints when the endpoint is a rational or c*sqrt(s).
  std::optional<Rational> lo_squared() const { return lo_.exact_square(); }
  std::optional<Rational> hi_squared() const { return hi_.exact_square(); }

  ExactReal length() const { return hi_ - lo_; }

 private:
  ExactReal lo_;
  ExactReal hi_;
  double lo_value_;
  double hi_value_;
};

/// Sorted union of disjoint closed intervals in [0, inf).
class IntervalSet {
 public:
  IntervalSet() = default;

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }
  const Interval& operator[](std::size_t k) const { return intervals_[k]; }

  /// Membership of a rounded distance, allowing relative slack at endpoints.
  bool contains(double v, double relative_slack = 0x1p-45) const;

  /// Index of the interval holding v (with slack), if any.
  std::optional<std::size_t> find(double v, double relative_slack = 0x1p-45) const;

  friend IntervalSet normalize(std::vector<Interval> intervals);

 private:
  std::vector<Interval> intervals_;
};

/// Sorts and merges overlapping or touching intervals.
IntervalSet normalize(std::vector<Interval> intervals);

Interval box_distance_range(const Point& pin, const AxisBox& box);
Interval annulus_distance_range(const Point& pin, const Annulus& ann);
Interval ball_distance_range(const Point& pin, const Ball& ball);
Interval distance_range(const Point& pin, const Primitive& p);

IntervalSet pinned_distance_set(const Point& pin, const SetFamily& family);

/// |set ∩ [0, R]|, exact.
ExactReal measure_up_to(const IntervalSet& set, const Rational& radius);
double measure_up_to(const IntervalSet& set, double radius);

/// intervals[k+1].lo - intervals[k].hi, exact.
std::vector<ExactReal> gaps(const IntervalSet& set);
std::vector<double> gap_values(const IntervalSet& set);

}  // namespace dlab

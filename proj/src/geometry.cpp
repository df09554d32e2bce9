#include "density_lab/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace dlab {

namespace {

void require_dimension(int expected, int actual, const char* what) {
  if (expected != actual) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(expected) + ", got " +
                            std::to_string(actual));
  }
}

Rational squared_distance(const Point& a, const Point& b) {
  Rational s = 0;
  for (std::size_t j = 0; j < a.coords.size(); ++j) {
    Rational t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

Rational min_distance_squared(const Point& p, const AxisBox& box) {
  Rational s = 0;
  for (std::size_t j = 0; j < p.coords.size(); ++j) {
    Rational t = 0;
    if (p[j] < box.lo[j]) {
      t = box.lo[j] - p[j];
    } else if (p[j] > box.hi[j]) {
      t = p[j] - box.hi[j];
    }
    s += t * t;
  }
  return s;
}

Rational max_distance_squared(const Point& p, const AxisBox& box) {
  Rational s = 0;
  for (std::size_t j = 0; j < p.coords.size(); ++j) {
    Rational a = p[j] - box.lo[j];
    Rational b = p[j] - box.hi[j];
    a *= a;
    b *= b;
    s += a > b ? a : b;
  }
  return s;
}

// Balls are shells with zero inner radius for the disjointness tests.
struct Shell {
  Point center;
  Rational inner;
  Rational outer;
};

Shell as_shell(const Primitive& p, int d) {
  if (const auto* ann = std::get_if<Annulus>(&p)) return {ann->center_or_origin(d), ann->inner, ann->outer};
  const auto& ball = std::get<Ball>(p);
  return {ball.center, 0, ball.radius};
}

bool shells_disjoint(const Shell& a, const Shell& b) {
  const Rational t2 = squared_distance(a.center, b.center);
  if (sgn(t2) == 0) return a.outer <= b.inner || b.outer <= a.inner;
  const Rational sum = a.outer + b.outer;
  if (t2 >= sum * sum) return true;
  // one shell sits inside the other's hole: t + outer_a <= inner_b
  auto inside_hole = [&](const Shell& in, const Shell& out) {
    const Rational room = out.inner - in.outer;
    return sgn(room) >= 0 && t2 <= room * room;
  };
  return inside_hole(a, b) || inside_hole(b, a);
}

bool box_shell_disjoint(const AxisBox& box, const Shell& s) {
  return min_distance_squared(s.center, box) >= s.outer * s.outer ||
         max_distance_squared(s.center, box) <= s.inner * s.inner;
}

}  // namespace

Rational Point::norm_squared() const {
  Rational s = 0;
  for (const auto& c : coords) s += c * c;
  return s;
}

bool Point::is_origin() const {
  return std::all_of(coords.begin(), coords.end(), [](const Rational& c) { return sgn(c) == 0; });
}

Point operator-(const Point& a, const Point& b) {
  require_dimension(a.dimension(), b.dimension(), "point difference");
  Point r = a;
  for (std::size_t j = 0; j < r.coords.size(); ++j) r[j] -= b[j];
  return r;
}

Point operator+(const Point& a, const Point& b) {
  require_dimension(a.dimension(), b.dimension(), "point sum");
  Point r = a;
  for (std::size_t j = 0; j < r.coords.size(); ++j) r[j] += b[j];
  return r;
}

Point parse_point(const std::string& text) {
  std::vector<Rational> coords;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) coords.push_back(parse_rational(part));
  if (coords.empty()) throw InvalidArgument("empty point");
  return Point(std::move(coords));
}

void validate(const Primitive& p, int d) {
  if (d < 1) throw InvalidArgument("dimension must be positive");
  std::visit(
      [d](const auto& prim) {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, AxisBox>) {
          require_dimension(d, prim.lo.dimension(), "box lo");
          require_dimension(d, prim.hi.dimension(), "box hi");
          for (int j = 0; j < d; ++j) {
            if (!(prim.lo[static_cast<std::size_t>(j)] < prim.hi[static_cast<std::size_t>(j)])) {
              throw InvalidArgument("box requires lo < hi on every axis");
            }
          }
        } else if constexpr (std::is_same_v<T, Annulus>) {
          if (sgn(prim.inner) < 0 || !(prim.inner < prim.outer)) {
            throw InvalidArgument("annulus requires 0 <= inner < outer");
          }
          if (prim.center) require_dimension(d, prim.center->dimension(), "annulus center");
        } else {
          if (sgn(prim.radius) <= 0) throw InvalidArgument("ball requires radius > 0");
          require_dimension(d, prim.center.dimension(), "ball center");
        }
      },
      p);
}

std::optional<int> primitive_dimension(const Primitive& p) {
  if (const auto* box = std::get_if<AxisBox>(&p)) return box->lo.dimension();
  if (const auto* ann = std::get_if<Annulus>(&p)) {
    if (ann->center) return ann->center->dimension();
    return std::nullopt;
  }
  return std::get<Ball>(p).center.dimension();
}

std::string primitive_kind(const Primitive& p) {
  switch (p.index()) {
    case 0:
      return "box";
    case 1:
      return "annulus";
    default:
      return "ball";
  }
}

Primitive translate(const Primitive& p, const Point& shift) {
  return std::visit(
      [&shift](const auto& prim) -> Primitive {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, AxisBox>) {
          return AxisBox{prim.lo + shift, prim.hi + shift};
        } else if constexpr (std::is_same_v<T, Annulus>) {
          Point c = prim.center_or_origin(shift.dimension()) + shift;
          Annulus moved{prim.inner, prim.outer, std::nullopt};
          if (!c.is_origin()) moved.center = std::move(c);
          return moved;
        } else {
          return Ball{prim.center + shift, prim.radius};
        }
      },
      p);
}

bool contains(const Primitive& p, const Point& y) {
  return std::visit(
      [&y](const auto& prim) {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, AxisBox>) {
          for (std::size_t j = 0; j < y.coords.size(); ++j) {
            if (y[j] < prim.lo[j] || y[j] > prim.hi[j]) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          const Rational r2 = squared_distance(y, prim.center_or_origin(y.dimension()));
          return prim.inner * prim.inner <= r2 && r2 <= prim.outer * prim.outer;
        } else {
          return squared_distance(y, prim.center) <= prim.radius * prim.radius;
        }
      },
      p);
}

bool certified_disjoint(const Primitive& a, const Primitive& b, int d) {
  const auto* box_a = std::get_if<AxisBox>(&a);
  const auto* box_b = std::get_if<AxisBox>(&b);
  if (box_a != nullptr && box_b != nullptr) {
    for (int j = 0; j < d; ++j) {
      const auto k = static_cast<std::size_t>(j);
      if (box_a->hi[k] <= box_b->lo[k] || box_b->hi[k] <= box_a->lo[k]) return true;
    }
    return false;
  }
  if (box_a != nullptr) return box_shell_disjoint(*box_a, as_shell(b, d));
  if (box_b != nullptr) return box_shell_disjoint(*box_b, as_shell(a, d));
  return shells_disjoint(as_shell(a, d), as_shell(b, d));
}

SetFamily::SetFamily(int d, std::vector<Primitive> prims, std::string tag)
    : dimension(d), primitives(std::move(prims)), provenance(std::move(tag)) {
  if (d < 1) throw InvalidArgument("dimension must be positive");
  for (const auto& p : primitives) validate(p, d);
}

SetFamily SetFamily::translated(const Point& x) const {
  require_dimension(dimension, x.dimension(), "translation");
  Point shift = Point::origin(dimension) - x;
  SetFamily out;
  out.dimension = dimension;
  out.provenance = provenance + " (translated)";
  out.primitives.reserve(primitives.size());
  for (const auto& p : primitives) out.primitives.push_back(translate(p, shift));
  return out;
}

SetFamily SetFamily::disjoint_union(const SetFamily& other) const {
  require_dimension(dimension, other.dimension, "family union");
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    for (std::size_t j = 0; j < other.primitives.size(); ++j) {
      if (!certified_disjoint(primitives[i], other.primitives[j], dimension)) {
        throw OverlapDetected("primitive " + std::to_string(i) + " of the first family and primitive " +
                              std::to_string(j) + " of the second are not certified disjoint");
      }
    }
  }
  SetFamily out = *this;
  out.provenance = provenance + " + " + other.provenance;
  out.primitives.insert(out.primitives.end(), other.primitives.begin(), other.primitives.end());
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> SetFamily::first_uncertified_pair() const {
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    for (std::size_t j = i + 1; j < primitives.size(); ++j) {
      if (!certified_disjoint(primitives[i], primitives[j], dimension)) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> SetFamily::locate(const Point& y) const {
  require_dimension(dimension, y.dimension(), "locate");
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    if (contains(primitives[i], y)) return i;
  }
  return std::nullopt;
}

Interval::Interval(ExactReal lo, ExactReal hi)
    : lo_(std::move(lo)), hi_(std::move(hi)), lo_value_(lo_.to_double()), hi_value_(hi_.to_double()) {
  if (lo_.sign() < 0 || hi_ < lo_) throw InvalidArgument("interval requires 0 <= lo <= hi");
}

std::optional<std::size_t> IntervalSet::find(double v, double relative_slack) const {
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    const auto& iv = intervals_[k];
    const double lo = iv.lo_value() * (1.0 - relative_slack);
    const double hi = iv.hi_value() * (1.0 + relative_slack);
    if (v >= lo && v <= hi) return k;
    if (v < lo) break;
  }
  return std::nullopt;
}

bool IntervalSet::contains(double v, double relative_slack) const { return find(v, relative_slack).has_value(); }

IntervalSet normalize(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo() < b.lo(); });
  IntervalSet out;
  for (auto& iv : intervals) {
    if (!out.intervals_.empty() && iv.lo() <= out.intervals_.back().hi()) {
      const Interval& last = out.intervals_.back();
      if (iv.hi() > last.hi()) out.intervals_.back() = Interval(last.lo(), iv.hi());
      continue;
    }
    out.intervals_.push_back(std::move(iv));
  }
  return out;
}

Interval box_distance_range(const Point& pin, const AxisBox& box) {
  require_dimension(box.lo.dimension(), pin.dimension(), "box_distance_range");
  return {ExactReal::sqrt(min_distance_squared(pin, box)), ExactReal::sqrt(max_distance_squared(pin, box))};
}

Interval annulus_distance_range(const Point& pin, const Annulus& ann) {
  const int d = pin.dimension();
  if (d < 2) throw DimensionMismatch("annulus_distance_range requires dimension >= 2");
  if (ann.center) require_dimension(ann.center->dimension(), d, "annulus_distance_range");
  const Rational rho2 = ann.center ? squared_distance(pin, *ann.center) : pin.norm_squared();
  const ExactReal rho = ExactReal::sqrt(rho2);
  ExactReal lo;
  if (rho2 < ann.inner * ann.inner) {
    lo = ExactReal(ann.inner) - rho;
  } else if (rho2 > ann.outer * ann.outer) {
    lo = rho - ExactReal(ann.outer);
  }
  return {lo, rho + ExactReal(ann.outer)};
}

Interval ball_distance_range(const Point& pin, const Ball& ball) {
  require_dimension(ball.center.dimension(), pin.dimension(), "ball_distance_range");
  const Rational rho2 = squared_distance(pin, ball.center);
  const ExactReal rho = ExactReal::sqrt(rho2);
  ExactReal lo;
  if (rho2 > ball.radius * ball.radius) lo = rho - ExactReal(ball.radius);
  return {lo, rho + ExactReal(ball.radius)};
}

Interval distance_range(const Point& pin, const Primitive& p) {
  return std::visit(
      [&pin](const auto& prim) {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, AxisBox>) {
          return box_distance_range(pin, prim);
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return annulus_distance_range(pin, prim);
        } else {
          return ball_distance_range(pin, prim);
        }
      },
      p);
}

IntervalSet pinned_distance_set(const Point& pin, const SetFamily& family) {
  require_dimension(family.dimension, pin.dimension(), "pinned_distance_set");
  std::vector<Interval> ranges;
  ranges.reserve(family.size());
  for (const auto& p : family.primitives) ranges.push_back(distance_range(pin, p));
  return normalize(std::move(ranges));
}

ExactReal measure_up_to(const IntervalSet& set, const Rational& radius) {
  if (sgn(radius) < 0) throw InvalidArgument("measure_up_to requires R >= 0");
  const ExactReal r(radius);
  ExactReal total;
  for (const auto& iv : set.intervals()) {
    if (iv.lo() >= r) break;
    total += min(iv.hi(), r) - iv.lo();
  }
  return total;
}

double measure_up_to(const IntervalSet& set, double radius) {
  if (!(radius >= 0)) throw InvalidArgument("measure_up_to requires R >= 0");
  return measure_up_to(set, Rational(radius)).to_double();
}

std::vector<ExactReal> gaps(const IntervalSet& set) {
  std::vector<ExactReal> out;
  for (std::size_t k = 1; k < set.size(); ++k) out.push_back(set[k].lo() - set[k - 1].hi());
  return out;
}

std::vector<double> gap_values(const IntervalSet& set) {
  std::vector<double> out;
  for (const auto& g : gaps(set)) out.push_back(g.to_double());
  return out;
}

}  // namespace dlab

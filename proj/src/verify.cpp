#include "density_lab/verify.hpp"

#include <algorithm>
#include <random>

#include "density_lab/format.hpp"

namespace dlab {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::le:
      return "<=";
    case Relation::lt:
      return "<";
    case Relation::ge:
      return ">=";
    case Relation::gt:
      return ">";
    default:
      return "==";
  }
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::holds:
      return "holds";
    case Outcome::violated:
      return "violated";
    default:
      return "undecided";
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    default:
      return "inconclusive";
  }
}

Relation parse_relation(const std::string& s) {
  for (auto r : {Relation::le, Relation::lt, Relation::ge, Relation::gt, Relation::eq}) {
    if (to_string(r) == s) return r;
  }
  throw InvalidArgument("unknown relation '" + s + "'");
}

Outcome parse_outcome(const std::string& s) {
  for (auto o : {Outcome::holds, Outcome::violated, Outcome::undecided}) {
    if (to_string(o) == s) return o;
  }
  throw InvalidArgument("unknown outcome '" + s + "'");
}

Verdict parse_verdict(const std::string& s) {
  for (auto v : {Verdict::pass, Verdict::fail, Verdict::inconclusive}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidArgument("unknown verdict '" + s + "'");
}

Verdict recompute_verdict(const std::vector<ReportItem>& items) {
  bool undecided = false;
  for (const auto& item : items) {
    if (item.outcome == Outcome::violated && item.mode != EvalMode::monte_carlo) return Verdict::fail;
    if (item.outcome != Outcome::holds) undecided = true;
  }
  return undecided ? Verdict::inconclusive : Verdict::pass;
}

namespace {

template <class T>
Outcome evaluate(const T& a_lo, const T& a_hi, Relation rel, const T& b_lo, const T& b_hi) {
  switch (rel) {
    case Relation::le:
      if (a_hi <= b_lo) return Outcome::holds;
      if (a_lo > b_hi) return Outcome::violated;
      break;
    case Relation::lt:
      if (a_hi < b_lo) return Outcome::holds;
      if (a_lo >= b_hi) return Outcome::violated;
      break;
    case Relation::ge:
      if (a_lo >= b_hi) return Outcome::holds;
      if (a_hi < b_lo) return Outcome::violated;
      break;
    case Relation::gt:
      if (a_lo > b_hi) return Outcome::holds;
      if (a_hi <= b_lo) return Outcome::violated;
      break;
    case Relation::eq:
      if (a_lo == a_hi && b_lo == b_hi && a_lo == b_lo) return Outcome::holds;
      if (a_hi < b_lo || a_lo > b_hi) return Outcome::violated;
      break;
  }
  return Outcome::undecided;
}

std::string render(double lo, double hi) {
  if (lo == hi) return format_double(lo);
  return "[" + format_double(lo) + ", " + format_double(hi) + "]";
}

std::string render(const ExactReal& lo, const ExactReal& hi) {
  if (lo == hi) return format_double(lo.to_double());
  return render(lo.to_double(), hi.to_double());
}

nlohmann::ordered_json point_json(const Point& p) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : p.coords) arr.push_back(format_rational(c));
  return arr;
}

ExactReal abs(const ExactReal& x) { return x.sign() < 0 ? -x : x; }

struct Bracket {
  ExactReal low;
  ExactReal high;
  bool exact = true;
};

Bracket family_bracket(const SetFamily& family, const Rational& radius) {
  Bracket b;
  for (const auto& p : family.primitives) {
    VolumeBracket v = ball_intersection_volume(p, family.dimension, radius);
    if (!v.exact()) b.exact = false;
    b.low += v.low;
    b.high += v.high;
  }
  return b;
}

std::string idx(long i) { return std::to_string(i); }

}  // namespace

const ReportItem& VerificationReport::add_exact(std::string desc, const ExactReal& lhs, Relation rel,
                                                const ExactReal& rhs) {
  ReportItem item;
  item.desc = std::move(desc);
  item.lhs = render(lhs, lhs);
  item.rhs = render(rhs, rhs);
  item.rel = rel;
  item.mode = EvalMode::exact;
  item.outcome = evaluate(lhs, lhs, rel, rhs, rhs);
  items.push_back(std::move(item));
  return items.back();
}

const ReportItem& VerificationReport::add_bracket(std::string desc, const ExactReal& lhs_lo, const ExactReal& lhs_hi,
                                                  Relation rel, const ExactReal& rhs_lo, const ExactReal& rhs_hi,
                                                  EvalMode mode) {
  ReportItem item;
  item.desc = std::move(desc);
  item.lhs = render(lhs_lo, lhs_hi);
  item.rhs = render(rhs_lo, rhs_hi);
  item.rel = rel;
  item.mode = mode;
  item.outcome = evaluate(lhs_lo, lhs_hi, rel, rhs_lo, rhs_hi);
  items.push_back(std::move(item));
  return items.back();
}

const ReportItem& VerificationReport::add_mc(std::string desc, double lhs_lo, double lhs_hi, Relation rel,
                                             double rhs_lo, double rhs_hi) {
  ReportItem item;
  item.desc = std::move(desc);
  item.lhs = render(lhs_lo, lhs_hi);
  item.rhs = render(rhs_lo, rhs_hi);
  item.rel = rel;
  item.mode = EvalMode::monte_carlo;
  item.outcome = evaluate(lhs_lo, lhs_hi, rel, rhs_lo, rhs_hi);
  if (item.outcome == Outcome::violated) item.outcome = Outcome::undecided;
  items.push_back(std::move(item));
  return items.back();
}

std::size_t VerificationReport::count(Outcome o) const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [o](const ReportItem& i) { return i.outcome == o; }));
}

int VerificationReport::exit_code() const {
  switch (verdict) {
    case Verdict::pass:
      return 0;
    case Verdict::fail:
      return 1;
    default:
      return 2;
  }
}

// ---------------------------------------------------------------------------

VerificationReport check_annular_bound(const SetFamily& family, const std::vector<Rational>& radii) {
  VerificationReport report;
  report.check = "annular-bound";
  const int d = family.dimension;
  const ExactReal area = sphere_area(d);
  const IntervalSet distances = pinned_distance_set(Point::origin(d), family);
  report.params["dimension"] = d;
  report.params["primitives"] = family.size();
  auto radii_json = nlohmann::ordered_json::array();
  for (const auto& r : radii) {
    if (sgn(r) <= 0) throw InvalidArgument("annular bound requires R > 0");
    radii_json.push_back(format_rational(r));
    const Bracket lhs = family_bracket(family, r);
    const ExactReal rhs = area * measure_up_to(distances, r) * pow(r, static_cast<unsigned>(d - 1));
    report.add_bracket("|A ∩ B(0,R)| <= |S^{d-1}| |D_0(A) ∩ [0,R]| R^{d-1} at R = " + format_rational(r), lhs.low,
                       lhs.high, Relation::le, rhs, rhs, lhs.exact ? EvalMode::exact : EvalMode::bracketed);
  }
  report.params["radii"] = radii_json;
  report.finalize();
  return report;
}

VerificationReport check_annular_bound(const SetFamily& family, const Rational& radius) {
  return check_annular_bound(family, std::vector<Rational>{radius});
}

SetFamily random_annuli_family(int d, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("random family needs at least one annulus");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> step(1, 1000);
  std::uniform_int_distribution<int> den(1, 16);
  std::vector<Primitive> shells;
  Rational position = frac(step(rng) - 1, den(rng));
  for (int k = 0; k < count; ++k) {
    const Rational inner = position;
    const Rational outer = inner + frac(step(rng), den(rng));
    shells.emplace_back(Annulus{inner, outer, std::nullopt});
    position = outer + frac(step(rng), den(rng));
  }
  return SetFamily(d, std::move(shells), "random-annuli");
}

VerificationReport check_annular_bound_random(int families, int radii, std::uint64_t seed, int max_annuli) {
  if (families < 1 || radii < 1 || max_annuli < 1) throw InvalidArgument("random annular bound needs positive sizes");
  VerificationReport report;
  report.check = "annular-bound";
  report.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dims(2, 4);
  std::uniform_int_distribution<int> sizes(1, max_annuli);
  std::uniform_int_distribution<long> numerators(1, 1000000);
  std::size_t checked = 0;
  for (int f = 0; f < families; ++f) {
    const int d = dims(rng);
    const SetFamily family = random_annuli_family(d, sizes(rng), rng());
    const auto& last = std::get<Annulus>(family.primitives.back());
    const Rational top = last.outer * Rational(6, 5);
    const ExactReal area = sphere_area(d);
    const IntervalSet distances = pinned_distance_set(Point::origin(d), family);

    std::optional<ExactReal> tightest;
    Rational tight_radius;
    ExactReal tight_lhs, tight_rhs;
    bool all_exact = true;
    for (int k = 0; k < radii; ++k) {
      const Rational r = top * frac(numerators(rng), 1000000);
      const Bracket lhs = family_bracket(family, r);
      all_exact = all_exact && lhs.exact;
      const ExactReal rhs = area * measure_up_to(distances, r) * pow(r, static_cast<unsigned>(d - 1));
      ExactReal margin = rhs - lhs.high;
      ++checked;
      if (!tightest || margin < *tightest) {
        tightest = margin;
        tight_radius = r;
        tight_lhs = lhs.high;
        tight_rhs = rhs;
      }
    }
    report.add_bracket("family " + idx(f) + " (d=" + idx(d) + ", " + idx(static_cast<long>(family.size())) +
                           " annuli), tightest of " + idx(radii) + " radii at R = " + format_rational(tight_radius),
                       tight_lhs, tight_lhs, Relation::le, tight_rhs, tight_rhs,
                       all_exact ? EvalMode::exact : EvalMode::bracketed);
  }
  report.params["families"] = families;
  report.params["radii_per_family"] = radii;
  report.params["max_annuli"] = max_annuli;
  report.params["inequalities_checked"] = checked;
  report.finalize();
  return report;
}

VerificationReport check_pinned_density_theorem(const SetFamily& family, const Point& pin,
                                                const RadiusSchedule& schedule) {
  if (pin.dimension() != family.dimension) throw DimensionMismatch("theorem check: pin dimension");
  VerificationReport report;
  report.check = "theorem";
  const int d = family.dimension;
  const ExactReal area = sphere_area(d);

  const SetFamily shifted = pin.is_origin() ? family : family.translated(pin);
  const auto ambient = density_profile(shifted, schedule);
  const IntervalSet distances = pinned_distance_set(pin, family);
  const auto pinned = pinned_density_profile(distances, schedule);

  ExactReal best_a_low, best_a_high, best_d;
  bool exact = true;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const ExactReal a_low = ambient[k].ratio_low();
    const ExactReal a_high = ambient[k].ratio_high();
    const ExactReal dr = pinned[k].ratio_low();
    exact = exact && ambient[k].mode == EvalMode::exact;
    best_a_low = max(best_a_low, a_low);
    best_a_high = max(best_a_high, a_high);
    best_d = max(best_d, dr);
    const ExactReal inv_area = area.inverse();
    report.add_bracket("ratio(D_x(A), R) >= ratio(A - x, R) / |S^{d-1}| at R = " + format_rational(schedule[k]), dr,
                       dr, Relation::ge, a_low * inv_area, a_high * inv_area, ambient[k].mode);
  }
  const Rational tolerance(1, 1000000000000L);
  const ExactReal scale = (area * Rational(2)).inverse();
  report.add_bracket("max pinned ratio >= max ambient ratio / (2|S^{d-1}|) - 1e-12", best_d, best_d, Relation::ge,
                     best_a_low * scale - ExactReal(tolerance), best_a_high * scale - ExactReal(tolerance),
                     exact ? EvalMode::exact : EvalMode::bracketed);

  report.params["dimension"] = d;
  report.params["pin"] = point_json(pin);
  report.params["sphere_area"] = area.to_double();
  report.params["best_ambient_ratio_low"] = best_a_low.to_double();
  report.params["best_pinned_ratio"] = best_d.to_double();
  report.params["schedule_size"] = schedule.size();
  report.finalize();
  return report;
}

VerificationReport check_translation_invariance(const SetFamily& family, const Point& x,
                                                const RadiusSchedule& schedule, const McConfig& config) {
  if (x.dimension() != family.dimension) throw DimensionMismatch("translation check: shift dimension");
  VerificationReport report;
  report.check = "translation";
  report.seed = config.seed;
  const int d = family.dimension;
  const auto ud = static_cast<unsigned>(d);
  const bool zero_shift = x.is_origin();
  const SetFamily shifted = family.translated(x);
  const ExactReal norm = ExactReal::sqrt(x.norm_squared());

  std::vector<ExactReal> bounds;
  auto bounds_json = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const Rational& r = schedule[k];
    const Rational rd = pow(r, ud);
    const ExactReal bound = ((ExactReal(r) + norm).pow(ud) - ExactReal(rd)) / rd;
    bounds.push_back(bound);
    bounds_json.push_back(bound.to_double());
    const std::string where = " at R = " + format_rational(r);

    const Bracket a = family_bracket(family, r);
    const Bracket b = zero_shift ? a : family_bracket(shifted, r);
    if (a.exact && b.exact) {
      report.add_exact("|ratio(A - x, R) - ratio(A, R)| <= ((R+|x|)^d - R^d)/R^d" + where, abs(b.low - a.low) / rd,
                       Relation::le, bound);
      continue;
    }
    if (zero_shift) {
      report.add_exact("A - 0 = A: identical ratios" + where, ExactReal(), Relation::le, bound);
      continue;
    }
    if (config.samples == 0) {
      const ExactReal worst = max(b.high - a.low, a.high - b.low) / rd;
      const ExactReal best = max(ExactReal(), max(b.low - a.high, a.low - b.high)) / rd;
      report.add_bracket("|ratio(A - x, R) - ratio(A, R)| <= shell bound" + where, best, worst, Relation::le, bound,
                         bound, EvalMode::bracketed);
      continue;
    }
    // Tighten bracketed sides with the Monte Carlo confidence interval.
    auto refine = [&](const Bracket& br, const SetFamily& fam, std::uint64_t salt) {
      std::pair<double, double> out{br.low.to_double(), br.high.to_double()};
      if (br.exact) return out;
      McConfig cfg = config;
      cfg.seed = config.seed + 2 * k + salt;
      const McEstimate est = mc_volume(fam, r, cfg);
      const double lo = std::max(out.first, est.ci_low);
      const double hi = std::min(out.second, est.ci_high);
      if (lo <= hi) out = {lo, hi};
      return out;
    };
    const double rdv = ExactReal(rd).to_double();
    auto [alo, ahi] = refine(a, family, 0);
    auto [blo, bhi] = refine(b, shifted, 1);
    const double worst = std::max(bhi - alo, ahi - blo) / rdv;
    const double best = std::max(0.0, std::max(blo - ahi, alo - bhi)) / rdv;
    const double bv = bound.to_double();
    report.add_mc("|ratio(A - x, R) - ratio(A, R)| <= shell bound (CI-safe)" + where, best, worst, Relation::le, bv,
                  bv);
  }
  for (std::size_t k = 1; k < bounds.size(); ++k) {
    if (zero_shift) break;
    report.add_exact("shell bound decreases: bound(R_" + idx(static_cast<long>(k)) + ") < bound(R_" +
                         idx(static_cast<long>(k - 1)) + ")",
                     bounds[k], Relation::lt, bounds[k - 1]);
  }
  report.params["dimension"] = d;
  report.params["shift"] = point_json(x);
  report.params["shift_norm"] = norm.to_double();
  report.params["samples"] = config.samples;
  report.params["chunk_size"] = config.chunk_size;
  report.params["bounds"] = bounds_json;
  report.finalize();
  return report;
}

VerificationReport check_subadditivity_monotonicity(const SetFamily& a, const SetFamily& b,
                                                    const RadiusSchedule& schedule) {
  const SetFamily both = a.disjoint_union(b);
  VerificationReport report;
  report.check = "submon";
  const int d = a.dimension;
  const auto ud = static_cast<unsigned>(d);
  for (const auto& r : schedule.radii()) {
    const Rational rd = pow(r, ud);
    const std::string where = " at R = " + format_rational(r);
    const Bracket ba = family_bracket(a, r);
    const Bracket bb = family_bracket(b, r);
    const Bracket bu = family_bracket(both, r);
    const bool exact = ba.exact && bb.exact;
    if (exact) {
      report.add_exact("ratio(A ∪ B) = ratio(A) + ratio(B)" + where, bu.low / rd, Relation::eq, (ba.low + bb.low) / rd);
    } else {
      // The union's enclosure is assembled from the same per-primitive enclosures.
      report.add_exact("lower enclosures add" + where, bu.low, Relation::eq, ba.low + bb.low);
      report.add_exact("upper enclosures add" + where, bu.high, Relation::eq, ba.high + bb.high);
    }
    // ratio(A∪B) - ratio(A) - ratio(B) is identically zero primitive by primitive.
    report.add_exact("ratio(A ∪ B) - ratio(A) - ratio(B) <= 0 (subadditivity)" + where,
                     (bu.low - ba.low - bb.low) / rd, Relation::le, ExactReal());
    report.add_bracket("ratio(A ∪ B) - ratio(A) = ratio(B) >= 0 (monotonicity)" + where, bb.low / rd, bb.high / rd,
                       Relation::ge, ExactReal(), ExactReal(), bb.exact ? EvalMode::exact : EvalMode::bracketed);
  }
  report.params["dimension"] = d;
  report.params["primitives_a"] = a.size();
  report.params["primitives_b"] = b.size();
  report.finalize();
  return report;
}

std::vector<Point> grid_pins(const BoxConstruction& boxes, int box_index, int per_axis) {
  if (per_axis < 1) throw InvalidArgument("grid needs at least one pin per axis");
  const AxisBox& box = boxes.box(box_index);
  const int d = boxes.params().d;
  std::vector<Point> pins;
  std::vector<int> counter(static_cast<std::size_t>(d), 0);
  while (true) {
    Point p = box.lo;
    for (int j = 0; j < d; ++j) {
      const auto k = static_cast<std::size_t>(j);
      p[k] += (box.hi[k] - box.lo[k]) * frac(2 * counter[k] + 1, 2 * per_axis);
    }
    pins.push_back(std::move(p));
    int j = 0;
    while (j < d && ++counter[static_cast<std::size_t>(j)] == per_axis) counter[static_cast<std::size_t>(j++)] = 0;
    if (j == d) break;
  }
  return pins;
}

VerificationReport check_counterexample(const BoxConstruction& boxes, const std::vector<Point>& pins, int first_index) {
  const int n = boxes.count();
  const int d = boxes.params().d;
  const Rational& eps = boxes.params().epsilon;
  const Rational& growth = boxes.params().growth;
  const ExactReal sqrt_d = ExactReal::sqrt(Rational(d));
  VerificationReport report;
  report.check = "counterexample";

  report.add_exact("1 - 2 eps sqrt(d) > 0", ExactReal(1) - sqrt_d * Rational(2 * eps), Relation::gt, ExactReal());

  auto pins_json = nlohmann::ordered_json::array();
  for (std::size_t q = 0; q < pins.size(); ++q) {
    const Point& pin = pins[q];
    const auto i0 = boxes.box_containing(pin);
    if (!i0) throw PinOutsideFamily("pin " + idx(static_cast<long>(q)) + " lies in no box of the construction");
    if (!(*i0 < first_index && first_index <= n)) {
      throw InvalidArgument("counterexample check needs i0 < M <= N (i0 = " + idx(*i0) +
                            ", M = " + idx(first_index) + ", N = " + idx(n) + ")");
    }
    const std::string tag = "pin " + idx(static_cast<long>(q)) + ": ";
    std::vector<Interval> ranges;
    for (int m = first_index; m <= n; ++m) {
      Interval range = box_distance_range(pin, boxes.box(m));
      const Rational lower = boxes.R(m);
      const Rational upper_sq = 4 * eps * eps * d * boxes.R(m + 1) * boxes.R(m + 1);
      report.add_exact(tag + "R_" + idx(m) + "^2 <= dmin(Q_" + idx(m) + ")^2", Rational(lower * lower), Relation::le,
                       *range.lo_squared());
      report.add_exact(tag + "dmax(Q_" + idx(m) + ")^2 <= (2 eps sqrt(d) R_" + idx(m + 1) + ")^2",
                       *range.hi_squared(), Relation::le, upper_sq);
      ranges.push_back(std::move(range));
    }

    std::vector<ExactReal> gap_list;
    auto witnesses = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k + 1 < ranges.size(); ++k) {
      const int m = first_index + static_cast<int>(k);
      ExactReal g = ranges[k + 1].lo() - ranges[k].hi();
      const ExactReal floor = (ExactReal(1) - sqrt_d * Rational(2 * eps)) * boxes.R(m + 1);
      report.add_exact(tag + "gap_" + idx(m) + " >= (1 - 2 eps sqrt(d)) R_" + idx(m + 1), g, Relation::ge, floor);
      witnesses.push_back((ranges[k].hi_value() + ranges[k + 1].lo_value()) / 2);
      gap_list.push_back(std::move(g));
    }
    for (std::size_t k = 1; k < gap_list.size(); ++k) {
      const int m = first_index + static_cast<int>(k);
      report.add_exact(tag + "gap_" + idx(m) + " > gap_" + idx(m - 1), gap_list[k], Relation::gt, gap_list[k - 1]);
      report.add_exact(tag + "gap_" + idx(m) + " >= (K/2) gap_" + idx(m - 1), gap_list[k], Relation::ge,
                       gap_list[k - 1] * Rational(growth / 2));
    }

    // The tail of D_pin(E) consists exactly of these ranges, as separate components.
    const IntervalSet set = pinned_distance_set(pin, boxes.family());
    long matching = 0;
    const std::size_t tail = ranges.size();
    if (set.size() >= tail) {
      for (std::size_t k = 0; k < tail; ++k) {
        const Interval& component = set[set.size() - tail + k];
        if (component.lo() == ranges[k].lo() && component.hi() == ranges[k].hi()) ++matching;
      }
    }
    report.add_exact(tag + "components of D_pin(E) equal to the Q_m ranges, m >= M", ExactReal(matching),
                     Relation::eq, ExactReal(static_cast<long>(tail)));

    nlohmann::ordered_json entry;
    entry["pin"] = point_json(pin);
    entry["box"] = *i0;
    entry["missing_distances"] = witnesses;
    pins_json.push_back(entry);
  }
  report.params["dimension"] = d;
  report.params["epsilon"] = format_rational(eps);
  report.params["growth"] = format_rational(growth);
  report.params["N"] = n;
  report.params["M"] = first_index;
  report.params["pins"] = pins_json;
  report.finalize();
  return report;
}

ExactReal sharpness_constant(int d, const Rational& epsilon0) {
  const Rational grown = pow(1 + epsilon0, static_cast<unsigned>(d));
  const Rational numerator_bound = 2 * epsilon0 / (1 - epsilon0 / 2);
  return unit_ball_volume(d).inverse() * Rational(numerator_bound * grown / (grown - 1));
}

ExactReal sharpness_constant_cap(int d) {
  return sphere_area(d).inverse() * Rational(Rational(8, 3) * pow(Rational(3, 2), static_cast<unsigned>(d)));
}

VerificationReport check_sharpness(const AnnuliConstruction& annuli, const std::vector<Point>& pins,
                                   const RadiusSchedule& schedule) {
  const auto& params = annuli.params();
  const int d = params.d;
  const Rational& eps0 = params.epsilon0;
  const Rational widen_lo = 1 - eps0 / 2;
  const Rational widen_hi = 1 + 3 * eps0 / 2;
  const Rational ratio_bound = 2 * eps0 / widen_lo;
  const Rational grown = pow(1 + eps0, static_cast<unsigned>(d));
  const ExactReal ambient_floor = unit_ball_volume(d) * Rational((grown - 1) / grown);
  const ExactReal constant = sharpness_constant(d, eps0);
  const ExactReal cap = sharpness_constant_cap(d);
  const bool canonical = !schedule.indices().empty();

  VerificationReport report;
  report.check = "sharpness";
  if (eps0 <= Rational(1, 2)) {
    report.add_exact("C(eps0) <= (8/3)(3/2)^d / |S^{d-1}|", constant, Relation::le, cap);
  }

  auto pins_json = nlohmann::ordered_json::array();
  double worst_quotient = 0;
  for (std::size_t q = 0; q < pins.size(); ++q) {
    const Point& pin = pins[q];
    if (pin.dimension() != d) throw DimensionMismatch("sharpness: pin dimension");
    if (!pin.is_origin() && !annuli.annulus_containing(pin)) {
      throw PinOutsideFamily("pin " + idx(static_cast<long>(q)) + " lies in no annulus of the construction");
    }
    const std::string tag = "pin " + idx(static_cast<long>(q)) + ": ";
    const Rational norm2 = pin.norm_squared();

    // least index with 2|x| <= eps0 R_i / 2
    std::optional<int> first;
    for (int i = annuli.first_index(); i <= annuli.last_index(); ++i) {
      if (16 * norm2 <= eps0 * eps0 * annuli.R(i) * annuli.R(i)) {
        first = i;
        break;
      }
    }
    if (!first) throw ScheduleTooShort(tag + "no annulus index satisfies 2|x| <= eps0 R_i / 2");
    const int m0 = *first;

    for (int i = m0; i <= annuli.last_index(); ++i) {
      const Interval range = annulus_distance_range(pin, annuli.annulus(i));
      report.add_exact(tag + "min D_x(S_" + idx(i) + ") >= (1 - eps0/2) R_" + idx(i), range.lo(), Relation::ge,
                       ExactReal(widen_lo * annuli.R(i)));
      report.add_exact(tag + "max D_x(S_" + idx(i) + ") <= (1 + 3eps0/2) R_" + idx(i), range.hi(), Relation::le,
                       ExactReal(widen_hi * annuli.R(i)));
    }

    const IntervalSet distances = pinned_distance_set(pin, annuli.family());
    const Rational regime = widen_hi * annuli.R(m0);
    std::vector<Rational> radii;
    std::vector<int> indices;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      if (schedule[k] > regime) {
        radii.push_back(schedule[k]);
        if (canonical) indices.push_back(schedule.indices()[k]);
      }
    }
    if (radii.empty()) {
      throw ScheduleTooShort(tag + "no schedule radius exceeds (1 + 3eps0/2) R_M = " + format_rational(regime));
    }
    const RadiusSchedule tail(radii, indices);

    ExactReal pinned_max;
    for (const auto& r : radii) {
      // pigeonhole: (1 + 3eps0/2) R_i < r <= (1 + 3eps0/2) R_{i+1}
      int i = m0;
      while (i + 1 <= annuli.last_index() && widen_hi * annuli.R(i + 1) < r) ++i;
      std::string where;
      if (i + 1 <= annuli.last_index() && r >= widen_lo * annuli.R(i + 1)) {
        where = " (case 1: R in widened I_" + idx(i + 1) + ")";
      } else {
        where = " (case 2: R between widened I_" + idx(i) + " and I_" + idx(i + 1) + ")";
      }
      const ExactReal ratio = measure_up_to(distances, r) / r;
      pinned_max = max(pinned_max, ratio);
      report.add_exact(tag + "ratio(D_x(E), R) <= 2 eps0/(1 - eps0/2) at R = " + format_rational(r) + where, ratio,
                       Relation::le, ExactReal(ratio_bound));
    }

    const auto ambient = density_profile(annuli.family(), tail);
    const ExactReal ambient_max = max_ratio_low(ambient);
    const double quotient = pinned_max.to_double() / ambient_max.to_double();
    worst_quotient = std::max(worst_quotient, quotient);
    if (canonical) {
      report.add_exact(tag + "max ambient ratio >= omega_d((1+eps0)^d - 1)/(1+eps0)^d", ambient_max, Relation::ge,
                       ambient_floor);
      report.add_exact(tag + "max pinned ratio <= C(eps0) * max ambient ratio", pinned_max, Relation::le,
                       constant * ambient_max);
    }

    nlohmann::ordered_json entry;
    entry["pin"] = point_json(pin);
    entry["M"] = m0;
    entry["pinned_max_ratio"] = pinned_max.to_double();
    entry["ambient_max_ratio"] = ambient_max.to_double();
    entry["quotient"] = quotient;
    pins_json.push_back(entry);
  }
  report.params["dimension"] = d;
  report.params["epsilon0"] = format_rational(eps0);
  report.params["N"] = params.count;
  report.params["pinned_ratio_bound"] = ExactReal(ratio_bound).to_double();
  report.params["sharpness_constant"] = constant.to_double();
  report.params["sharpness_constant_cap"] = cap.to_double();
  report.params["quotient"] = worst_quotient;
  report.params["pins"] = pins_json;
  report.finalize();
  return report;
}

VerificationReport check_mc_consistency(const SetFamily& family, const std::vector<Rational>& radii,
                                        const std::vector<Point>& pins, const McConfig& config) {
  VerificationReport report;
  report.check = "mc-crosscheck";
  report.seed = config.seed;
  const int d = family.dimension;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    McConfig cfg = config;
    cfg.seed = config.seed + k;
    const McEstimate est = mc_volume(family, radii[k], cfg);
    const Bracket b = family_bracket(family, radii[k]);
    // [ci_low, ci_high] meets [low, high] iff ci_high >= low and ci_low <= high.
    const std::string where = " at R = " + format_rational(radii[k]);
    report.add_mc("99% CI upper end >= analytic lower bound" + where, est.ci_high, est.ci_high, Relation::ge,
                  b.low.to_double(), b.low.to_double());
    report.add_mc("99% CI lower end <= analytic upper bound" + where, est.ci_low, est.ci_low, Relation::le,
                  b.high.to_double(), b.high.to_double());
  }
  if (!family.empty()) {
    std::vector<double> volumes;
    double total = 0;
    for (const auto& p : family.primitives) {
      volumes.push_back(primitive_volume(p, d).to_double());
      total += volumes.back();
    }
    for (std::size_t q = 0; q < pins.size(); ++q) {
      const std::string tag = "pin " + idx(static_cast<long>(q)) + ": ";
      const IntervalSet set = pinned_distance_set(pins[q], family);
      McConfig cfg = config;
      cfg.seed = config.seed + radii.size() + q;
      const auto sample = mc_pinned_distances(pins[q], family, cfg);
      std::vector<std::uint64_t> hits(set.size(), 0);
      std::uint64_t outside = 0;
      for (double v : sample) {
        if (auto k = set.find(v)) {
          ++hits[*k];
        } else {
          ++outside;
        }
      }
      report.add_mc(tag + "sampled distances outside D_pin(A)", static_cast<double>(outside),
                    static_cast<double>(outside), Relation::eq, 0, 0);
      std::vector<double> share(set.size(), 0);
      for (std::size_t i = 0; i < family.size(); ++i) {
        const Interval range = distance_range(pins[q], family.primitives[i]);
        if (auto k = set.find(range.lo_value())) share[*k] += volumes[i] / total;
      }
      for (std::size_t k = 0; k < set.size(); ++k) {
        if (share[k] < 0.01) continue;
        report.add_mc(tag + "component " + idx(static_cast<long>(k)) + " (volume share " + format_double(share[k]) +
                          ") receives samples",
                      static_cast<double>(hits[k]), static_cast<double>(hits[k]), Relation::ge, 1, 1);
      }
    }
  }
  report.params["dimension"] = d;
  report.params["samples"] = config.samples;
  report.params["chunk_size"] = config.chunk_size;
  report.finalize();
  return report;
}

}  // namespace dlab

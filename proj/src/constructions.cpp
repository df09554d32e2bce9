#include "density_lab/constructions.hpp"

#include <utility>

namespace dlab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw CertificationFailed("certificate failed: " + what);
}

std::string idx(int i) { return std::to_string(i); }

}  // namespace

Preset parse_preset(const std::string& name) {
  if (name == "paper") return Preset::paper;
  if (name == "relaxed") return Preset::relaxed;
  throw InvalidArgument("unknown preset '" + name + "' (expected paper or relaxed)");
}

BoxConstructionParams BoxConstructionParams::with_epsilon(int d, const Rational& epsilon, int count) {
  BoxConstructionParams p;
  p.d = d;
  p.epsilon = epsilon;
  p.count = count;
  if (sgn(epsilon) > 0) p.growth = Rational(101 * d) / epsilon;
  return p;
}

BoxConstructionParams BoxConstructionParams::paper(int d, int count) {
  return with_epsilon(d, Rational(1, 100000L * d), count);
}

BoxConstructionParams BoxConstructionParams::relaxed(int d, int count) {
  return with_epsilon(d, Rational(1, 100), count);
}

BoxConstructionParams BoxConstructionParams::from_preset(Preset preset, int d, int count) {
  return preset == Preset::paper ? paper(d, count) : relaxed(d, count);
}

void BoxConstructionParams::validate() const {
  if (d < 2) throw InvalidArgument("box construction requires d >= 2");
  if (count < 1) throw InvalidArgument("box construction requires N >= 1");
  if (sgn(epsilon) <= 0) throw InvalidArgument("box construction requires epsilon > 0");
  if (!(growth > Rational(100 * d) / epsilon)) {
    throw InvalidGrowth("growth factor K = " + format_rational(growth) + " must exceed 100d/epsilon = " +
                        format_rational(Rational(100 * d) / epsilon));
  }
}

const Rational& BoxConstruction::R(int i) const {
  if (i < 1 || i > count() + 1) throw InvalidArgument("R index out of range: " + idx(i));
  return R_[static_cast<std::size_t>(i)];
}

const Rational& BoxConstruction::side(int i) const {
  if (i < 0 || i > count()) throw InvalidArgument("side index out of range: " + idx(i));
  return side_[static_cast<std::size_t>(i)];
}

const Rational& BoxConstruction::offset(int i) const {
  if (i < 1 || i > count() + 1) throw InvalidArgument("offset index out of range: " + idx(i));
  return offset_[static_cast<std::size_t>(i)];
}

const AxisBox& BoxConstruction::box(int i) const {
  if (i < 1 || i > count()) throw InvalidArgument("box index out of range: " + idx(i));
  return std::get<AxisBox>(family_.primitives[static_cast<std::size_t>(i - 1)]);
}

std::optional<int> BoxConstruction::box_containing(const Point& y) const {
  auto k = family_.locate(y);
  if (!k) return std::nullopt;
  return static_cast<int>(*k) + 1;
}

void BoxConstruction::certify() {
  const int n = count();
  const int d = params_.d;
  const Rational two_eps_d = 2 * params_.epsilon * d;
  certificates_.clear();

  certificates_.push_back("K = " + format_rational(params_.growth) + " > 100d/epsilon");

  for (int i = 1; i <= n; ++i) {
    require(offset(i) < side(i) / (50 * d), "x1_" + idx(i) + " < l_" + idx(i) + "/(50d)");
  }
  certificates_.push_back("x1_i < l_i/(50d) for i = 1.." + idx(n));

  for (int i = 2; i <= n + 1; ++i) {
    const Rational radius = two_eps_d * R(i);
    require(offset(i - 1) + d * side(i - 1) < radius, "x1_" + idx(i - 1) + " + d l_" + idx(i - 1) + " < 2 eps d R_" + idx(i));
    require(radius < offset(i), "2 eps d R_" + idx(i) + " < x1_" + idx(i));
  }
  certificates_.push_back("x1_{i-1} + d l_{i-1} < 2 eps d R_i < x1_i for i = 2.." + idx(n + 1));

  for (int i = 1; i < n; ++i) {
    require(offset(i) + side(i) < offset(i + 1), "Q_" + idx(i) + " and Q_" + idx(i + 1) + " disjoint");
  }
  certificates_.push_back("Q_i pairwise disjoint (x1_i + l_i < x1_{i+1})");
}

BoxConstruction build_boxes(const BoxConstructionParams& params) {
  params.validate();
  const int n = params.count;
  const int d = params.d;
  BoxConstruction c;
  c.params_ = params;
  c.R_.assign(static_cast<std::size_t>(n + 2), Rational(0));
  c.side_.assign(static_cast<std::size_t>(n + 1), Rational(0));
  c.offset_.assign(static_cast<std::size_t>(n + 2), Rational(0));

  c.R_[1] = 1;
  Rational partial = 1;
  for (int i = 1; i <= n; ++i) {
    c.R_[static_cast<std::size_t>(i + 1)] = params.growth * partial;
    partial += c.R_[static_cast<std::size_t>(i + 1)];
  }
  c.side_[0] = 1;
  for (int i = 1; i <= n; ++i) c.side_[static_cast<std::size_t>(i)] = params.epsilon * c.R_[static_cast<std::size_t>(i + 1)];
  for (int i = 1; i <= n + 1; ++i) {
    const auto k = static_cast<std::size_t>(i);
    c.offset_[k] = c.offset_[k - 1] + c.side_[k - 1] + c.R_[k];
  }

  std::vector<Primitive> boxes;
  boxes.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    Point lo = Point::origin(d);
    lo[0] = c.offset_[k];
    Point hi(std::vector<Rational>(static_cast<std::size_t>(d), c.side_[k]));
    hi[0] += c.offset_[k];
    boxes.emplace_back(AxisBox{std::move(lo), std::move(hi)});
  }
  c.family_ = SetFamily(d, std::move(boxes), "boxes");
  c.certify();
  return c;
}

BoxConstruction restore_boxes(BoxConstructionParams params, std::vector<Rational> R, std::vector<Rational> side,
                              std::vector<Rational> offset) {
  BoxConstruction c = build_boxes(params);
  const auto n = static_cast<std::size_t>(params.count);
  if (R.size() != n + 1 || side.size() != n + 1 || offset.size() != n + 1) {
    throw InvalidArgument("stored sequences have the wrong length");
  }
  for (std::size_t i = 0; i <= n; ++i) {
    if (R[i] != c.R_[i + 1] || side[i] != c.side_[i] || offset[i] != c.offset_[i + 1]) {
      throw InvalidArgument("stored sequences disagree with the recurrence at position " + std::to_string(i));
    }
  }
  return c;
}

AnnuliConstructionParams AnnuliConstructionParams::with_epsilon0(int d, const Rational& epsilon0, int count,
                                                                 int start_index) {
  AnnuliConstructionParams p;
  p.d = d;
  p.epsilon0 = epsilon0;
  p.count = count;
  p.start_index = start_index;
  if (sgn(epsilon0) > 0) p.growth = Rational(101 * d) / epsilon0;
  return p;
}

void AnnuliConstructionParams::validate() const {
  if (d < 2) throw InvalidArgument("annuli construction requires d >= 2");
  if (count < 1) throw InvalidArgument("annuli construction requires N >= 1");
  if (start_index < 1) throw InvalidArgument("annuli construction requires start index >= 1");
  if (sgn(epsilon0) <= 0 || epsilon0 >= 1) throw InvalidArgument("annuli construction requires 0 < epsilon0 < 1");
  if (!(growth > Rational(100 * d) / epsilon0)) {
    throw InvalidGrowth("growth factor K = " + format_rational(growth) + " must exceed 100d/epsilon0 = " +
                        format_rational(Rational(100 * d) / epsilon0));
  }
}

const Rational& AnnuliConstruction::R(int i) const {
  if (i < 1 || i > last_index()) throw InvalidArgument("R index out of range: " + idx(i));
  return R_[static_cast<std::size_t>(i)];
}

const Annulus& AnnuliConstruction::annulus(int i) const {
  if (i < first_index() || i > last_index()) throw InvalidArgument("annulus index out of range: " + idx(i));
  return std::get<Annulus>(family_.primitives[static_cast<std::size_t>(i - first_index())]);
}

std::optional<int> AnnuliConstruction::annulus_containing(const Point& y) const {
  auto k = family_.locate(y);
  if (!k) return std::nullopt;
  return static_cast<int>(*k) + first_index();
}

void AnnuliConstruction::certify() {
  const int d = params_.d;
  const auto ud = static_cast<unsigned>(d);
  certificates_.clear();
  certificates_.push_back("K = " + format_rational(params_.growth) + " > 100d/epsilon0");
  for (int i = first_index(); i < last_index(); ++i) {
    require((1 + params_.epsilon0) * R(i) < R(i + 1), "(1+eps0) R_" + idx(i) + " < R_" + idx(i + 1));
  }
  certificates_.push_back("(1+eps0) R_i < R_{i+1}: annuli pairwise disjoint");
  Rational inner_sum = 0;
  for (int i = first_index(); i <= last_index(); ++i) {
    const Rational own = pow(R(i), ud);
    require(10 * inner_sum <= own, "sum_{j<" + idx(i) + "} R_j^d <= R_" + idx(i) + "^d / 10");
    inner_sum += own;
  }
  certificates_.push_back("sum_{j<i} |S_j| <= |S_i| / 10 (common factor c_d((1+eps0)^d - 1) cancelled)");
}

AnnuliConstruction build_annuli(const AnnuliConstructionParams& params) {
  params.validate();
  AnnuliConstruction c;
  c.params_ = params;
  const int last = params.start_index + params.count - 1;
  c.R_.assign(static_cast<std::size_t>(last + 1), Rational(0));
  c.R_[1] = 1;
  Rational partial = 1;
  for (int i = 2; i <= last; ++i) {
    c.R_[static_cast<std::size_t>(i)] = params.growth * partial;
    partial += c.R_[static_cast<std::size_t>(i)];
  }
  std::vector<Primitive> shells;
  for (int i = params.start_index; i <= last; ++i) {
    const Rational& r = c.R_[static_cast<std::size_t>(i)];
    shells.emplace_back(Annulus{r, (1 + params.epsilon0) * r, std::nullopt});
  }
  c.family_ = SetFamily(params.d, std::move(shells), "annuli");
  c.certify();
  return c;
}

AnnuliConstruction restore_annuli(AnnuliConstructionParams params, std::vector<Rational> R) {
  AnnuliConstruction c = build_annuli(params);
  if (R.size() + 1 != c.R_.size()) throw InvalidArgument("stored R sequence has the wrong length");
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (R[i] != c.R_[i + 1]) {
      throw InvalidArgument("stored R disagrees with the recurrence at position " + std::to_string(i + 1));
    }
  }
  return c;
}

RadiusSchedule canonical_schedule(const BoxConstruction& boxes) {
  std::vector<Rational> radii;
  std::vector<int> indices;
  const Rational factor = 2 * boxes.params().epsilon * boxes.params().d;
  for (int i = 2; i <= boxes.count() + 1; ++i) {
    radii.push_back(factor * boxes.R(i));
    indices.push_back(i);
  }
  return RadiusSchedule(std::move(radii), std::move(indices));
}

RadiusSchedule canonical_schedule(const AnnuliConstruction& annuli) {
  std::vector<Rational> radii;
  std::vector<int> indices;
  for (int i = annuli.first_index(); i <= annuli.last_index(); ++i) {
    radii.push_back((1 + annuli.params().epsilon0) * annuli.R(i));
    indices.push_back(i);
  }
  return RadiusSchedule(std::move(radii), std::move(indices));
}

RadiusSchedule::RadiusSchedule(std::vector<Rational> radii, std::vector<int> indices)
    : radii_(std::move(radii)), indices_(std::move(indices)) {
  if (!indices_.empty() && indices_.size() != radii_.size()) {
    throw InvalidArgument("schedule indices must match radii");
  }
  for (std::size_t k = 0; k < radii_.size(); ++k) {
    if (sgn(radii_[k]) <= 0) throw InvalidArgument("schedule radii must be positive");
    if (k > 0 && !(radii_[k - 1] < radii_[k])) throw InvalidArgument("schedule radii must be strictly increasing");
  }
}

RadiusSchedule RadiusSchedule::geometric(const Rational& r0, const Rational& ratio, int count) {
  if (count < 1) throw InvalidArgument("geometric schedule needs at least one term");
  if (sgn(r0) <= 0 || ratio <= 1) throw InvalidArgument("geometric schedule needs r0 > 0 and ratio > 1");
  std::vector<Rational> radii;
  Rational r = r0;
  for (int k = 0; k < count; ++k) {
    radii.push_back(r);
    r *= ratio;
  }
  return RadiusSchedule(std::move(radii));
}

std::optional<int> RadiusSchedule::index_at(std::size_t k) const {
  if (indices_.empty()) return std::nullopt;
  return indices_.at(k);
}

RadiusSchedule RadiusSchedule::scaled(const Rational& factor) const {
  std::vector<Rational> radii = radii_;
  for (auto& r : radii) r *= factor;
  return RadiusSchedule(std::move(radii), indices_);
}

}  // namespace dlab

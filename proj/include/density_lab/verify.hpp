#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "density_lab/constructions.hpp"
#include "density_lab/exact.hpp"
#include "density_lab/geometry.hpp"
#include "density_lab/measure.hpp"
#include "density_lab/schedule.hpp"

namespace dlab {

class PinOutsideFamily : public Error {
 public:
  using Error::Error;
};

class ScheduleTooShort : public Error {
 public:
  using Error::Error;
};

enum class Relation { le, lt, ge, gt, eq };
enum class Outcome { holds, violated, undecided };
enum class Verdict { pass, fail, inconclusive };

std::string to_string(Relation r);
std::string to_string(Outcome o);
std::string to_string(Verdict v);
Relation parse_relation(const std::string& s);
Outcome parse_outcome(const std::string& s);
Verdict parse_verdict(const std::string& s);

/// One checked inequality.  lhs/rhs are rendered values ("[lo, hi]" for
/// brackets); the outcome is decided before rendering.
struct ReportItem {
  std::string desc;
  std::string lhs;
  std::string rhs;
  Relation rel = Relation::le;
  EvalMode mode = EvalMode::exact;
  Outcome outcome = Outcome::holds;
};

/// fail: some exact or bracketed item is certifiably violated.
/// inconclusive: no certified violation but some item is undecided
/// (Monte Carlo items are never counted as violations).
Verdict recompute_verdict(const std::vector<ReportItem>& items);

struct VerificationReport {
  std::string check;
  Verdict verdict = Verdict::pass;
  std::vector<ReportItem> items;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;

  /// Both sides exact; compared in exact arithmetic.
  const ReportItem& add_exact(std::string desc, const ExactReal& lhs, Relation rel, const ExactReal& rhs);

  /// Both sides given as certified enclosures.
  const ReportItem& add_bracket(std::string desc, const ExactReal& lhs_lo, const ExactReal& lhs_hi, Relation rel,
                                const ExactReal& rhs_lo, const ExactReal& rhs_hi,
                                EvalMode mode = EvalMode::bracketed);

  /// Enclosures in floating point (Monte Carlo confidence intervals).
  const ReportItem& add_mc(std::string desc, double lhs_lo, double lhs_hi, Relation rel, double rhs_lo,
                           double rhs_hi);

  void finalize() { verdict = recompute_verdict(items); }

  std::size_t count(Outcome o) const;
  int exit_code() const;
};

// -- Inequality checks on families -----------------------------------------

/// |A ∩ B(0,R)| <= |S^{d-1}| * |D_0(A) ∩ [0,R]| * R^{d-1} at each radius.
VerificationReport check_annular_bound(const SetFamily& family, const std::vector<Rational>& radii);
VerificationReport check_annular_bound(const SetFamily& family, const Rational& radius);

/// `count` disjoint origin-centred annuli with random rational radii.
SetFamily random_annuli_family(int d, int count, std::uint64_t seed);

/// Annular bound over `families` random annuli families, `radii` random radii
/// each.  Records the tightest radius per family.
VerificationReport check_annular_bound_random(int families, int radii, std::uint64_t seed, int max_annuli = 50);

/// max_R ratio(D_pin(A), R) >= max_R ratio_low(A - pin, R) / (2 |S^{d-1}|) - 1e-12.
VerificationReport check_pinned_density_theorem(const SetFamily& family, const Point& pin,
                                                const RadiusSchedule& schedule);

/// |ratio(A - x, R) - ratio(A, R)| <= ((R + |x|)^d - R^d) / R^d at each radius.
/// Bracketed measures are refined by mc_volume when config.samples > 0.
VerificationReport check_translation_invariance(const SetFamily& family, const Point& x,
                                                const RadiusSchedule& schedule, const McConfig& config);

/// Finite-radius additivity, subadditivity and monotonicity of density ratios
/// for disjoint A and B.  Throws OverlapDetected otherwise.
VerificationReport check_subadditivity_monotonicity(const SetFamily& a, const SetFamily& b,
                                                    const RadiusSchedule& schedule);

// -- Construction checks -----------------------------------------------------

/// For each pin in Q_{i0} (i0 < M) and m in [M, N]: the distance range to Q_m
/// lies in [R_m, 2 eps sqrt(d) R_{m+1}], and the gaps between consecutive
/// ranges are positive and strictly increasing.
VerificationReport check_counterexample(const BoxConstruction& boxes, const std::vector<Point>& pins, int first_index);

/// Grid of k^d pins inside Q_i (cell centres of a k x ... x k subdivision).
std::vector<Point> grid_pins(const BoxConstruction& boxes, int box_index, int per_axis);

/// Sharpness of the pinned-density bound on thin annuli: containment of each
/// D_pin(S_i) in the widened bracket, the pinned-ratio bound
/// 2 eps0 / (1 - eps0/2) in the pigeonhole regime, and the quotient of pinned
/// and ambient ratios against the derived constant.
VerificationReport check_sharpness(const AnnuliConstruction& annuli, const std::vector<Point>& pins,
                                   const RadiusSchedule& schedule);

/// The eps0-dependent constant [2 eps0/(1 - eps0/2)] (1+eps0)^d / (omega_d ((1+eps0)^d - 1)).
ExactReal sharpness_constant(int d, const Rational& epsilon0);
/// eps0-free cap (8/3)(3/2)^d / |S^{d-1}|, valid for eps0 <= 1/2.
ExactReal sharpness_constant_cap(int d);

/// Monte Carlo cross-check: CI of mc_volume against the analytic bracket at
/// each radius, and mc_pinned_distances against the analytic pinned set.
VerificationReport check_mc_consistency(const SetFamily& family, const std::vector<Rational>& radii,
                                        const std::vector<Point>& pins, const McConfig& config);

}  // namespace dlab

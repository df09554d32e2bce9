#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "density_lab/exact.hpp"
#include "density_lab/geometry.hpp"
#include "density_lab/schedule.hpp"

namespace dlab {

enum class EvalMode { exact, bracketed, monte_carlo };

std::string to_string(EvalMode mode);
EvalMode parse_eval_mode(const std::string& text);

/// omega_d = pi^{d/2} / Gamma(d/2 + 1), kept as rational * pi^{floor(d/2)}.
ExactReal unit_ball_volume(int d);
/// |S^{d-1}| = d * omega_d.
ExactReal sphere_area(int d);

ExactReal primitive_volume(const Primitive& p, int d);

/// Certified enclosure of a volume.
struct VolumeBracket {
  ExactReal low;
  ExactReal high;
  bool exact() const { return low == high; }
};

/// |P ∩ B(0, R)|.  Exact for origin-centred shells and for boxes and shifted
/// shells lying entirely inside or outside the ball; otherwise a certified
/// bracket.
VolumeBracket ball_intersection_volume(const Primitive& p, int d, const Rational& radius);

struct DensityEstimate {
  Rational radius;
  ExactReal measure_low;
  ExactReal measure_high;
  int dimension = 2;  // denominator is radius^dimension
  EvalMode mode = EvalMode::exact;

  ExactReal ratio_low() const;
  ExactReal ratio_high() const;
  double radius_value() const;
  double measure_low_value() const { return measure_low.to_double(); }
  double measure_high_value() const { return measure_high.to_double(); }
  double ratio_low_value() const { return ratio_low().to_double(); }
  double ratio_high_value() const { return ratio_high().to_double(); }
};

/// |family ∩ B(0, R)| / R^d along the schedule.
std::vector<DensityEstimate> density_profile(const SetFamily& family, const RadiusSchedule& schedule);

/// |set ∩ [0, R]| / R along the schedule.
std::vector<DensityEstimate> pinned_density_profile(const IntervalSet& set, const RadiusSchedule& schedule);

/// max over the profile of ratio_low: a certified lower bound for the limsup
/// along the schedule.
ExactReal max_ratio_low(const std::vector<DensityEstimate>& profile);

/// CSV with columns radius,measure_low,measure_high,ratio_low,ratio_high,mode
/// preceded by a "# schema_version=1" line.
std::string profile_csv(const std::vector<DensityEstimate>& profile);

// ---------------------------------------------------------------------------
// Monte Carlo oracle

struct McConfig {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::uint64_t chunk_size = 1U << 16U;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct McEstimate {
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double ball_volume = 0;
  double estimate = 0;
  double ci_low = 0;   // 99% Wilson interval, scaled by the ball volume
  double ci_high = 0;
};

/// Uniform samples in B(0, R); estimate of |family ∩ B(0, R)|.
/// Output depends only on (seed, samples, chunk_size).
McEstimate mc_volume(const SetFamily& family, const Rational& radius, const McConfig& config);

/// Distances |pin - y| for y drawn uniformly from the family (primitives
/// chosen with probability proportional to volume).
std::vector<double> mc_pinned_distances(const Point& pin, const SetFamily& family, const McConfig& config);

/// 99% two-sided Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t samples);

}  // namespace dlab

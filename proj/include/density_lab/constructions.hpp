#pragma once

#include <string>
#include <vector>

#include "density_lab/exact.hpp"
#include "density_lab/geometry.hpp"
#include "density_lab/schedule.hpp"

namespace dlab {

class InvalidGrowth : public Error {
 public:
  using Error::Error;
};

/// Raised when a defining inequality of a construction cannot be certified.
class CertificationFailed : public Error {
 public:
  using Error::Error;
};

enum class Preset { paper, relaxed };

Preset parse_preset(const std::string& name);

struct BoxConstructionParams {
  int d = 2;
  Rational epsilon;
  Rational growth;  // K; must exceed 100 d / epsilon
  int count = 1;

  /// epsilon = 1/(10^5 d), K = 101 d / epsilon.
  static BoxConstructionParams paper(int d, int count);
  /// epsilon = 1/100, K = 101 d / epsilon.
  static BoxConstructionParams relaxed(int d, int count);
  static BoxConstructionParams with_epsilon(int d, const Rational& epsilon, int count);
  static BoxConstructionParams from_preset(Preset preset, int d, int count);

  void validate() const;
};

/// Rapidly inflating boxes Q_i = (x1_i, 0, ..., 0) + [0, l_i]^d, i = 1..N,
/// with R_1 = 1, R_{i+1} = K * sum_{j<=i} R_j, l_0 = 1, l_i = epsilon R_{i+1},
/// x1_i = sum_{j<=i} (l_{j-1} + R_j).
class BoxConstruction {
 public:
  const BoxConstructionParams& params() const { return params_; }
  int count() const { return params_.count; }

  /// R_i for 1 <= i <= N + 1.
  const Rational& R(int i) const;
  /// l_i for 0 <= i <= N.
  const Rational& side(int i) const;
  /// x1_i for 1 <= i <= N + 1 (x1_{N+1} locates the first box beyond the truncation).
  const Rational& offset(int i) const;
  /// Q_i for 1 <= i <= N.
  const AxisBox& box(int i) const;

  const SetFamily& family() const { return family_; }
  const std::vector<std::string>& certificates() const { return certificates_; }

  /// Index i of the box Q_i containing y, if any.
  std::optional<int> box_containing(const Point& y) const;

  friend BoxConstruction build_boxes(const BoxConstructionParams& params);
  friend BoxConstruction restore_boxes(BoxConstructionParams params, std::vector<Rational> R,
                                       std::vector<Rational> side, std::vector<Rational> offset);

 private:
  void certify();

  BoxConstructionParams params_;
  std::vector<Rational> R_;       // index 0 unused
  std::vector<Rational> side_;    // index 0 is l_0
  std::vector<Rational> offset_;  // index 0 unused
  SetFamily family_;
  std::vector<std::string> certificates_;
};

BoxConstruction build_boxes(const BoxConstructionParams& params);

/// Rebuilds a construction from stored sequences; re-certifies and checks the
/// sequences against the recurrences.
BoxConstruction restore_boxes(BoxConstructionParams params, std::vector<Rational> R, std::vector<Rational> side,
                              std::vector<Rational> offset);

struct AnnuliConstructionParams {
  int d = 2;
  Rational epsilon0{1, 100};
  Rational growth;  // K; must exceed 100 d / epsilon0
  int start_index = 1;
  int count = 1;

  static AnnuliConstructionParams with_epsilon0(int d, const Rational& epsilon0, int count, int start_index = 1);

  void validate() const;
};

/// Thin origin-centred annuli S_i = { R_i <= |y| <= (1 + eps0) R_i } for
/// i = start .. start + N - 1, with the same radius recurrence as the boxes.
class AnnuliConstruction {
 public:
  const AnnuliConstructionParams& params() const { return params_; }
  int first_index() const { return params_.start_index; }
  int last_index() const { return params_.start_index + params_.count - 1; }

  const Rational& R(int i) const;
  const Annulus& annulus(int i) const;
  const SetFamily& family() const { return family_; }
  const std::vector<std::string>& certificates() const { return certificates_; }

  std::optional<int> annulus_containing(const Point& y) const;

  friend AnnuliConstruction build_annuli(const AnnuliConstructionParams& params);
  friend AnnuliConstruction restore_annuli(AnnuliConstructionParams params, std::vector<Rational> R);

 private:
  void certify();

  AnnuliConstructionParams params_;
  std::vector<Rational> R_;  // index 0 unused
  SetFamily family_;
  std::vector<std::string> certificates_;
};

AnnuliConstruction build_annuli(const AnnuliConstructionParams& params);
AnnuliConstruction restore_annuli(AnnuliConstructionParams params, std::vector<Rational> R);

/// Radii 2 eps d R_i, i = 2 .. N + 1.  Inside each such ball the truncation
/// coincides with the infinite construction: Q_1..Q_{i-1} fully, nothing else.
RadiusSchedule canonical_schedule(const BoxConstruction& boxes);

/// Radii (1 + eps0) R_i over the family's indices.
RadiusSchedule canonical_schedule(const AnnuliConstruction& annuli);

}  // namespace dlab

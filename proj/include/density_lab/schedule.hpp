#pragma once

#include <optional>
#include <vector>

#include "density_lab/exact.hpp"

namespace dlab {

/// Strictly increasing positive radii at which densities are evaluated.
/// `indices` optionally records the construction index each radius came from.
class RadiusSchedule {
 public:
  RadiusSchedule() = default;
  explicit RadiusSchedule(std::vector<Rational> radii, std::vector<int> indices = {});

  /// r0 * g^k for k = 0..count-1.
  static RadiusSchedule geometric(const Rational& r0, const Rational& ratio, int count);

  const std::vector<Rational>& radii() const { return radii_; }
  const std::vector<int>& indices() const { return indices_; }
  std::optional<int> index_at(std::size_t k) const;
  std::size_t size() const { return radii_.size(); }
  bool empty() const { return radii_.empty(); }
  const Rational& operator[](std::size_t k) const { return radii_[k]; }

  RadiusSchedule scaled(const Rational& factor) const;

 private:
  std::vector<Rational> radii_;
  std::vector<int> indices_;
};

}  // namespace dlab

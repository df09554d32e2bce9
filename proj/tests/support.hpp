#pragma once

#include <initializer_list>
#include <string>

#include "density_lab/exact.hpp"
#include "density_lab/geometry.hpp"

namespace t {

inline dlab::Rational q(long p, long r = 1) { return dlab::frac(p, r); }
inline dlab::Rational q(const std::string& s) { return dlab::parse_rational(s); }

inline dlab::Point pt(std::initializer_list<dlab::Rational> c) { return dlab::Point(std::vector<dlab::Rational>(c)); }

inline dlab::AxisBox box(std::initializer_list<dlab::Rational> lo, std::initializer_list<dlab::Rational> hi) {
  return dlab::AxisBox{pt(lo), pt(hi)};
}

}  // namespace t

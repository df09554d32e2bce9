#include "density_lab/measure.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "density_lab/format.hpp"

namespace dlab {

std::string to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::exact:
      return "exact";
    case EvalMode::bracketed:
      return "bracketed";
    default:
      return "monteCarlo";
  }
}

EvalMode parse_eval_mode(const std::string& text) {
  if (text == "exact") return EvalMode::exact;
  if (text == "bracketed") return EvalMode::bracketed;
  if (text == "monteCarlo") return EvalMode::monte_carlo;
  throw InvalidArgument("unknown mode '" + text + "'");
}

ExactReal unit_ball_volume(int d) {
  if (d < 1) throw InvalidArgument("unit_ball_volume requires d >= 1");
  const int m = d / 2;
  Rational coeff = 1;
  if (d % 2 == 0) {
    for (int k = 2; k <= m; ++k) coeff /= k;
  } else {
    // 2^{m+1} / d!!
    coeff = pow(Rational(2), static_cast<unsigned>(m + 1));
    for (int k = d; k > 1; k -= 2) coeff /= k;
  }
  return ExactReal::term(coeff, m, 1);
}

ExactReal sphere_area(int d) { return unit_ball_volume(d) * Rational(d); }

namespace {

const auto kWilsonZ = 2.5758293035489004;  // two-sided 99%

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

// |origin-centred shell ∩ B(0, r)|
ExactReal centred_shell_volume(const Rational& inner, const Rational& outer, const Rational& r, int d) {
  if (sgn(r) <= 0 || r <= inner) return ExactReal();
  const auto ud = static_cast<unsigned>(d);
  const Rational top = r < outer ? r : outer;
  return unit_ball_volume(d) * Rational(pow(top, ud) - pow(inner, ud));
}

Rational min_distance_squared(const AxisBox& box) {
  Rational s = 0;
  for (std::size_t j = 0; j < box.lo.coords.size(); ++j) {
    Rational t = 0;
    if (sgn(box.lo[j]) > 0) {
      t = box.lo[j];
    } else if (sgn(box.hi[j]) < 0) {
      t = -box.hi[j];
    }
    s += t * t;
  }
  return s;
}

Rational max_distance_squared(const AxisBox& box) {
  Rational s = 0;
  for (std::size_t j = 0; j < box.lo.coords.size(); ++j) {
    Rational a = box.lo[j] * box.lo[j];
    Rational b = box.hi[j] * box.hi[j];
    s += a > b ? a : b;
  }
  return s;
}

Rational box_volume(const AxisBox& box) {
  Rational v = 1;
  for (std::size_t j = 0; j < box.lo.coords.size(); ++j) v *= box.hi[j] - box.lo[j];
  return v;
}

VolumeBracket box_ball_volume(const AxisBox& box, int d, const Rational& radius) {
  const Rational r2 = radius * radius;
  if (min_distance_squared(box) >= r2) return {ExactReal(), ExactReal()};
  const Rational full = box_volume(box);
  if (max_distance_squared(box) <= r2) return {full, full};
  // The cube [-s, s]^d with s <= R / sqrt(d) is inscribed in the ball.
  const Rational s = radius / sqrt_bounds(Rational(d)).second;
  Rational inner = 1;
  for (std::size_t j = 0; j < box.lo.coords.size(); ++j) {
    const Rational lo = box.lo[j] > -s ? box.lo[j] : Rational(-s);
    const Rational hi = box.hi[j] < s ? box.hi[j] : s;
    if (hi <= lo) {
      inner = 0;
      break;
    }
    inner *= hi - lo;
  }
  const ExactReal ball = unit_ball_volume(d) * pow(radius, static_cast<unsigned>(d));
  return {ExactReal(inner), min(ExactReal(full), ball)};
}

VolumeBracket shell_ball_volume(const Shell& shell, int d, const Rational& radius) {
  const Rational t2 = shell.center.norm_squared();
  if (sgn(t2) == 0) {
    ExactReal v = centred_shell_volume(shell.inner, shell.outer, radius, d);
    return {v, v};
  }
  const ExactReal full = centred_shell_volume(shell.inner, shell.outer, shell.outer, d);
  const Rational reach = radius + shell.outer;
  if (t2 >= reach * reach) return {ExactReal(), ExactReal()};
  const Rational hole_room = shell.inner - radius;
  if (sgn(hole_room) >= 0 && t2 <= hole_room * hole_room) return {ExactReal(), ExactReal()};
  const Rational inside_room = radius - shell.outer;
  if (sgn(inside_room) >= 0 && t2 <= inside_room * inside_room) return {full, full};
  // B(c, R - t) ⊆ B(0, R) ⊆ B(c, R + t) for t = |c|.
  const Rational t_hi = sqrt_bounds(t2).second;
  ExactReal low = centred_shell_volume(shell.inner, shell.outer, radius - t_hi, d);
  ExactReal high = min(full, centred_shell_volume(shell.inner, shell.outer, radius + t_hi, d));
  high = min(high, unit_ball_volume(d) * pow(radius, static_cast<unsigned>(d)));
  return {std::move(low), std::move(high)};
}

}  // namespace

ExactReal primitive_volume(const Primitive& p, int d) {
  if (const auto* box = std::get_if<AxisBox>(&p)) return box_volume(*box);
  const Shell s = as_shell(p, d);
  return centred_shell_volume(s.inner, s.outer, s.outer, d);
}

VolumeBracket ball_intersection_volume(const Primitive& p, int d, const Rational& radius) {
  if (sgn(radius) <= 0) throw InvalidArgument("ball_intersection_volume requires R > 0");
  if (const auto* box = std::get_if<AxisBox>(&p)) return box_ball_volume(*box, d, radius);
  return shell_ball_volume(as_shell(p, d), d, radius);
}

ExactReal DensityEstimate::ratio_low() const {
  return measure_low / pow(radius, static_cast<unsigned>(dimension));
}

ExactReal DensityEstimate::ratio_high() const {
  return measure_high / pow(radius, static_cast<unsigned>(dimension));
}

double DensityEstimate::radius_value() const { return ExactReal(radius).to_double(); }

std::vector<DensityEstimate> density_profile(const SetFamily& family, const RadiusSchedule& schedule) {
  if (schedule.empty()) throw InvalidArgument("density_profile requires a nonempty schedule");
  std::vector<DensityEstimate> out;
  out.reserve(schedule.size());
  for (const auto& radius : schedule.radii()) {
    DensityEstimate e;
    e.radius = radius;
    e.dimension = family.dimension;
    for (const auto& p : family.primitives) {
      VolumeBracket b = ball_intersection_volume(p, family.dimension, radius);
      if (!b.exact()) e.mode = EvalMode::bracketed;
      e.measure_low += b.low;
      e.measure_high += b.high;
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<DensityEstimate> pinned_density_profile(const IntervalSet& set, const RadiusSchedule& schedule) {
  if (schedule.empty()) throw InvalidArgument("pinned_density_profile requires a nonempty schedule");
  std::vector<DensityEstimate> out;
  out.reserve(schedule.size());
  for (const auto& radius : schedule.radii()) {
    DensityEstimate e;
    e.radius = radius;
    e.dimension = 1;
    e.measure_low = measure_up_to(set, radius);
    e.measure_high = e.measure_low;
    out.push_back(std::move(e));
  }
  return out;
}

ExactReal max_ratio_low(const std::vector<DensityEstimate>& profile) {
  ExactReal best;
  for (const auto& e : profile) best = max(best, e.ratio_low());
  return best;
}

std::string profile_csv(const std::vector<DensityEstimate>& profile) {
  std::ostringstream out;
  out << "# schema_version=1\n";
  out << "radius,measure_low,measure_high,ratio_low,ratio_high,mode\n";
  for (const auto& e : profile) {
    out << format_double(e.radius_value()) << ',' << format_double(e.measure_low_value()) << ','
        << format_double(e.measure_high_value()) << ',' << format_double(e.ratio_low_value()) << ','
        << format_double(e.ratio_high_value()) << ',' << to_string(e.mode) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

struct FastPrimitive {
  int kind = 0;  // 0 box, 1 shell
  std::vector<double> lo, hi, center;
  double inner = 0, outer = 0;
  double volume = 0;
};

FastPrimitive to_fast(const Primitive& p, int d) {
  FastPrimitive f;
  f.volume = primitive_volume(p, d).to_double();
  if (const auto* box = std::get_if<AxisBox>(&p)) {
    for (int j = 0; j < d; ++j) {
      f.lo.push_back(ExactReal(box->lo[static_cast<std::size_t>(j)]).to_double());
      f.hi.push_back(ExactReal(box->hi[static_cast<std::size_t>(j)]).to_double());
    }
    return f;
  }
  const Shell s = as_shell(p, d);
  f.kind = 1;
  for (const auto& c : s.center.coords) f.center.push_back(ExactReal(c).to_double());
  f.inner = ExactReal(s.inner).to_double();
  f.outer = ExactReal(s.outer).to_double();
  return f;
}

bool fast_contains(const FastPrimitive& f, const std::vector<double>& y) {
  if (f.kind == 0) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] < f.lo[j] || y[j] > f.hi[j]) return false;
    }
    return true;
  }
  double r2 = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double t = y[j] - f.center[j];
    r2 += t * t;
  }
  return r2 >= f.inner * f.inner && r2 <= f.outer * f.outer;
}

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32U)};
  return std::mt19937_64(seq);
}

// Unit vector uniformly distributed on S^{d-1}.
void random_direction(std::mt19937_64& rng, std::vector<double>& dir) {
  std::normal_distribution<double> normal;
  double n2 = 0;
  do {
    n2 = 0;
    for (auto& v : dir) {
      v = normal(rng);
      n2 += v * v;
    }
  } while (n2 == 0);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& v : dir) v *= inv;
}

template <class ChunkFn>
void for_each_chunk(std::uint64_t chunks, unsigned workers, ChunkFn&& fn) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t c = next++; c < chunks; c = next++) fn(c);
    });
  }
  for (auto& t : pool) t.join();
}

std::uint64_t chunk_count(const McConfig& config) {
  if (config.chunk_size == 0) throw InvalidArgument("chunk size must be positive");
  return (config.samples + config.chunk_size - 1) / config.chunk_size;
}

std::uint64_t chunk_length(const McConfig& config, std::uint64_t c) {
  const std::uint64_t begin = c * config.chunk_size;
  return std::min(config.chunk_size, config.samples - begin);
}

}  // namespace

std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t samples) {
  if (samples == 0) return {0.0, 1.0};
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = kWilsonZ / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  // the exact interval has lo = 0 at hits = 0 and hi = 1 at hits = n
  const double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = hits == samples ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

McEstimate mc_volume(const SetFamily& family, const Rational& radius, const McConfig& config) {
  if (config.samples < 1) throw InvalidArgument("mc_volume requires samples >= 1");
  if (sgn(radius) <= 0) throw InvalidArgument("mc_volume requires R > 0");
  const int d = family.dimension;
  std::vector<FastPrimitive> prims;
  prims.reserve(family.size());
  for (const auto& p : family.primitives) prims.push_back(to_fast(p, d));
  const double r = ExactReal(radius).to_double();

  const std::uint64_t chunks = chunk_count(config);
  std::vector<std::uint64_t> hits(chunks, 0);
  for_each_chunk(chunks, config.workers, [&](std::uint64_t c) {
    auto rng = chunk_engine(config.seed, c);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> y(static_cast<std::size_t>(d));
    std::uint64_t local = 0;
    for (std::uint64_t k = 0, n = chunk_length(config, c); k < n; ++k) {
      random_direction(rng, y);
      const double scale = r * std::pow(uniform(rng), 1.0 / d);
      for (auto& v : y) v *= scale;
      for (const auto& f : prims) {
        if (fast_contains(f, y)) {
          ++local;
          break;
        }
      }
    }
    hits[c] = local;
  });

  McEstimate est;
  est.samples = config.samples;
  for (auto h : hits) est.hits += h;
  est.ball_volume = (unit_ball_volume(d) * pow(radius, static_cast<unsigned>(d))).to_double();
  est.estimate = est.ball_volume * static_cast<double>(est.hits) / static_cast<double>(est.samples);
  const auto [lo, hi] = wilson_interval(est.hits, est.samples);
  est.ci_low = est.ball_volume * lo;
  est.ci_high = est.ball_volume * hi;
  return est;
}

std::vector<double> mc_pinned_distances(const Point& pin, const SetFamily& family, const McConfig& config) {
  if (pin.dimension() != family.dimension) throw DimensionMismatch("mc_pinned_distances: pin dimension");
  if (family.empty() || config.samples == 0) return {};
  const int d = family.dimension;
  std::vector<FastPrimitive> prims;
  std::vector<double> cumulative;
  double total = 0;
  for (const auto& p : family.primitives) {
    prims.push_back(to_fast(p, d));
    total += prims.back().volume;
    cumulative.push_back(total);
  }
  std::vector<double> x;
  for (const auto& c : pin.coords) x.push_back(ExactReal(c).to_double());

  const std::uint64_t chunks = chunk_count(config);
  std::vector<std::vector<double>> parts(chunks);
  for_each_chunk(chunks, config.workers, [&](std::uint64_t c) {
    auto rng = chunk_engine(config.seed, c);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> y(static_cast<std::size_t>(d));
    auto& out = parts[c];
    const std::uint64_t n = chunk_length(config, c);
    out.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
      const double pick = uniform(rng) * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
      if (it == cumulative.end()) --it;
      const auto& f = prims[static_cast<std::size_t>(it - cumulative.begin())];
      if (f.kind == 0) {
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = f.lo[j] + uniform(rng) * (f.hi[j] - f.lo[j]);
      } else {
        random_direction(rng, y);
        // radius with density proportional to r^{d-1} on [inner, outer]
        const double alpha = std::pow(f.inner / f.outer, d);
        const double rad = f.outer * std::pow(alpha + uniform(rng) * (1.0 - alpha), 1.0 / d);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = f.center[j] + rad * y[j];
      }
      double s = 0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double t = y[j] - x[j];
        s += t * t;
      }
      out.push_back(std::sqrt(s));
    }
  });
  std::vector<double> all;
  all.reserve(config.samples);
  for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  return all;
}

}  // namespace dlab

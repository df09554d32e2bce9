#include <doctest.h>

#include <cmath>

#include "density_lab/constructions.hpp"
#include "density_lab/measure.hpp"
#include "support.hpp"

using namespace dlab;
using t::pt;
using t::q;

namespace {

const ExactReal kPi = ExactReal::pi_power(1);

Primitive dilate(const Primitive& p, const Rational& s) {
  if (const auto* b = std::get_if<AxisBox>(&p)) {
    AxisBox out = *b;
    for (auto& c : out.lo.coords) c *= s;
    for (auto& c : out.hi.coords) c *= s;
    return out;
  }
  if (const auto* a = std::get_if<Annulus>(&p)) return Annulus{a->inner * s, a->outer * s, std::nullopt};
  Ball b = std::get<Ball>(p);
  for (auto& c : b.center.coords) c *= s;
  b.radius *= s;
  return b;
}

// Fraction of a fine grid of cell centres of the box lying in B(0, R).
double grid_area(const AxisBox& b, double r, int n) {
  const double x0 = b.lo[0].get_d(), y0 = b.lo[1].get_d();
  const double w = b.hi[0].get_d() - x0, h = b.hi[1].get_d() - y0;
  long hits = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = x0 + w * (i + 0.5) / n, y = y0 + h * (j + 0.5) / n;
      if (x * x + y * y <= r * r) ++hits;
    }
  }
  return w * h * static_cast<double>(hits) / (static_cast<double>(n) * n);
}

}  // namespace

TEST_CASE("unit ball volume and sphere area") {
  CHECK(unit_ball_volume(2) == kPi);
  CHECK(sphere_area(2) == kPi * q(2));
  CHECK(unit_ball_volume(3) == kPi * q(4, 3));
  CHECK(sphere_area(3) == kPi * q(4));
  for (int d = 1; d <= 10; ++d) {
    const double oracle = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1);
    CHECK(unit_ball_volume(d).to_double() == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(sphere_area(d) == unit_ball_volume(d) * q(d));
  }
  CHECK_THROWS(unit_ball_volume(0));
}

TEST_CASE("primitive volumes") {
  CHECK(primitive_volume(t::box({0, 0, 0}, {q(3, 2), q(3, 2), q(3, 2)}), 3) == ExactReal(q(27, 8)));
  const Rational r = 7, e = q(1, 100);
  CHECK(primitive_volume(Annulus{r, (1 + e) * r, std::nullopt}, 2) == kPi * Rational(r * r * ((1 + e) * (1 + e) - 1)));
  CHECK(primitive_volume(Ball{pt({5, 5, 5}), 1}, 3) == kPi * q(4, 3));
}

TEST_CASE("ball intersection volumes") {
  auto v = ball_intersection_volume(Annulus{1, 2, std::nullopt}, 2, q(3, 2));
  CHECK(v.exact());
  CHECK(v.low == kPi * q(5, 4));
  CHECK(ball_intersection_volume(Annulus{1, 2, std::nullopt}, 2, q(1, 2)).low.is_zero());
  CHECK(ball_intersection_volume(Ball{pt({0, 0}), 2}, 2, 1).low == kPi);

  const auto c = build_boxes(BoxConstructionParams::relaxed(2, 5));
  const Rational radius = 2 * c.params().epsilon * 2 * c.R(4);
  const auto in = ball_intersection_volume(c.box(3), 2, radius);
  CHECK(in.exact());
  CHECK(in.low == ExactReal(c.side(3) * c.side(3)));
  const auto out = ball_intersection_volume(c.box(4), 2, radius);
  CHECK(out.exact());
  CHECK(out.low.is_zero());

  const AxisBox unit = t::box({0, 0}, {1, 1});
  const auto straddle = ball_intersection_volume(unit, 2, 1);
  CHECK_FALSE(straddle.exact());
  CHECK(straddle.low < straddle.high);
  CHECK(straddle.low.to_double() <= M_PI / 4);
  CHECK(straddle.high.to_double() >= M_PI / 4);
}

TEST_CASE("box brackets enclose grid-integrated areas") {
  const std::vector<AxisBox> boxes{t::box({0, 0}, {1, 1}), t::box({-3, 1}, {2, 2}), t::box({q(1, 2), -4}, {5, 4}),
                                   t::box({-2, -2}, {2, 2})};
  for (const auto& b : boxes) {
    for (const Rational& r : {q(1, 2), q(3, 2), q(5, 2), q(4), q(9, 2)}) {
      const auto v = ball_intersection_volume(b, 2, r);
      const double area = grid_area(b, r.get_d(), 1000);
      const double cell = Rational((b.hi[0] - b.lo[0]) * (b.hi[1] - b.lo[1])).get_d() / 1000.0 * 8;
      CHECK(v.low.to_double() <= area + cell);
      CHECK(v.high.to_double() >= area - cell);
    }
  }
}

TEST_CASE("off-centre shells are bracketed soundly") {
  const Annulus shifted{1, 2, pt({q(1, 2), 0})};
  for (const Rational& r : {q(1, 4), q(1), q(2), q(3), q(4)}) {
    const auto v = ball_intersection_volume(shifted, 2, r);
    // Monte Carlo with 4*10^5 samples as a loose oracle
    McConfig cfg;
    cfg.samples = 400000;
    cfg.seed = 5;
    const auto est = mc_volume(SetFamily(2, {shifted}), r, cfg);
    CHECK(est.ci_high >= v.low.to_double());
    CHECK(est.ci_low <= v.high.to_double());
  }
  CHECK(ball_intersection_volume(shifted, 2, 3).exact());  // r >= 1/2 + 2 contains the shell
}

TEST_CASE("density profile of the box construction is at least (2d)^-d") {
  for (int d = 2; d <= 3; ++d) {
    const auto c = build_boxes(BoxConstructionParams::relaxed(d, 6));
    const auto prof = density_profile(c.family(), canonical_schedule(c));
    for (const auto& e : prof) {
      CHECK(e.mode == EvalMode::exact);
      CHECK(e.ratio_low() >= ExactReal(1 / pow(Rational(2 * d), static_cast<unsigned>(d))));
    }
  }
  const auto paper = build_boxes(BoxConstructionParams::paper(2, 6));
  for (const auto& e : density_profile(paper.family(), canonical_schedule(paper))) {
    CHECK(e.ratio_low() >= ExactReal(q(1, 16)));
  }
}

TEST_CASE("annuli profile approaches pi((1+e)^2-1)/(1+e)^2") {
  const Rational e = q(1, 100);
  const auto c = build_annuli(AnnuliConstructionParams::with_epsilon0(2, e, 6));
  const auto prof = density_profile(c.family(), canonical_schedule(c));
  const double limit = M_PI * ((1 + 0.01) * (1 + 0.01) - 1) / ((1 + 0.01) * (1 + 0.01));
  double prev_err = INFINITY;
  for (std::size_t k = 0; k < prof.size(); ++k) {
    // exact value: pi (1+e)^2-1)/(1+e)^2 * sum_{j<=i} R_j^2 / R_i^2
    const int i = static_cast<int>(k) + 1;
    Rational sum = 0;
    for (int j = 1; j <= i; ++j) sum += c.R(j) * c.R(j);
    const Rational shape = ((1 + e) * (1 + e) - 1) / ((1 + e) * (1 + e)) * sum / (c.R(i) * c.R(i));
    CHECK(prof[k].ratio_low() == kPi * shape);
    // one annulus is exactly the limit; later the inner ones add about limit/K^2
    const double err = std::fabs(prof[k].ratio_low_value() - limit);
    if (k == 0) CHECK(err < 1e-15);
    if (k >= 1) CHECK(err <= 2 * limit / (c.params().growth.get_d() * c.params().growth.get_d()));
    if (k >= 2) CHECK(err <= prev_err * (1 + 1e-6));
    prev_err = err;
  }
}

TEST_CASE("density profile corner cases") {
  const auto empty = density_profile(SetFamily(2, {}), RadiusSchedule::geometric(1, 2, 3));
  for (const auto& e : empty) CHECK(e.ratio_high().is_zero());
  CHECK_THROWS(density_profile(SetFamily(2, {}), RadiusSchedule()));
}

TEST_CASE("pinned density profile") {
  const auto full = normalize({Interval(ExactReal(0), ExactReal(5))});
  CHECK(pinned_density_profile(full, RadiusSchedule({q(5)}))[0].ratio_low() == ExactReal(1));
  CHECK(pinned_density_profile(IntervalSet(), RadiusSchedule({q(5)}))[0].ratio_low().is_zero());

  const Rational e = q(1, 100);
  const auto c = build_annuli(AnnuliConstructionParams::with_epsilon0(2, e, 6));
  const auto set = pinned_distance_set(Point::origin(2), c.family());
  const auto prof = pinned_density_profile(set, canonical_schedule(c));
  Rational sum = 0;
  for (int i = 1; i <= 6; ++i) {
    sum += c.R(i);
    const auto& entry = prof[static_cast<std::size_t>(i - 1)];
    CHECK(entry.ratio_low() == ExactReal(e * sum / ((1 + e) * c.R(i))));
    CHECK(entry.ratio_low() == entry.ratio_high());
  }
  CHECK(prof.back().ratio_low_value() == doctest::Approx(0.01 / 1.01).epsilon(1e-4));
}

TEST_CASE("additivity and scaling") {
  const SetFamily a(2, {t::box({1, 1}, {2, 3}), Ball{pt({-4, 0}), 1}});
  const SetFamily b(2, {Annulus{6, 7, std::nullopt}});
  const auto sched = RadiusSchedule::geometric(q(1, 2), 2, 6);
  const auto pa = density_profile(a, sched), pb = density_profile(b, sched);
  const auto pu = density_profile(a.disjoint_union(b), sched);
  for (std::size_t k = 0; k < sched.size(); ++k) {
    CHECK(pu[k].measure_low == pa[k].measure_low + pb[k].measure_low);
    CHECK(pu[k].measure_high == pa[k].measure_high + pb[k].measure_high);
  }
  const Rational lambda = q(7, 3);
  std::vector<Primitive> scaled;
  for (const auto& p : a.disjoint_union(b).primitives) scaled.push_back(dilate(p, lambda));
  const auto ps = density_profile(SetFamily(2, scaled), sched.scaled(lambda));
  for (std::size_t k = 0; k < sched.size(); ++k) {
    if (pu[k].mode == EvalMode::exact) {
      CHECK(ps[k].mode == EvalMode::exact);
      CHECK(ps[k].ratio_low() == pu[k].ratio_low());
    }
  }
}

TEST_CASE("profile csv") {
  const auto prof = density_profile(SetFamily(2, {Ball{pt({0, 0}), 1}}), RadiusSchedule({q(1), q(2)}));
  const std::string csv = profile_csv(prof);
  CHECK(csv.rfind("# schema_version=1\nradius,measure_low,measure_high,ratio_low,ratio_high,mode\n", 0) == 0);
  CHECK(csv.find("exact") != std::string::npos);
}

TEST_CASE("mc_volume examples") {
  McConfig cfg;
  cfg.samples = 100000;
  cfg.seed = 1;
  const auto full = mc_volume(SetFamily(2, {Ball{pt({0, 0}), 3}}), 3, cfg);
  CHECK(full.hits == full.samples);

  cfg.samples = 1000000;
  const auto ring = mc_volume(SetFamily(2, {Annulus{q(5, 2), 5, std::nullopt}}), 5, cfg);
  const double exact = 0.75 * M_PI * 25;
  CHECK(ring.ci_low <= exact);
  CHECK(exact <= ring.ci_high);

  const auto c = build_boxes(BoxConstructionParams::relaxed(2, 5));
  const Rational radius = 2 * c.params().epsilon * 2 * c.R(3);
  const double boxes_exact = Rational(c.side(1) * c.side(1) + c.side(2) * c.side(2)).get_d();
  cfg.samples = 200000;
  const auto est = mc_volume(c.family(), radius, cfg);
  CHECK(est.ci_low <= boxes_exact);
  CHECK(boxes_exact <= est.ci_high);
}

TEST_CASE("mc_volume is independent of the worker count") {
  const SetFamily fam(3, {t::box({0, 0, 0}, {1, 2, 1}), Annulus{2, 3, std::nullopt}});
  McConfig cfg;
  cfg.samples = 300000;
  cfg.seed = 77;
  cfg.chunk_size = 10000;
  cfg.workers = 1;
  const auto a = mc_volume(fam, q(5, 2), cfg);
  cfg.workers = 4;
  const auto b = mc_volume(fam, q(5, 2), cfg);
  CHECK(a.hits == b.hits);
  CHECK(a.ci_low == b.ci_low);
  cfg.seed = 78;
  CHECK(mc_volume(fam, q(5, 2), cfg).hits != a.hits);

  cfg.seed = 77;
  const auto da = mc_pinned_distances(pt({1, 0, 0}), fam, cfg);
  cfg.workers = 1;
  const auto db = mc_pinned_distances(pt({1, 0, 0}), fam, cfg);
  CHECK(da == db);
}

TEST_CASE("mc_pinned_distances") {
  const SetFamily fam(2, {t::box({1, 1}, {2, 3}), Annulus{5, 6, std::nullopt}, Ball{pt({-9, 0}), q(1, 2)}});
  const Point pin = pt({q(1, 3), q(-1, 2)});
  const auto set = pinned_distance_set(pin, fam);
  McConfig cfg;
  cfg.samples = 100000;
  cfg.seed = 3;
  const auto sample = mc_pinned_distances(pin, fam, cfg);
  CHECK(sample.size() == cfg.samples);
  std::vector<long> hits(set.size(), 0);
  for (double v : sample) {
    auto k = set.find(v);
    REQUIRE(k.has_value());
    ++hits[*k];
  }
  for (long h : hits) CHECK(h > 0);
  CHECK(mc_pinned_distances(pin, SetFamily(2, {}), cfg).empty());
}

TEST_CASE("wilson interval") {
  auto [lo, hi] = wilson_interval(0, 100);
  CHECK(lo == 0);
  CHECK(hi > 0);
  auto [lo2, hi2] = wilson_interval(50, 100);
  CHECK(lo2 < 0.5);
  CHECK(hi2 > 0.5);
  CHECK(hi2 - lo2 == doctest::Approx(2 * 2.5758293035489004 * 0.05).epsilon(0.02));
}

TEST_CASE("bracket soundness over seeded trials") {
  const std::vector<Primitive> prims{t::box({1, -1}, {3, 2}), Annulus{1, 2, std::nullopt},
                                     Ball{pt({2, 1}), q(3, 2)}};
  for (const auto& p : prims) {
    for (const Rational& r : {q(3, 2), q(5, 2)}) {
      const auto v = ball_intersection_volume(p, 2, r);
      int meets = 0;
      for (int s = 0; s < 100; ++s) {
        McConfig cfg;
        cfg.samples = 20000;
        cfg.seed = 1000 + static_cast<std::uint64_t>(s);
        const auto est = mc_volume(SetFamily(2, {p}), r, cfg);
        if (est.ci_high >= v.low.to_double() && est.ci_low <= v.high.to_double()) ++meets;
      }
      CHECK(meets >= 99);
    }
  }
}

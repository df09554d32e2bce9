#include <doctest.h>

#include <cmath>

#include "density_lab/serialize.hpp"
#include "density_lab/verify.hpp"
#include "support.hpp"

using namespace dlab;
using t::pt;
using t::q;

namespace {

bool all_hold(const VerificationReport& r) { return r.verdict == Verdict::pass && r.count(Outcome::holds) == r.items.size(); }

}  // namespace

TEST_CASE("verdict rules") {
  VerificationReport r;
  r.add_exact("a", ExactReal(1), Relation::le, ExactReal(2));
  r.finalize();
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.exit_code() == 0);

  r.add_mc("mc", 3, 4, Relation::le, 2, 2);
  CHECK(r.items.back().outcome == Outcome::undecided);
  r.finalize();
  CHECK(r.verdict == Verdict::inconclusive);
  CHECK(r.exit_code() == 2);

  r.add_bracket("b", ExactReal(0), ExactReal(3), Relation::le, ExactReal(2), ExactReal(2));
  CHECK(r.items.back().outcome == Outcome::undecided);
  r.add_exact("c", ExactReal::sqrt(q(2)), Relation::gt, ExactReal(q(3, 2)));
  CHECK(r.items.back().outcome == Outcome::violated);
  r.finalize();
  CHECK(r.verdict == Verdict::fail);
  CHECK(r.exit_code() == 1);

  VerificationReport e;
  e.add_exact("eq", ExactReal::sqrt(q(8)), Relation::eq, ExactReal::sqrt(q(2)) * q(2));
  e.add_bracket("lt", ExactReal(1), ExactReal(2), Relation::lt, ExactReal(3), ExactReal(4));
  e.add_bracket("ge", ExactReal(5), ExactReal(6), Relation::ge, ExactReal(3), ExactReal(5));
  e.add_bracket("gt-undecided", ExactReal(5), ExactReal(6), Relation::gt, ExactReal(3), ExactReal(5));
  e.finalize();
  CHECK(e.items[0].outcome == Outcome::holds);
  CHECK(e.items[1].outcome == Outcome::holds);
  CHECK(e.items[2].outcome == Outcome::holds);
  CHECK(e.items[3].outcome == Outcome::undecided);
  CHECK(e.items[1].lhs == "[1, 2]");
}

TEST_CASE("annular bound examples") {
  // annulus [a,b], R = b: omega(b^d - a^d) <= d omega b^{d-1} (b - a)
  for (int d = 2; d <= 5; ++d) {
    auto r = check_annular_bound(SetFamily(d, {Annulus{q(3, 2), q(5, 2), std::nullopt}}), q(5, 2));
    CHECK(all_hold(r));
    CHECK(r.items[0].mode == EvalMode::exact);
  }
  const auto c = build_boxes(BoxConstructionParams::relaxed(2, 6));
  std::vector<Rational> radii = canonical_schedule(c).radii();
  auto boxes = check_annular_bound(c.family(), radii);
  CHECK(all_hold(boxes));
  for (const auto& item : boxes.items) CHECK(item.mode == EvalMode::exact);

  // straddling boxes: LHS upper bracket still certifies
  auto rough = check_annular_bound(SetFamily(2, {t::box({1, 0}, {3, 1}), t::box({4, -1}, {5, 1})}),
                                   std::vector<Rational>{q(2), q(9, 2), q(6)});
  CHECK(rough.verdict == Verdict::pass);
  CHECK_THROWS(check_annular_bound(SetFamily(2, {}), q(0)));
}

TEST_CASE("annular bound on random annuli families") {
  const SetFamily fam = random_annuli_family(3, 50, 11);
  CHECK(fam.size() == 50);
  CHECK_FALSE(fam.first_uncertified_pair().has_value());
  auto r = check_annular_bound_random(20, 20, 7);
  CHECK(all_hold(r));
  CHECK(r.items.size() == 20);
  CHECK(r.params["inequalities_checked"] == 400);
  CHECK(r.seed == 7u);
  // deterministic
  CHECK(dump(to_json(r)) == dump(to_json(check_annular_bound_random(20, 20, 7))));
}

TEST_CASE("pinned density theorem") {
  for (int d = 2; d <= 4; ++d) {
    auto r = check_pinned_density_theorem(SetFamily(d, {Ball{Point::origin(d), 5}}), Point::origin(d),
                                          RadiusSchedule({q(5)}));
    CHECK(all_hold(r));
    CHECK(r.params["best_pinned_ratio"] == 1.0);
  }
  const auto boxes = build_boxes(BoxConstructionParams::relaxed(2, 6));
  CHECK(all_hold(check_pinned_density_theorem(boxes.family(), Point::origin(2), canonical_schedule(boxes))));
  const auto annuli = build_annuli(AnnuliConstructionParams::with_epsilon0(2, q(1, 100), 6));
  auto a = check_pinned_density_theorem(annuli.family(), Point::origin(2), canonical_schedule(annuli));
  CHECK(all_hold(a));
  // ratio about eps0/(1+eps0)
  CHECK(a.params["best_pinned_ratio"].get<double>() == doctest::Approx(0.01 / 1.01).epsilon(1e-3));
  // off-centre pin inside an annulus: translated shells are bracketed
  auto off = check_pinned_density_theorem(annuli.family(), pt({annuli.R(2), 0}), canonical_schedule(annuli));
  CHECK(off.verdict == Verdict::pass);
}

TEST_CASE("translation shell bound") {
  const SetFamily fam(2, {t::box({3, -2}, {7, 2}), Annulus{30, 35, std::nullopt}});
  McConfig cfg;
  cfg.samples = 0;
  auto zero = check_translation_invariance(fam, Point::origin(2), RadiusSchedule::geometric(5, 4, 4), cfg);
  CHECK(all_hold(zero));

  const SetFamily single(2, {t::box({0, 0}, {10, 10})});
  auto one = check_translation_invariance(single, pt({1, 0}), RadiusSchedule({q(1000)}), cfg);
  CHECK(all_hold(one));
  CHECK(one.params["bounds"][0] == doctest::Approx(2001e-6));

  cfg.samples = 200000;
  cfg.seed = 9;
  auto mixed = check_translation_invariance(fam, pt({q(3, 5), q(4, 5)}), RadiusSchedule::geometric(5, 4, 8), cfg);
  CHECK(mixed.verdict == Verdict::pass);
  bool saw_mc = false;
  for (const auto& item : mixed.items) saw_mc = saw_mc || item.mode == EvalMode::monte_carlo;
  CHECK(saw_mc);
  CHECK(mixed.params["bounds"].back().get<double>() < 1e-3);
}

TEST_CASE("subadditivity and monotonicity") {
  const SetFamily a(2, {Annulus{1, 2, std::nullopt}});
  const SetFamily b(2, {Annulus{3, 4, std::nullopt}});
  const auto sched = RadiusSchedule::geometric(q(1, 2), 2, 6);
  CHECK(all_hold(check_subadditivity_monotonicity(a, b, sched)));
  CHECK(all_hold(check_subadditivity_monotonicity(a, SetFamily(2, {}), sched)));
  const SetFamily boxes(2, {t::box({3, 3}, {4, 5})});
  CHECK(check_subadditivity_monotonicity(a, boxes, sched).verdict == Verdict::pass);
  CHECK_THROWS_AS(check_subadditivity_monotonicity(a, a, sched), OverlapDetected);
}

TEST_CASE("counterexample certificate") {
  const auto relaxed = build_boxes(BoxConstructionParams::relaxed(2, 8));
  auto corner = check_counterexample(relaxed, {relaxed.box(1).lo}, 2);
  CHECK(all_hold(corner));

  const auto paper = build_boxes(BoxConstructionParams::with_epsilon(2, q(1, 200000), 6));
  const auto& q2 = paper.box(2);
  Point centre = q2.lo;
  for (std::size_t j = 0; j < 2; ++j) centre[j] = (q2.lo[j] + q2.hi[j]) / 2;
  CHECK(all_hold(check_counterexample(paper, {centre}, 3)));

  const auto d3 = build_boxes(BoxConstructionParams::relaxed(3, 6));
  const auto pins = grid_pins(d3, 1, 3);
  CHECK(pins.size() == 27);
  auto sweep = check_counterexample(d3, pins, 2);
  CHECK(all_hold(sweep));

  CHECK_THROWS_AS(check_counterexample(relaxed, {pt({0, 0})}, 2), PinOutsideFamily);
  CHECK_THROWS_AS(check_counterexample(relaxed, {relaxed.box(3).lo}, 2), InvalidArgument);
}

TEST_CASE("counterexample gaps grow at least by K/2") {
  const auto c = build_boxes(BoxConstructionParams::relaxed(2, 8));
  const Point pin = c.box(1).lo;
  const auto set = pinned_distance_set(pin, c.family());
  const auto g = gaps(set);
  for (std::size_t k = 2; k < g.size(); ++k) CHECK(g[k] >= g[k - 1] * Rational(c.params().growth / 2));
}

TEST_CASE("sharpness constants") {
  // oracle in doubles
  for (int d = 2; d <= 5; ++d) {
    for (double e : {0.01, 0.05, 0.5}) {
      const double grown = std::pow(1 + e, d);
      const double omega = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1);
      const double oracle = 2 * e / (1 - e / 2) * grown / (omega * (grown - 1));
      const Rational eq = e == 0.01 ? q(1, 100) : e == 0.05 ? q(1, 20) : q(1, 2);
      CHECK(sharpness_constant(d, eq).to_double() == doctest::Approx(oracle).epsilon(1e-12));
      CHECK(sharpness_constant(d, eq) <= sharpness_constant_cap(d));
    }
  }
}

TEST_CASE("sharpness") {
  const auto annuli = build_annuli(AnnuliConstructionParams::with_epsilon0(2, q(1, 100), 6));
  auto centre = check_sharpness(annuli, {Point::origin(2)}, canonical_schedule(annuli));
  CHECK(all_hold(centre));
  CHECK(centre.params["pins"][0]["M"] == 1);

  auto inner = check_sharpness(annuli, {pt({annuli.R(1), 0})}, canonical_schedule(annuli));
  CHECK(all_hold(inner));
  const double quotient = inner.params["quotient"].get<double>();
  CHECK(quotient <= inner.params["sharpness_constant"].get<double>());
  CHECK(quotient == doctest::Approx(1.01 / (M_PI * 2.01)).epsilon(1e-3));

  CHECK_THROWS_AS(check_sharpness(annuli, {pt({annuli.R(6), 0})}, canonical_schedule(annuli)), ScheduleTooShort);
  CHECK_THROWS_AS(check_sharpness(annuli, {pt({q(1, 2), 0})}, canonical_schedule(annuli)), PinOutsideFamily);
}

TEST_CASE("mc consistency") {
  const SetFamily fam(2, {t::box({3, -2}, {7, 2}), Annulus{30, 35, std::nullopt}, Ball{pt({-20, 5}), 4}});
  McConfig cfg;
  cfg.samples = 100000;
  cfg.seed = 1;
  auto r = check_mc_consistency(fam, {q(5), q(40)}, {Point::origin(2), pt({5, 0})}, cfg);
  CHECK(r.verdict == Verdict::pass);
}

TEST_CASE("report json round trip") {
  const auto annuli = build_annuli(AnnuliConstructionParams::with_epsilon0(2, q(1, 100), 4));
  auto r = check_sharpness(annuli, {Point::origin(2)}, canonical_schedule(annuli));
  r.seed = 5;
  const Json j = to_json(r);
  const auto back = report_from_json(j);
  CHECK(back.verdict == r.verdict);
  CHECK(back.items.size() == r.items.size());
  CHECK(dump(to_json(back)) == dump(j));

  Json tampered = j;
  tampered["items"][0]["outcome"] = "violated";
  CHECK_THROWS_AS(report_from_json(tampered), ParseError);
  tampered["verdict"] = "fail";
  CHECK(report_from_json(tampered).verdict == Verdict::fail);
}

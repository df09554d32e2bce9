#include "density_lab/cli.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "density_lab/constructions.hpp"
#include "density_lab/format.hpp"
#include "density_lab/measure.hpp"
#include "density_lab/serialize.hpp"
#include "density_lab/verify.hpp"

namespace dlab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("bad integer for " + what + ": '" + s + "'");
}

std::uint64_t seed_or_env(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  if (const char* env = std::getenv("DENSITY_LAB_SEED")) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument(std::string("DENSITY_LAB_SEED is not an integer: '") + env + "'");
  }
  return 0;
}

// "0" or "origin" is the origin of R^d.
Point parse_pin(const std::string& text, int d) {
  if (text == "0" || text == "origin") return Point::origin(d);
  Point p = parse_point(text);
  if (p.dimension() != d) throw DimensionMismatch("pin '" + text + "' does not have dimension " + std::to_string(d));
  return p;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_rational(s));
  return out;
}

struct Loaded {
  std::optional<Construction> construction;
  SetFamily family;
};

Loaded load(const std::string& path) {
  const Json j = read_json_file(path);
  Loaded l;
  const auto kind = j.value("kind", std::string());
  if (kind == "boxes" || kind == "annuli") {
    l.construction = construction_from_json(j);
    l.family = family_of(*l.construction);
  } else {
    l.family = family_from_json(j);
  }
  return l;
}

// canonical | geometric:r0,g,n | list:r1,r2,...
RadiusSchedule parse_schedule(const std::string& spec, const std::optional<Construction>& c) {
  if (spec == "canonical") {
    if (!c) throw InvalidArgument("the canonical schedule needs a construction file");
    return std::visit([](const auto& v) { return canonical_schedule(v); }, *c);
  }
  if (spec.rfind("geometric:", 0) == 0) {
    const auto parts = split(spec.substr(10), ',');
    if (parts.size() != 3) throw InvalidArgument("geometric schedule is geometric:r0,g,n");
    return RadiusSchedule::geometric(parse_rational(parts[0]), parse_rational(parts[1]),
                                     parse_int(parts[2], "schedule length"));
  }
  if (spec.rfind("list:", 0) == 0) return RadiusSchedule(parse_rational_list(spec.substr(5)));
  throw InvalidArgument("unknown schedule '" + spec + "'");
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

struct BuildOptions {
  std::string kind;
  int d = 2;
  std::string preset = "relaxed";
  int count = 8;
  std::string eps, eps0, growth;
  int start = 1;
};

Construction build(const BuildOptions& o) {
  if (o.kind == "boxes") {
    BoxConstructionParams p = o.eps.empty() ? BoxConstructionParams::from_preset(parse_preset(o.preset), o.d, o.count)
                                            : BoxConstructionParams::with_epsilon(o.d, parse_rational(o.eps), o.count);
    if (!o.growth.empty()) p.growth = parse_rational(o.growth);
    return build_boxes(p);
  }
  if (o.kind == "annuli") {
    AnnuliConstructionParams p = AnnuliConstructionParams::with_epsilon0(
        o.d, o.eps0.empty() ? Rational(1, 100) : parse_rational(o.eps0), o.count, o.start);
    if (!o.growth.empty()) p.growth = parse_rational(o.growth);
    return build_annuli(p);
  }
  throw InvalidArgument("build kind must be 'boxes' or 'annuli'");
}

void add_build_options(CLI::App* cmd, BuildOptions& o) {
  cmd->add_option("-d,--dimension", o.d, "ambient dimension (>= 2)");
  cmd->add_option("--preset", o.preset, "paper | relaxed (boxes)");
  cmd->add_option("-N,--count", o.count, "number of pieces");
  cmd->add_option("--eps", o.eps, "epsilon as p/q (boxes)");
  cmd->add_option("--eps0", o.eps0, "epsilon0 as p/q (annuli)");
  cmd->add_option("--K", o.growth, "growth factor as p/q");
  cmd->add_option("--start", o.start, "first annulus index");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pinned distance sets of positive-density sets: constructions, profiles, checks", "density_lab"};
  app.require_subcommand(1);

  std::string output;
  std::function<int()> action;

  // build
  BuildOptions bopt;
  auto* build_cmd = app.add_subcommand("build", "build a construction and write it as JSON");
  build_cmd->add_option("kind", bopt.kind, "boxes | annuli")->required();
  add_build_options(build_cmd, bopt);
  build_cmd->add_option("-o,--output", output, "output path (default stdout)");
  build_cmd->callback([&] {
    action = [&] {
      const Construction c = build(bopt);
      const auto& certs = std::visit([](const auto& v) -> const std::vector<std::string>& { return v.certificates(); }, c);
      const Json j = std::visit([](const auto& v) { return to_json(v); }, c);
      emit(dump(j), output, out);
      std::ostream& summary = (output.empty() || output == "-") ? err : out;
      summary << "certified " << bopt.kind << " (d=" << bopt.d << ", N=" << bopt.count << "):\n";
      for (const auto& line : certs) summary << "  " << line << "\n";
      return 0;
    };
  });

  // profile
  std::string input, schedule_spec = "canonical";
  auto* profile_cmd = app.add_subcommand("profile", "density profile |A ∩ B(0,R)|/R^d as CSV");
  profile_cmd->add_option("input", input, "construction or family JSON")->required();
  profile_cmd->add_option("--schedule", schedule_spec, "canonical | geometric:r0,g,n | list:r1,...");
  profile_cmd->add_option("-o,--output", output, "output path (default stdout)");
  profile_cmd->callback([&] {
    action = [&] {
      const Loaded l = load(input);
      emit(profile_csv(density_profile(l.family, parse_schedule(schedule_spec, l.construction))), output, out);
      return 0;
    };
  });

  // pinned
  std::vector<std::string> pins;
  std::string intervals_out;
  auto* pinned_cmd = app.add_subcommand("pinned", "pinned distance set and its 1-D density profile");
  pinned_cmd->add_option("input", input, "construction or family JSON")->required();
  pinned_cmd->add_option("--pin", pins, "pin p/q,p/q,... or 0")->required()->expected(1);
  pinned_cmd->add_option("--schedule", schedule_spec, "canonical | geometric:r0,g,n | list:r1,...");
  pinned_cmd->add_option("--intervals", intervals_out, "also write the interval set as JSON");
  pinned_cmd->add_option("-o,--output", output, "CSV output path (default stdout)");
  pinned_cmd->callback([&] {
    action = [&] {
      const Loaded l = load(input);
      const IntervalSet set = pinned_distance_set(parse_pin(pins.at(0), l.family.dimension), l.family);
      if (!intervals_out.empty()) emit(dump(to_json(set)), intervals_out, out);
      emit(profile_csv(pinned_density_profile(set, parse_schedule(schedule_spec, l.construction))), output, out);
      return 0;
    };
  });

  // mc
  std::string radius;
  std::optional<std::uint64_t> seed;
  McConfig mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimate of |A ∩ B(0,R)|");
  mc_cmd->add_option("input", input, "construction or family JSON")->required();
  mc_cmd->add_option("--radius", radius, "R as p/q")->required();
  mc_cmd->add_option("--samples", mc.samples, "sample count");
  mc_cmd->add_option("--seed", seed, "seed (fallback DENSITY_LAB_SEED)");
  mc_cmd->add_option("--chunk", mc.chunk_size, "samples per chunk");
  mc_cmd->add_option("--workers", mc.workers, "worker threads (0: all cores)");
  mc_cmd->add_option("-o,--output", output, "output path (default stdout)");
  mc_cmd->callback([&] {
    action = [&] {
      const Loaded l = load(input);
      mc.seed = seed_or_env(seed);
      const Rational r = parse_rational(radius);
      const McEstimate est = mc_volume(l.family, r, mc);
      const VolumeBracket b = [&] {
        VolumeBracket sum;
        for (const auto& p : l.family.primitives) {
          auto v = ball_intersection_volume(p, l.family.dimension, r);
          sum.low += v.low;
          sum.high += v.high;
        }
        return sum;
      }();
      Json j;
      j["schema_version"] = kSchemaVersion;
      j["kind"] = "mc_volume";
      j["radius"] = to_json(r);
      j["samples"] = est.samples;
      j["seed"] = mc.seed;
      j["chunk_size"] = mc.chunk_size;
      j["hits"] = est.hits;
      j["ball_volume"] = est.ball_volume;
      j["estimate"] = est.estimate;
      j["ci99"] = {est.ci_low, est.ci_high};
      j["analytic"] = {b.low.to_double(), b.high.to_double()};
      emit(dump(j), output, out);
      return 0;
    };
  });

  // verify
  std::string check;
  std::vector<std::string> inputs;
  std::string pin_spec, shift, radii_spec, m_index;
  std::optional<int> random_families;
  int radii_count = 20, max_annuli = 50, pin_box = 1;
  auto* verify_cmd = app.add_subcommand("verify", "run a check and write its report as JSON");
  verify_cmd->add_option("check", check,
                         "annular-bound | theorem | translation | submon | counterexample | sharpness | mc-crosscheck")
      ->required();
  verify_cmd->add_option("inputs", inputs, "construction or family JSON files");
  add_build_options(verify_cmd, bopt);
  verify_cmd->add_option("--pin", pins, "pin p/q,p/q,... or 0 (repeatable)");
  verify_cmd->add_option("--pins", pin_spec, "grid:k (k^d cell centres of a box)");
  verify_cmd->add_option("--pin-box", pin_box, "box index for --pins grid:k");
  verify_cmd->add_option("--M", m_index, "first far index for counterexample");
  verify_cmd->add_option("--shift", shift, "translation x as p/q,p/q,...");
  verify_cmd->add_option("--schedule", schedule_spec, "canonical | geometric:r0,g,n | list:r1,...");
  verify_cmd->add_option("--radii", radii_spec, "radii p/q,... (annular-bound, mc-crosscheck)");
  verify_cmd->add_option("--random", random_families, "annular-bound over this many random families");
  verify_cmd->add_option("--radii-per-family", radii_count, "random radii per family");
  verify_cmd->add_option("--max-annuli", max_annuli, "largest random family");
  verify_cmd->add_option("--samples", mc.samples, "Monte Carlo samples");
  verify_cmd->add_option("--seed", seed, "seed (fallback DENSITY_LAB_SEED)");
  verify_cmd->add_option("--chunk", mc.chunk_size, "samples per chunk");
  verify_cmd->add_option("--workers", mc.workers, "worker threads (0: all cores)");
  verify_cmd->add_option("-o,--output", output, "output path (default stdout)");
  verify_cmd->callback([&] {
    action = [&] {
      mc.seed = seed_or_env(seed);
      // A construction from the first input, or built from the flags.
      auto construction = [&](const std::string& kind) -> Construction {
        if (!inputs.empty()) {
          const Json j = read_json_file(inputs.at(0));
          return construction_from_json(j);
        }
        BuildOptions o = bopt;
        o.kind = kind;
        return build(o);
      };
      auto single = [&]() -> Loaded {
        if (inputs.empty()) throw InvalidArgument("check '" + check + "' needs an input file");
        return load(inputs.at(0));
      };
      auto pin_list = [&](int d) {
        std::vector<Point> out_pins;
        for (const auto& p : pins) out_pins.push_back(parse_pin(p, d));
        return out_pins;
      };

      VerificationReport report;
      if (check == "annular-bound") {
        if (random_families) {
          report = check_annular_bound_random(*random_families, radii_count, mc.seed, max_annuli);
        } else {
          if (radii_spec.empty()) throw InvalidArgument("annular-bound needs --radii or --random");
          report = check_annular_bound(single().family, parse_rational_list(radii_spec));
        }
      } else if (check == "theorem") {
        const Loaded l = inputs.empty() ? Loaded{construction("annuli"), {}} : single();
        const SetFamily& fam = l.construction ? family_of(*l.construction) : l.family;
        const auto ps = pins.empty() ? std::vector<Point>{Point::origin(fam.dimension)} : pin_list(fam.dimension);
        const RadiusSchedule sched = parse_schedule(schedule_spec, l.construction);
        report = check_pinned_density_theorem(fam, ps.at(0), sched);
        for (std::size_t k = 1; k < ps.size(); ++k) {
          const auto more = check_pinned_density_theorem(fam, ps[k], sched);
          for (const auto& item : more.items) {
            report.items.push_back(item);
            report.items.back().desc = "pin " + std::to_string(k) + ": " + item.desc;
          }
        }
        report.finalize();
      } else if (check == "translation") {
        const Loaded l = single();
        if (shift.empty()) throw InvalidArgument("translation needs --shift");
        report = check_translation_invariance(l.family, parse_pin(shift, l.family.dimension),
                                              parse_schedule(schedule_spec, l.construction), mc);
      } else if (check == "submon") {
        if (inputs.size() != 2) throw InvalidArgument("submon needs two family files");
        const Loaded a = load(inputs[0]);
        const Loaded b = load(inputs[1]);
        report = check_subadditivity_monotonicity(a.family, b.family, parse_schedule(schedule_spec, a.construction));
      } else if (check == "counterexample") {
        const Construction c = construction("boxes");
        const auto* boxes = std::get_if<BoxConstruction>(&c);
        if (!boxes) throw InvalidArgument("counterexample needs a box construction");
        std::vector<Point> ps = pin_list(boxes->params().d);
        if (!pin_spec.empty()) {
          if (pin_spec.rfind("grid:", 0) != 0) throw InvalidArgument("--pins expects grid:k");
          auto grid = grid_pins(*boxes, pin_box, parse_int(pin_spec.substr(5), "grid size"));
          ps.insert(ps.end(), grid.begin(), grid.end());
        }
        if (ps.empty()) ps = grid_pins(*boxes, 1, 1);
        int m = 0;
        if (!m_index.empty()) {
          m = parse_int(m_index, "--M");
        } else {
          for (const auto& p : ps) {
            if (auto i = boxes->box_containing(p)) m = std::max(m, *i + 1);
          }
          if (m == 0) m = 2;
        }
        report = check_counterexample(*boxes, ps, m);
      } else if (check == "sharpness") {
        const Construction c = construction("annuli");
        const auto* annuli = std::get_if<AnnuliConstruction>(&c);
        if (!annuli) throw InvalidArgument("sharpness needs an annuli construction");
        auto ps = pins.empty() ? std::vector<Point>{Point::origin(annuli->params().d)} : pin_list(annuli->params().d);
        report = check_sharpness(*annuli, ps, parse_schedule(schedule_spec, c));
      } else if (check == "mc-crosscheck") {
        const Loaded l = single();
        if (radii_spec.empty()) throw InvalidArgument("mc-crosscheck needs --radii");
        report = check_mc_consistency(l.family, parse_rational_list(radii_spec), pin_list(l.family.dimension), mc);
      } else {
        throw InvalidArgument("unknown check '" + check + "'");
      }
      emit(dump(to_json(report)), output, out);
      err << report.check << ": " << to_string(report.verdict) << " (" << report.items.size() << " items, "
          << report.count(Outcome::violated) << " violated, " << report.count(Outcome::undecided) << " undecided)\n";
      return report.exit_code();
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitError;
  }
  try {
    return action ? action() : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace dlab

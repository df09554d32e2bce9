// Python bindings.  Structured values cross the boundary as JSON text; the
// Python package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <tuple>

#include "density_lab/cli.hpp"
#include "density_lab/serialize.hpp"
#include "density_lab/verify.hpp"

namespace py = pybind11;
using namespace dlab;

namespace {

Construction load(const std::string& text) { return construction_from_json(Json::parse(text)); }

SetFamily load_family(const std::string& text) { return family_from_json(Json::parse(text)); }

RadiusSchedule schedule_for(const std::string& text, const std::vector<std::string>& radii) {
  if (!radii.empty()) {
    std::vector<Rational> values;
    for (const auto& r : radii) values.push_back(parse_rational(r));
    return RadiusSchedule(values);
  }
  return std::visit([](const auto& c) { return canonical_schedule(c); }, load(text));
}

std::string profile_json(const std::vector<DensityEstimate>& profile) {
  Json rows = Json::array();
  for (const auto& e : profile) {
    rows.push_back({{"radius", to_json(e.radius)},
                    {"measure_low", e.measure_low_value()},
                    {"measure_high", e.measure_high_value()},
                    {"ratio_low", e.ratio_low_value()},
                    {"ratio_high", e.ratio_high_value()},
                    {"mode", to_string(e.mode)}});
  }
  return rows.dump();
}

McConfig mc_config(std::uint64_t samples, std::uint64_t seed) {
  McConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  auto& base = py::register_exception<Error>(m, "DensityLabError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base);

  m.def("build_boxes", [](int d, int count, const std::string& preset, const std::string& epsilon) {
    const auto params = epsilon.empty() ? BoxConstructionParams::from_preset(parse_preset(preset), d, count)
                                        : BoxConstructionParams::with_epsilon(d, parse_rational(epsilon), count);
    return dump(to_json(build_boxes(params)));
  });

  m.def("build_annuli", [](int d, int count, const std::string& epsilon0, int start_index) {
    return dump(to_json(
        build_annuli(AnnuliConstructionParams::with_epsilon0(d, parse_rational(epsilon0), count, start_index))));
  });

  m.def("pinned_distance_set", [](const std::string& family, const std::string& pin) {
    return dump(to_json(pinned_distance_set(parse_point(pin), load_family(family))));
  });

  m.def("density_profile", [](const std::string& doc, const std::vector<std::string>& radii) {
    return profile_json(density_profile(load_family(doc), schedule_for(doc, radii)));
  });

  m.def("pinned_density_profile",
        [](const std::string& doc, const std::string& pin, const std::vector<std::string>& radii) {
          const auto set = pinned_distance_set(parse_point(pin), load_family(doc));
          return profile_json(pinned_density_profile(set, schedule_for(doc, radii)));
        });

  m.def("mc_volume", [](const std::string& family, const std::string& radius, std::uint64_t samples,
                        std::uint64_t seed) {
    const auto e = mc_volume(load_family(family), parse_rational(radius), mc_config(samples, seed));
    return std::make_tuple(e.estimate, e.ci_low, e.ci_high, e.hits, e.samples);
  });

  m.def("mc_pinned_distances", [](const std::string& family, const std::string& pin, std::uint64_t samples,
                                  std::uint64_t seed) {
    return mc_pinned_distances(parse_point(pin), load_family(family), mc_config(samples, seed));
  });

  m.def("unit_ball_volume", [](int d) { return unit_ball_volume(d).to_double(); });
  m.def("sphere_area", [](int d) { return sphere_area(d).to_double(); });
  m.def("sharpness_constant",
        [](int d, const std::string& epsilon0) { return sharpness_constant(d, parse_rational(epsilon0)).to_double(); });

  m.def("check_annular_bound_random", [](int families, int radii, std::uint64_t seed) {
    auto r = check_annular_bound_random(families, radii, seed);
    return dump(to_json(r));
  });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return std::make_tuple(code, out.str(), err.str());
  });
}

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "density_lab/cli.hpp"
#include "density_lab/serialize.hpp"
#include "support.hpp"

using namespace dlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "density_lab_cli_test";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("build writes construction JSON that round-trips exactly") {
  const auto r = run({"build", "boxes", "-d", "2", "--preset", "relaxed", "-N", "8"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("certified boxes") != std::string::npos);
  const Json j = Json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["kind"] == "boxes");
  CHECK(j["params"]["epsilon"]["num"] == "1");
  CHECK(j["params"]["epsilon"]["den"] == "100");
  CHECK(j["primitives"].size() == 8);
  const auto back = construction_from_json(j);
  const auto& boxes = std::get<BoxConstruction>(back);
  const auto fresh = build_boxes(BoxConstructionParams::relaxed(2, 8));
  for (int i = 1; i <= 9; ++i) {
    CHECK(boxes.R(i) == fresh.R(i));
    CHECK(boxes.offset(i) == fresh.offset(i));
  }
  CHECK(dump(to_json(boxes)) == r.out);

  Json broken = j;
  broken["sequences"]["R"][3]["num"] = "12345";
  CHECK_THROWS(construction_from_json(broken));
}

TEST_CASE("build annuli and error cases") {
  const std::string path = scratch("ann3.json");
  const auto r = run({"build", "annuli", "-d", "3", "--eps0", "1/100", "-N", "6", "-o", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("certified annuli") != std::string::npos);
  const auto c = construction_from_json(read_json_file(path));
  CHECK(std::get<AnnuliConstruction>(c).family().size() == 6);

  CHECK(run({"build", "boxes", "-d", "1"}).code == kExitError);
  const auto dec = run({"build", "boxes", "-d", "2", "--eps", "0.01"});
  CHECK(dec.code == kExitError);
  CHECK(dec.err.find("0.01") != std::string::npos);
  CHECK(run({"build", "annuli", "--eps0", "1.5"}).code == kExitError);
  CHECK(run({"build", "cubes"}).code == kExitError);
  CHECK(run({"frobnicate"}).code == kExitError);
  CHECK(run({"build", "boxes", "--K", "20000"}).code == kExitError);  // K = 100d/eps exactly
  CHECK(run({"build", "boxes", "--K", "20001"}).code == 0);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("profile and pinned") {
  const std::string boxes = scratch("boxes.json");
  REQUIRE(run({"build", "boxes", "-d", "2", "-N", "6", "-o", boxes}).code == 0);
  const auto p = run({"profile", boxes});
  REQUIRE(p.code == 0);
  std::istringstream lines(p.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "# schema_version=1");
  std::getline(lines, line);
  CHECK(line == "radius,measure_low,measure_high,ratio_low,ratio_high,mode");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    REQUIRE(cols.size() == 6);
    CHECK(std::stod(cols[3]) >= 1.0 / 16);
    CHECK(cols[5] == "exact");
  }
  CHECK(rows == 6);

  const std::string ivs = scratch("intervals.json");
  const auto pin = run({"pinned", boxes, "--pin", "2,0", "--intervals", ivs});
  REQUIRE(pin.code == 0);
  CHECK(pin.out.rfind("# schema_version=1", 0) == 0);
  const Json set = read_json_file(ivs);
  CHECK(set["intervals"].size() == 6);

  CHECK(run({"profile", scratch("missing.json")}).code == kExitError);
  CHECK(run({"profile", boxes, "--schedule", "geometric:1,2,5"}).code == 0);
  CHECK(run({"pinned", boxes, "--pin", "1,2,3"}).code == kExitError);
}

TEST_CASE("verify commands and exit codes") {
  CHECK(run({"verify", "counterexample", "--pins", "grid:3"}).code == 0);
  const std::string ann = scratch("ann2.json");
  REQUIRE(run({"build", "annuli", "-d", "2", "-N", "6", "-o", ann}).code == 0);
  const auto th = run({"verify", "theorem", ann, "--pin", "0"});
  CHECK(th.code == 0);
  CHECK(Json::parse(th.out)["verdict"] == "pass");
  const auto ab = run({"verify", "annular-bound", "--random", "100", "--seed", "7"});
  CHECK(ab.code == 0);
  CHECK(Json::parse(ab.out)["seed"] == 7);
  CHECK(run({"verify", "sharpness", ann, "--pin", "0", "--pin", "1,0"}).code == 0);
  CHECK(run({"verify", "sharpness", ann, "--pin", "1/2,0"}).code == kExitError);
  CHECK(run({"verify", "no-such-check"}).code == kExitError);

  const std::string fam = scratch("fam.json");
  {
    std::ofstream out(fam);
    out << R"({"schema_version":1,"kind":"family","dimension":2,"provenance":"t","primitives":[
      {"kind":"box","lo":["3","-2"],"hi":["7","2"]},
      {"kind":"annulus","inner":"30","outer":"35"}]})";
  }
  const std::string fam2 = scratch("fam2.json");
  {
    std::ofstream out(fam2);
    out << R"({"schema_version":1,"kind":"family","dimension":2,"primitives":[
      {"kind":"ball","center":[{"num":"-20","den":"1"},"5"],"radius":"4"}]})";
  }
  CHECK(run({"verify", "submon", fam, fam2, "--schedule", "geometric:1,2,8"}).code == 0);
  CHECK(run({"verify", "submon", fam, fam, "--schedule", "geometric:1,2,8"}).code == kExitError);
  CHECK(run({"verify", "translation", fam, "--shift", "3/5,4/5", "--schedule", "geometric:5,4,8", "--samples",
             "100000", "--seed", "1"})
            .code == 0);
  CHECK(run({"verify", "mc-crosscheck", fam, "--radii", "5,40", "--pin", "0", "--samples", "50000"}).code == 0);
  CHECK(run({"verify", "annular-bound", fam, "--radii", "5,31,40"}).code == 0);
}

TEST_CASE("outputs are byte-identical for a fixed seed; DENSITY_LAB_SEED is the fallback") {
  const std::string fam = scratch("fam_seed.json");
  {
    std::ofstream out(fam);
    out << R"({"schema_version":1,"kind":"family","dimension":2,"primitives":[
      {"kind":"box","lo":["3","-2"],"hi":["7","2"]}]})";
  }
  const std::vector<std::string> args{"mc", fam, "--radius", "6", "--samples", "50000", "--seed", "42"};
  const auto a = run(args), b = run(args);
  CHECK(a.out == b.out);
  CHECK(Json::parse(a.out)["seed"] == 42);

  ::setenv("DENSITY_LAB_SEED", "42", 1);
  const auto env = run({"mc", fam, "--radius", "6", "--samples", "50000"});
  CHECK(env.out == a.out);
  ::setenv("DENSITY_LAB_SEED", "nope", 1);
  CHECK(run({"mc", fam, "--radius", "6"}).code == kExitError);
  ::unsetenv("DENSITY_LAB_SEED");
  CHECK(Json::parse(run({"mc", fam, "--radius", "6", "--samples", "1000"}).out)["seed"] == 0);

  const std::string out1 = scratch("tr1.json"), out2 = scratch("tr2.json");
  const std::vector<std::string> tr{"verify", "translation", fam, "--shift", "1,0", "--schedule",
                                    "geometric:4,4,4", "--samples", "20000", "--seed", "5", "-o"};
  auto t1 = tr, t2 = tr;
  t1.push_back(out1);
  t2.push_back(out2);
  run(t1);
  run(t2);
  CHECK(slurp(out1) == slurp(out2));
}

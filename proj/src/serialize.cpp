#include "density_lab/serialize.hpp"

#include <fstream>
#include <sstream>

namespace dlab {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad field '") + key + "': " + e.what());
  }
}

std::vector<Rational> rationals_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of rationals");
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(rational_from_json(v));
  return out;
}

Json rationals_to_json(const std::vector<Rational>& v) {
  Json arr = Json::array();
  for (const auto& q : v) arr.push_back(to_json(q));
  return arr;
}

void check_schema(const Json& j) {
  if (get<int>(j, "schema_version") != kSchemaVersion) throw ParseError("unsupported schema_version");
}

}  // namespace

Json to_json(const Rational& q) {
  Json j;
  j["num"] = q.get_num().get_str();
  j["den"] = q.get_den().get_str();
  return j;
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  return parse_rational(get<std::string>(j, "num") + "/" + get<std::string>(j, "den"));
}

Json to_json(const Point& p) {
  Json arr = Json::array();
  for (const auto& c : p.coords) arr.push_back(to_json(c));
  return arr;
}

Point point_from_json(const Json& j) { return Point(rationals_from_json(j)); }

Json to_json(const Primitive& p) {
  Json j;
  if (const auto* box = std::get_if<AxisBox>(&p)) {
    j["kind"] = "box";
    j["lo"] = to_json(box->lo);
    j["hi"] = to_json(box->hi);
  } else if (const auto* ann = std::get_if<Annulus>(&p)) {
    j["kind"] = "annulus";
    j["inner"] = to_json(ann->inner);
    j["outer"] = to_json(ann->outer);
    if (ann->center) j["center"] = to_json(*ann->center);
  } else {
    const auto& ball = std::get<Ball>(p);
    j["kind"] = "ball";
    j["center"] = to_json(ball.center);
    j["radius"] = to_json(ball.radius);
  }
  return j;
}

Primitive primitive_from_json(const Json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "box") return AxisBox{point_from_json(field(j, "lo")), point_from_json(field(j, "hi"))};
  if (kind == "annulus") {
    Annulus a{rational_from_json(field(j, "inner")), rational_from_json(field(j, "outer")), std::nullopt};
    if (j.contains("center")) a.center = point_from_json(j.at("center"));
    return a;
  }
  if (kind == "ball") return Ball{point_from_json(field(j, "center")), rational_from_json(field(j, "radius"))};
  throw ParseError("unknown primitive kind '" + kind + "'");
}

Json to_json(const SetFamily& family) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "family";
  j["dimension"] = family.dimension;
  j["provenance"] = family.provenance;
  Json prims = Json::array();
  for (const auto& p : family.primitives) prims.push_back(to_json(p));
  j["primitives"] = prims;
  return j;
}

SetFamily family_from_json(const Json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "boxes" || kind == "annuli") return family_of(construction_from_json(j));
  if (kind != "family") throw ParseError("expected a family or construction document");
  check_schema(j);
  std::vector<Primitive> prims;
  for (const auto& p : field(j, "primitives")) prims.push_back(primitive_from_json(p));
  const std::string tag = j.contains("provenance") ? j.at("provenance").get<std::string>() : "ad-hoc";
  return SetFamily(get<int>(j, "dimension"), std::move(prims), tag);
}

Json to_json(const BoxConstruction& c) {
  const auto& p = c.params();
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "boxes";
  j["params"] = {{"d", p.d}, {"epsilon", to_json(p.epsilon)}, {"growth", to_json(p.growth)}, {"count", p.count}};
  std::vector<Rational> r, side, offset;
  for (int i = 1; i <= c.count() + 1; ++i) {
    r.push_back(c.R(i));
    offset.push_back(c.offset(i));
  }
  for (int i = 0; i <= c.count(); ++i) side.push_back(c.side(i));
  j["sequences"] = {{"R", rationals_to_json(r)}, {"ell", rationals_to_json(side)}, {"x1", rationals_to_json(offset)}};
  j["certificates"] = c.certificates();
  Json prims = Json::array();
  for (const auto& q : c.family().primitives) prims.push_back(to_json(q));
  j["primitives"] = prims;
  return j;
}

Json to_json(const AnnuliConstruction& c) {
  const auto& p = c.params();
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "annuli";
  j["params"] = {{"d", p.d},
                 {"epsilon0", to_json(p.epsilon0)},
                 {"growth", to_json(p.growth)},
                 {"start_index", p.start_index},
                 {"count", p.count}};
  std::vector<Rational> r;
  for (int i = 1; i <= c.last_index(); ++i) r.push_back(c.R(i));
  j["sequences"] = {{"R", rationals_to_json(r)}};
  j["certificates"] = c.certificates();
  Json prims = Json::array();
  for (const auto& q : c.family().primitives) prims.push_back(to_json(q));
  j["primitives"] = prims;
  return j;
}

Construction construction_from_json(const Json& j) {
  check_schema(j);
  const auto kind = get<std::string>(j, "kind");
  const Json& params = field(j, "params");
  const Json& seq = field(j, "sequences");
  Construction out = [&]() -> Construction {
    if (kind == "boxes") {
      BoxConstructionParams p;
      p.d = get<int>(params, "d");
      p.epsilon = rational_from_json(field(params, "epsilon"));
      p.growth = rational_from_json(field(params, "growth"));
      p.count = get<int>(params, "count");
      return restore_boxes(p, rationals_from_json(field(seq, "R")), rationals_from_json(field(seq, "ell")),
                           rationals_from_json(field(seq, "x1")));
    }
    if (kind == "annuli") {
      AnnuliConstructionParams p;
      p.d = get<int>(params, "d");
      p.epsilon0 = rational_from_json(field(params, "epsilon0"));
      p.growth = rational_from_json(field(params, "growth"));
      p.start_index = get<int>(params, "start_index");
      p.count = get<int>(params, "count");
      return restore_annuli(p, rationals_from_json(field(seq, "R")));
    }
    throw ParseError("unknown construction kind '" + kind + "'");
  }();
  // Stored primitives, when present, must match the rebuilt ones.
  if (j.contains("primitives")) {
    const SetFamily& fam = family_of(out);
    const Json& prims = j.at("primitives");
    if (prims.size() != fam.size()) throw ParseError("stored primitives disagree with the construction");
    for (std::size_t i = 0; i < fam.size(); ++i) {
      if (prims[i] != to_json(fam.primitives[i])) throw ParseError("stored primitive " + std::to_string(i) + " disagrees");
    }
  }
  return out;
}

const SetFamily& family_of(const Construction& c) {
  return std::visit([](const auto& v) -> const SetFamily& { return v.family(); }, c);
}

Json to_json(const IntervalSet& set) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "interval_set";
  Json arr = Json::array();
  for (const auto& iv : set.intervals()) {
    Json e;
    e["lo"] = iv.lo_value();
    e["hi"] = iv.hi_value();
    e["lo_exact"] = iv.lo().to_string();
    e["hi_exact"] = iv.hi().to_string();
    if (auto sq = iv.lo_squared()) e["lo_sq"] = to_json(*sq);
    if (auto sq = iv.hi_squared()) e["hi_sq"] = to_json(*sq);
    arr.push_back(e);
  }
  j["intervals"] = arr;
  return j;
}

Json to_json(const VerificationReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["check"] = report.check;
  j["verdict"] = to_string(report.verdict);
  j["params"] = report.params;
  Json items = Json::array();
  for (const auto& item : report.items) {
    items.push_back({{"desc", item.desc},
                     {"lhs", item.lhs},
                     {"rhs", item.rhs},
                     {"rel", to_string(item.rel)},
                     {"mode", to_string(item.mode)},
                     {"outcome", to_string(item.outcome)}});
  }
  j["items"] = items;
  j["seed"] = report.seed ? Json(*report.seed) : Json(nullptr);
  return j;
}

VerificationReport report_from_json(const Json& j) {
  check_schema(j);
  VerificationReport r;
  r.check = get<std::string>(j, "check");
  r.params = field(j, "params");
  for (const auto& item : field(j, "items")) {
    ReportItem it;
    it.desc = get<std::string>(item, "desc");
    it.lhs = get<std::string>(item, "lhs");
    it.rhs = get<std::string>(item, "rhs");
    it.rel = parse_relation(get<std::string>(item, "rel"));
    it.mode = parse_eval_mode(get<std::string>(item, "mode"));
    it.outcome = parse_outcome(get<std::string>(item, "outcome"));
    r.items.push_back(std::move(it));
  }
  if (j.contains("seed") && !j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
  r.finalize();
  if (parse_verdict(get<std::string>(j, "verdict")) != r.verdict) {
    throw ParseError("stored verdict disagrees with the items");
  }
  return r;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace dlab

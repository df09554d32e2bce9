#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "density_lab/constructions.hpp"
#include "density_lab/geometry.hpp"
#include "density_lab/verify.hpp"

namespace dlab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

class ParseError : public Error {
 public:
  using Error::Error;
};

/// {"num": "p", "den": "q"} with decimal strings.
Json to_json(const Rational& q);
Rational rational_from_json(const Json& j);

Json to_json(const Point& p);
Point point_from_json(const Json& j);

Json to_json(const Primitive& p);
Primitive primitive_from_json(const Json& j);

Json to_json(const SetFamily& family);
SetFamily family_from_json(const Json& j);

Json to_json(const BoxConstruction& c);
Json to_json(const AnnuliConstruction& c);

using Construction = std::variant<BoxConstruction, AnnuliConstruction>;
/// Rebuilds from the stored parameters and checks the stored sequences.
Construction construction_from_json(const Json& j);
const SetFamily& family_of(const Construction& c);

Json to_json(const IntervalSet& set);

Json to_json(const VerificationReport& report);
/// Parses a report; the stored verdict must agree with the one recomputed
/// from the items.
VerificationReport report_from_json(const Json& j);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dlab

#pragma once

// JSON forms of the core types. Every conversion round-trips exactly
// (doubles are printed in shortest round-trip form).

#include <cstdint>
#include <type_traits>

#include "json.hpp"

#include "copronn/core.hpp"

namespace copronn {

using Json = nlohmann::json;

void to_json(Json& j, const EmbeddingVector& v);
void from_json(const Json& j, EmbeddingVector& v);

void to_json(Json& j, const ConceptSet& c);
void from_json(const Json& j, ConceptSet& c);

void to_json(Json& j, const RandomPool& p);
void from_json(const Json& j, RandomPool& p);

std::string_view to_string(Metric metric) noexcept;
Metric parse_metric(std::string_view text);

void to_json(Json& j, const HyperParams& h);
void from_json(const Json& j, HyperParams& h);

void to_json(Json& j, const ScoreMatrix& s);
void from_json(const Json& j, ScoreMatrix& s);

void to_json(Json& j, const Explanation& e);
void from_json(const Json& j, Explanation& e);

void to_json(Json& j, const GroundTruthConceptVector& g);
GroundTruthConceptVector ground_truth_from_json(const Json& j);

void to_json(Json& j, const LinearHead& h);
void from_json(const Json& j, LinearHead& h);

/// Field access that raises SchemaError naming the missing/mistyped field.
const Json& require_field(const Json& object, std::string_view field, std::string_view context);

template <typename T>
T require_as(const Json& object, std::string_view field, std::string_view context) {
  const Json& value = require_field(object, field, context);
  if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
      fail(ErrorKind::SchemaError, std::string(context) + "." + std::string(field) + " must be a non-negative integer");
    }
  }
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::SchemaError, std::string(context) + "." + std::string(field) + " has the wrong type");
  }
}

}  // namespace copronn

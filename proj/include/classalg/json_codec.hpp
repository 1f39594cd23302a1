#pragma once

#include "json.hpp"

#include "classalg/model.hpp"

namespace classalg {

using Json = nlohmann::json;

// Integers that fit in 64 bits are JSON numbers; other numbers are
// {"rational": "<canonical text>"}; strings are JSON strings. Floating JSON
// input is read through its shortest decimal spelling.
Json value_to_json(const Value& v);
Value value_from_json(const Json& j);

Json attributes_to_json(const Attributes& a);
Attributes attributes_from_json(const Json& j);

// Canonical text, e.g. "0.5" or "1/3".
Json rational_to_json(const Rational& r);

}  // namespace classalg

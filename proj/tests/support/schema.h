// Copyright (c) 2026 The accentbn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACCENTBN_TESTS_SUPPORT_SCHEMA_H_
#define ACCENTBN_TESTS_SUPPORT_SCHEMA_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace accentbn::testing {

// Validator for the JSON Schema keywords used under schemas/: type, enum,
// required, properties, items, minItems, minimum, maximum.
inline void CheckSchema(const nlohmann::json& schema, const nlohmann::json& v,
                        const std::string& where,
                        std::vector<std::string>* errors) {
  auto fail = [&](const std::string& what) { errors->push_back(where + ": " + what); };
  if (schema.contains("type")) {
    const std::string t = schema["type"];
    const bool ok = (t == "object" && v.is_object()) ||
                    (t == "array" && v.is_array()) ||
                    (t == "string" && v.is_string()) ||
                    (t == "number" && v.is_number()) ||
                    (t == "integer" && v.is_number_integer()) ||
                    (t == "boolean" && v.is_boolean());
    if (!ok) return fail("expected " + t);
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == v;
    if (!found) fail("value not in enum");
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (schema.contains("minimum") && x < schema["minimum"].get<double>()) fail("below minimum");
    if (schema.contains("maximum") && x > schema["maximum"].get<double>()) fail("above maximum");
  }
  if (v.is_object()) {
    for (const auto& key : schema.value("required", nlohmann::json::array())) {
      if (!v.contains(key.get<std::string>())) fail("missing " + key.get<std::string>());
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (v.contains(key)) CheckSchema(sub, v[key], where + "." + key, errors);
      }
    }
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<size_t>()) {
      fail("too few items");
    }
    if (schema.contains("items")) {
      for (size_t i = 0; i < v.size(); ++i) {
        CheckSchema(schema["items"], v[i], where + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
}

inline std::vector<std::string> SchemaErrors(const nlohmann::json& schema,
                                             const nlohmann::json& v) {
  std::vector<std::string> errors;
  CheckSchema(schema, v, "$", &errors);
  return errors;
}

}  // namespace accentbn::testing

#endif  // ACCENTBN_TESTS_SUPPORT_SCHEMA_H_

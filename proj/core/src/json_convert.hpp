/******************************************************************************
 * Copyright 2026 The lrfusion Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <nlohmann/json.hpp>
#include <set>
#include <string>

#include "lrfusion/error.hpp"
#include "lrfusion/scene_sim.hpp"

namespace lrfusion::detail {

using Json = nlohmann::json;

// Reads the fields of one JSON object strictly: every requested key must be
// present with a compatible type, and finish() rejects keys never requested.
class FieldReader {
 public:
  FieldReader(const Json& obj, std::string section) : obj_(obj), section_(std::move(section)) {
    if (!obj_.is_object()) fail(section_, "must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    const std::string path = section_ + "." + key;
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) fail(path, "is missing");
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(path, "has the wrong type");
    }
  }

  const Json& child(const char* key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) fail(section_ + "." + key, "is missing");
    return *it;
  }

  std::string path(const char* key) const { return section_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail(section_ + "." + key, "is not a known field");
    }
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::kConfigInvalid, path + " " + what);
  }

 private:
  const Json& obj_;
  std::string section_;
  std::set<std::string> seen_;
};

Json sim_to_json(const SimConfig& cfg);
SimConfig sim_from_json(const Json& j, const std::string& section = "sim");

}  // namespace lrfusion::detail

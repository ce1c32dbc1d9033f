// include/prsmos/report.h

// Copyright 2026 The prsmos Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PRSMOS_REPORT_H_
#define PRSMOS_REPORT_H_

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace prsmos {

// Shortest representation that round-trips to the same double.
std::string format_double(double v);
// Empty string for an empty optional.
std::string format_optional(const std::optional<double> &v);

void write_text_file(const std::filesystem::path &path,
                     const std::string &contents);
void write_json_file(const std::filesystem::path &path,
                     const nlohmann::ordered_json &j);

}  // namespace prsmos

#endif  // PRSMOS_REPORT_H_

// Copyright 2026 The EMMA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace emma {

// Splits on ','. No quoting: field values never contain commas.
std::vector<std::string> split_csv_line(std::string_view line);

std::string strip_cr(std::string line);
std::string trim(std::string_view s);

// Strict parsers; throw DataError naming the field and line on failure.
double parse_double(std::string_view text, std::string_view field, std::size_t line);
std::int64_t parse_int(std::string_view text, std::string_view field, std::size_t line);

}  // namespace emma

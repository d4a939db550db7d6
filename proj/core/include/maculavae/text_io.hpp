/*
 * Copyright 2026 The maculavae Authors
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
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace maculavae::text {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

double parse_double(std::string_view field, std::size_t line);
std::int64_t parse_int(std::string_view field, std::size_t line);

std::vector<std::string_view> split_csv_row(std::string_view row);

/// Whole file contents; throws maculavae::Error if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, so readers never observe a
/// half-written file.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Splits on '\n', dropping a trailing '\r' from each line and a final empty
/// line.
std::vector<std::string_view> lines(std::string_view contents);

} // namespace maculavae::text

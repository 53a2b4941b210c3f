// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace analogia {

/// Writes `content` to a sibling temp file and renames it over `path`, so
/// readers never observe a partial file.
void write_file_atomic(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

/// Splits on a single-character separator, keeping empty fields.
std::vector<std::string_view> split(std::string_view line, char sep);

/// Shortest decimal form that reads back to the same value.
std::string format_real(double value);
std::string format_real(float value);

}  // namespace analogia

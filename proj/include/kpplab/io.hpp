// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kpplab {

/// 17-significant-digit decimal form, round-trip exact for 64-bit floats.
std::string g17(double v);

/// First line embedded in every output file: format version and config hash.
std::string file_preamble(std::uint64_t config_hash, int format_version);

void write_file(const std::string& path, const std::string& content);

/// CSV body: header row then rows of g17 numbers, comma-separated, LF endings.
std::string csv_body(const std::string& header, const std::vector<std::vector<double>>& rows);

std::string json_escape(const std::string& s);

}  // namespace kpplab

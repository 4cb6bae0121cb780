#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace adherence {

/// 12-significant-digit decimal rendering used by every CSV artifact, so
/// repeated runs produce byte-identical files.
std::string format_double(double value);

std::string format_int(std::int64_t value);

/// Joins fields with commas. Fields in this project never contain commas,
/// quotes, or newlines; a field that does anyway gets RFC-4180 quoting.
std::string csv_join(const std::vector<std::string>& fields);

/// Splits one line on commas, undoing RFC-4180 quoting if present.
std::vector<std::string> csv_split(const std::string& line);

}  // namespace adherence

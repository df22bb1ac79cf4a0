#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

namespace robloc {

// Shortest decimal string that round-trips to the same double.
std::string FormatDouble(double value);

// Writes through `writer` into a sibling temporary file and renames it over
// `path` only once the writer returns, so an interrupted run never leaves a
// truncated file behind.
void WriteFileAtomically(const std::filesystem::path& path,
                         const std::function<void(std::ostream&)>& writer);

}  // namespace robloc

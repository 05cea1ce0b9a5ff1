#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "ptychotomo/core/array.hpp"

namespace ptychotomo {

/// Grayscale PNG montage of every slice of a (Nz, N, N) volume, slices tiled left to right in
/// rows of `columns`. Values are mapped linearly from the fixed window [lo, hi] to 0..255.
void write_preview_png(const std::filesystem::path& path, const Array3d& volume, double lo, double hi,
                       std::size_t columns = 4);

/// 64-bit FNV-1a of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Writes <dir>/manifest.json: command, inputs, config (with its hash), outputs, version and
/// UTC timestamps. Replaces any previous manifest in the directory.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& inputs,
                    const nlohmann::json& config, const nlohmann::json& outputs, const std::string& started_utc);

std::string utc_now();

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace ptychotomo

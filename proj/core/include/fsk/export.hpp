#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "fsk/field.hpp"

namespace fsk {

enum class ExportFormat { csv, pgm, obj };

std::optional<ExportFormat> parse_export_format(std::string_view name);
const char* to_string(ExportFormat format) noexcept;

/// Header `x,y,z`, one node per line in row-major order (x fastest), values
/// printed with 17 significant digits.
std::string to_csv(const SampledField& field);

/// Binary P5, 16-bit big-endian, rows in grid order (iy = 0 first). Values
/// are mapped to round(65535 (v - min) / (max - min)); a constant field maps
/// to 0.
std::string to_pgm(const SampledField& field);

/// `v x y z` per node, then two counterclockwise triangles per cell with
/// 1-based indices.
std::string to_obj(const SampledField& field);

std::string render(const SampledField& field, ExportFormat format);

/// Writes the rendering to `path`; IoError on failure.
void export_field(const SampledField& field, ExportFormat format, const std::filesystem::path& path);

/// Reads a CSV written by to_csv back into a field.
SampledField read_csv_field(const std::filesystem::path& path);

}  // namespace fsk

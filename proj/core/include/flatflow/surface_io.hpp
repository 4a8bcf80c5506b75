#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "flatflow/surface.hpp"

namespace flatflow {

/// {"faces": [[[x,y],...],...], "pairings": [[[f,e],[f,e]],...]}
std::string surface_to_json(const TranslationSurface& surface);
TranslationSurface surface_from_json(std::string_view text);

/// Rational polygon input: {"vertices": [[x,y],...]} with optional
/// "angles": [[p,q],...] giving each interior angle as (p/q) pi.
RationalPolygon rational_polygon_from_json(std::string_view text, long max_denominator = 1000);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

TranslationSurface read_surface(const std::filesystem::path& path);
void write_surface(const std::filesystem::path& path, const TranslationSurface& surface);

}  // namespace flatflow

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "hkbounds/experiment.hpp"

namespace hkb {

enum class PlotKind { sandwich, exponent, regime_map };

const char* to_string(PlotKind kind);
PlotKind plot_kind_from_string(const std::string& s);

struct PlotOptions {
  /// Sample point for sandwich and exponent plots; the node nearest (x, y) is used.
  std::optional<Point> focus;
  /// Order parameter and seam time for the regime boundaries t = d^{2m} and t = seam.
  int m = 1;
  double seam = 0.0;
};

/// Writes a standalone SVG. Throws InvalidArgument when the selection has too
/// few rows (two for sandwich, five for exponent, one for regime_map).
void emit_svg(std::span<const ReportRow> rows, PlotKind kind, const std::filesystem::path& path,
              const PlotOptions& options = {});

}  // namespace hkb

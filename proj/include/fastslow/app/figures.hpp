#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace fastslow::app {

struct FigureResult {
  int number = 0;
  /// Data CSVs, SVGs and the figure manifest, relative to the output directory.
  std::vector<std::string> files;
  nlohmann::json summary;
};

/// Reproduces one figure (1..5) into outdir: data CSVs, SVG renders, a
/// summary JSON and fig<n>_manifest.json. Figures 1-3 use eps = 0.1,
/// h = 0.01; figures 4-5 use eps = 0.25, h = 0.1.
FigureResult figure(int n, const std::filesystem::path& outdir, unsigned jobs = 1);

}  // namespace fastslow::app

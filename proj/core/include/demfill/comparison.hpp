#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "demfill/blend.hpp"
#include "demfill/fillers.hpp"
#include "demfill/geometry.hpp"
#include "demfill/metrics.hpp"
#include "demfill/neural/network_spec.hpp"
#include "demfill/neural/weights.hpp"

namespace demfill {

/// Settings shared by every filler built through make_filler.
struct FillerOptions {
  int extend_radius = 3;
  IdwParams idw{};
  SplineParams spline{};
  std::optional<neural::NetworkSpec> network;
  std::optional<neural::WeightStore> weights;
  bool blend = false;  ///< wrap the filler in blend_boundary
  BlendConfig blend_config{};
};

/// Filler for "extend", "idw", "spline" or "neural". Throws DataError for an
/// unknown name or a neural filler without network and weights.
Filler make_filler(const std::string& method, const FillerOptions& options);

struct Method {
  std::string name;
  Filler filler;
};

struct Tile {
  std::string id;
  DemGrid terrain;  ///< complete ground truth
};

struct ComparisonConfig {
  /// Mask of tile i is sampled with seed base_seed + i unless explicit masks
  /// (one per tile) are given.
  std::uint64_t base_seed = 1;
  RectMaskParams rects{3, 4, 16};
  std::vector<VoidMask> masks;
  int bins = kDefaultHistogramBins;
  bool include_timing = true;  ///< false writes wall_time 0 for byte-stable output
};

struct EvalRecord {
  std::string method;
  std::string tile;
  std::uint64_t seed = 0;
  double mse = 0.0;
  double em = 0.0;
  double wall_time_s = 0.0;
  std::string status = "ok";  ///< "ok" or the failure message

  bool ok() const noexcept { return status == "ok"; }
};

struct MethodSummary {
  std::string method;
  double mean_mse = 0.0;
  double mean_em = 0.0;
  int succeeded = 0;
  int failed = 0;
};

struct ComparisonResult {
  std::vector<EvalRecord> records;  ///< sorted by (tile, method)
  std::vector<MethodSummary> summary;  ///< in method-list order
  int bins = kDefaultHistogramBins;
};

/// Runs every method on every masked tile. A failing method is recorded in
/// its row and the run continues.
ComparisonResult run_comparison(const std::vector<Tile>& tiles, const std::vector<Method>& methods,
                                const ComparisonConfig& config);

/// CSV with a "# demfill <version> bins=<n>" line, a header row and one row
/// per record.
void write_csv(std::ostream& out, const ComparisonResult& result);
void write_csv_file(const std::filesystem::path& path, const ComparisonResult& result);

std::string_view version() noexcept;

}  // namespace demfill

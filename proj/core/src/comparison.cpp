#include "demfill/comparison.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <tuple>

#include "demfill/error.hpp"
#include "demfill/neural/generator.hpp"

namespace demfill {

std::string_view version() noexcept { return DEMFILL_VERSION_STRING; }

Filler make_filler(const std::string& method, const FillerOptions& options) {
  Filler base;
  if (method == "extend") {
    const int r = options.extend_radius;
    base = [r](const DemGrid& g, const VoidMask& m) { return fill_extend(g, m, r); };
  } else if (method == "idw") {
    const IdwParams p = options.idw;
    base = [p](const DemGrid& g, const VoidMask& m) { return fill_idw(g, m, p); };
  } else if (method == "spline") {
    const SplineParams p = options.spline;
    base = [p](const DemGrid& g, const VoidMask& m) { return fill_spline(g, m, p); };
  } else if (method == "neural") {
    if (!options.network || !options.weights) {
      throw DataError("method 'neural' needs a network spec and weights");
    }
    neural::check_weights(*options.weights, neural::parameter_slots(*options.network));
    base = [spec = *options.network, w = *options.weights](const DemGrid& g, const VoidMask& m) {
      return neural::generator_forward(g, m, spec, w).refined;
    };
  } else {
    throw DataError("unknown method '" + method + "' (expected extend, idw, spline or neural)");
  }
  if (!options.blend) return base;
  const BlendConfig cfg = options.blend_config;
  return [base, cfg](const DemGrid& g, const VoidMask& m) { return fill_and_blend(g, m, base, cfg); };
}

ComparisonResult run_comparison(const std::vector<Tile>& tiles, const std::vector<Method>& methods,
                                const ComparisonConfig& config) {
  if (!config.masks.empty() && config.masks.size() != tiles.size()) {
    throw DataError("run_comparison: need exactly one mask per tile");
  }
  ComparisonResult result;
  result.bins = config.bins;
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const Tile& tile = tiles[t];
    if (derive_mask(tile.terrain).unknown_count() != 0) {
      throw DataError("run_comparison: tile '" + tile.id + "' is not complete");
    }
    const std::uint64_t seed = config.masks.empty() ? config.base_seed + t : 0;
    const VoidMask mask = config.masks.empty()
                              ? sample_rect_mask(tile.terrain.rows(), tile.terrain.cols(), seed, config.rects)
                              : config.masks[t];
    require_same_shape(tile.terrain, mask, "run_comparison");
    const DemGrid masked = apply_mask(tile.terrain, mask);

    for (const Method& m : methods) {
      EvalRecord rec{m.name, tile.id, seed};
      const auto start = std::chrono::steady_clock::now();
      try {
        const DemGrid filled = m.filler(masked, mask);
        rec.mse = mse(filled, tile.terrain, mask);
        rec.em = em_histogram(filled, tile.terrain, mask, config.bins);
        if (!std::isfinite(rec.mse) || !std::isfinite(rec.em)) throw NumericalError("non-finite metric");
      } catch (const Error& e) {
        rec.mse = rec.em = std::nan("");
        rec.status = e.what();
      }
      if (config.include_timing) {
        rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      result.records.push_back(std::move(rec));
    }
  }

  for (const Method& m : methods) {
    MethodSummary s{m.name};
    for (const EvalRecord& r : result.records) {
      if (r.method != m.name) continue;
      if (r.ok()) {
        s.mean_mse += r.mse;
        s.mean_em += r.em;
        ++s.succeeded;
      } else {
        ++s.failed;
      }
    }
    if (s.succeeded > 0) {
      s.mean_mse /= s.succeeded;
      s.mean_em /= s.succeeded;
    } else {
      s.mean_mse = s.mean_em = std::nan("");
    }
    result.summary.push_back(s);
  }

  std::stable_sort(result.records.begin(), result.records.end(), [](const EvalRecord& a, const EvalRecord& b) {
    return std::tie(a.tile, a.method) < std::tie(b.tile, b.method);
  });
  return result;
}

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const ComparisonResult& result) {
  out << "# demfill " << version() << " bins=" << result.bins << '\n';
  out << "method,tile,seed,mse,em,wall_time_s,status\n";
  for (const EvalRecord& r : result.records) {
    out << csv_field(r.method) << ',' << csv_field(r.tile) << ',' << r.seed << ',' << number(r.mse) << ','
        << number(r.em) << ',' << number(r.wall_time_s) << ',' << csv_field(r.status) << '\n';
  }
  if (!out) throw DataError("write_csv: write failed");
}

void write_csv_file(const std::filesystem::path& path, const ComparisonResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(out, result);
}

}  // namespace demfill

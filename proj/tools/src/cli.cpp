#include "demfill/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "demfill/blend.hpp"
#include "demfill/comparison.hpp"
#include "demfill/error.hpp"
#include "demfill/fillers.hpp"
#include "demfill/geometry.hpp"
#include "demfill/metrics.hpp"
#include "demfill/neural/network_spec.hpp"
#include "demfill/neural/training.hpp"
#include "demfill/neural/weights.hpp"
#include "demfill/raster.hpp"

namespace demfill {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct FillerFlags {
  std::string method;
  int radius = 3;
  double idw_power = 2.0;
  double idw_radius = 32.0;
  int idw_smoothing = 2;
  int knot_spacing = 8;
  double smoothing_weight = 1e-3;
  std::string network;
  std::string weights;
  BlendConfig blend{};
};

void add_filler_flags(CLI::App& cmd, FillerFlags& f) {
  cmd.add_option("--radius", f.radius, "Paraboloid window radius for 'extend'")->check(CLI::PositiveNumber);
  cmd.add_option("--idw-power", f.idw_power, "IDW distance exponent")->check(CLI::PositiveNumber);
  cmd.add_option("--idw-radius", f.idw_radius, "IDW search radius in pixels")->check(CLI::PositiveNumber);
  cmd.add_option("--idw-smoothing", f.idw_smoothing, "IDW 3x3 smoothing passes")->check(CLI::NonNegativeNumber);
  cmd.add_option("--knot-spacing", f.knot_spacing, "Spline knot spacing in pixels")->check(CLI::Range(2, 1 << 20));
  cmd.add_option("--smoothing-weight", f.smoothing_weight, "Spline roughness weight")->check(CLI::NonNegativeNumber);
  cmd.add_option("--network", f.network, "Network spec file (default: built-in canonical spec)");
  cmd.add_option("--weights", f.weights, "DEMW weight file for 'neural'");
}

void add_blend_flags(CLI::App& cmd, BlendConfig& b) {
  cmd.add_option("--blend-width", b.width, "Number of boundary rings blended")->check(CLI::PositiveNumber);
  cmd.add_option("--fit-radius", b.fit_radius, "Paraboloid window radius")->check(CLI::PositiveNumber);
  cmd.add_option("--sigmoid-steepness", b.sigmoid_steepness, "Blend curve steepness")->check(CLI::PositiveNumber);
}

neural::NetworkSpec network_from(const std::string& path) {
  return path.empty() ? neural::canonical_network_spec() : neural::load_network_spec(path);
}

FillerOptions filler_options(const FillerFlags& f, bool blend, bool needs_neural) {
  FillerOptions o;
  o.extend_radius = f.radius;
  o.idw = {f.idw_power, f.idw_radius, f.idw_smoothing};
  o.spline.knot_spacing = f.knot_spacing;
  o.spline.smoothing_weight = f.smoothing_weight;
  o.blend = blend;
  o.blend_config = f.blend;
  if (needs_neural) {
    if (f.weights.empty()) throw DataError("method 'neural' needs --weights");
    o.network = network_from(f.network);
    o.weights = neural::load_weights_file(f.weights, neural::parameter_slots(*o.network));
  }
  return o;
}

AscTile load_tile(const std::string& in, const std::string& mask_path) {
  AscTile tile = read_asc_file(in);
  if (!mask_path.empty()) {
    const VoidMask extra = read_mask_asc_file(mask_path);
    if (extra.rows() != tile.grid.rows() || extra.cols() != tile.grid.cols()) {
      throw DataError("mask '" + mask_path + "' does not match the grid shape");
    }
    tile.mask = mask_union(tile.mask, extra);
  }
  return tile;
}

struct FillCommand {
  FillerFlags filler;
  std::string in, mask, out;
};

int run_fill(const FillCommand& c, bool blend, std::ostream& out) {
  const AscTile tile = load_tile(c.in, c.mask);
  const Filler f = make_filler(c.filler.method, filler_options(c.filler, blend, c.filler.method == "neural"));
  const DemGrid filled = f(tile.grid, tile.mask);
  write_asc_file(c.out, filled, VoidMask(filled.rows(), filled.cols()));
  out << "filled " << tile.mask.unknown_count() << " pixels with " << c.filler.method
      << (blend ? " + blend" : "") << " -> " << c.out << '\n';
  return kExitOk;
}

struct EvalCommand {
  std::string pred, truth, mask;
  int bins = kDefaultHistogramBins;
};

int run_eval(const EvalCommand& c, std::ostream& out) {
  const AscTile pred = read_asc_file(c.pred);
  const AscTile truth = read_asc_file(c.truth);
  const VoidMask mask = read_mask_asc_file(c.mask);
  out << "mse=" << fmt(mse(pred.grid, truth.grid, mask)) << " em="
      << fmt(em_histogram(pred.grid, truth.grid, mask, c.bins)) << '\n';
  return kExitOk;
}

struct MaskGenCommand {
  int rows = 64, cols = 64;
  std::uint64_t seed = 1;
  RectMaskParams rects{1, 4, 16};
  std::string out;
};

int run_mask_gen(const MaskGenCommand& c, std::ostream& out) {
  const VoidMask mask = sample_rect_mask(c.rows, c.cols, c.seed, c.rects);
  if (c.out.empty()) {
    write_mask_asc(out, mask);
  } else {
    write_mask_asc_file(c.out, mask);
  }
  return kExitOk;
}

struct SynthCommand {
  int rows = 64, cols = 64;
  std::uint64_t seed = 1;
  std::string terrain = "gaussian_hills";
  std::string out;
};

int run_synth(const SynthCommand& c, std::ostream& out) {
  const DemGrid g = synth_terrain(c.rows, c.cols, c.seed, parse_terrain_kind(c.terrain));
  const VoidMask none(g.rows(), g.cols());
  if (c.out.empty()) {
    write_asc(out, g, none);
  } else {
    write_asc_file(c.out, g, none);
  }
  return kExitOk;
}

struct TrainCommand {
  int steps = 500;
  std::uint64_t seed = 1;
  std::uint64_t data_seed = 1;
  int tiles = 20;
  int size = 32;
  double learning_rate = 1e-4;
  std::string network, out_weights, trace;
};

int run_train(const TrainCommand& c, std::ostream& out) {
  const neural::NetworkSpec spec = network_from(c.network);
  const auto data = neural::synth_training_set(c.tiles, c.size, c.data_seed);
  neural::TrainOptions opts;
  opts.steps = c.steps;
  opts.seed = c.seed;
  opts.adam.learning_rate = c.learning_rate;
  const neural::TrainResult r = neural::train_coarse(data, spec, opts);
  neural::save_weights_file(c.out_weights, r.weights);
  if (!c.trace.empty()) {
    std::ofstream trace(c.trace);
    if (!trace) throw DataError("cannot write '" + c.trace + "'");
    trace << "step,loss\n";
    for (std::size_t i = 0; i < r.loss_trace.size(); ++i) trace << i + 1 << ',' << fmt(r.loss_trace[i]) << '\n';
  }
  out << "initial_mean_loss=" << fmt(r.initial_mean_loss) << " final_mean_loss=" << fmt(r.final_mean_loss)
      << " steps=" << c.steps << '\n';
  return kExitOk;
}

struct CompareCommand {
  std::vector<std::string> methods{"extend", "idw", "spline"};
  std::string tiles_dir, csv;
  int tiles = 10, size = 64;
  std::string terrain = "gaussian_hills";
  std::uint64_t tile_seed = 1;
  std::uint64_t mask_seed = 1;
  RectMaskParams rects{3, 4, 16};
  int bins = kDefaultHistogramBins;
  bool no_timing = false;
  bool blend = false;
  FillerFlags filler;
};

std::vector<Tile> compare_tiles(const CompareCommand& c) {
  std::vector<Tile> tiles;
  if (!c.tiles_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(c.tiles_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".asc") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no .asc tiles in '" + c.tiles_dir + "'");
    for (const auto& p : files) tiles.push_back({p.stem().string(), read_asc_file(p).grid});
    return tiles;
  }
  const TerrainKind kind = parse_terrain_kind(c.terrain);
  for (int i = 0; i < c.tiles; ++i) {
    std::string id = std::to_string(i);
    id = "tile_" + std::string(id.size() < 3 ? 3 - id.size() : 0, '0') + id;
    tiles.push_back({id, synth_terrain(c.size, c.size, c.tile_seed + static_cast<std::uint64_t>(i), kind)});
  }
  return tiles;
}

int run_compare(const CompareCommand& c, std::ostream& out) {
  const bool neural = std::find(c.methods.begin(), c.methods.end(), "neural") != c.methods.end();
  const FillerOptions opts = filler_options(c.filler, c.blend, neural);
  std::vector<Method> methods;
  for (const std::string& m : c.methods) methods.push_back({m, make_filler(m, opts)});

  ComparisonConfig cfg;
  cfg.base_seed = c.mask_seed;
  cfg.rects = c.rects;
  cfg.bins = c.bins;
  cfg.include_timing = !c.no_timing;
  const ComparisonResult result = run_comparison(compare_tiles(c), methods, cfg);
  if (!c.csv.empty()) write_csv_file(c.csv, result);
  for (const MethodSummary& s : result.summary) {
    out << s.method << " mean_mse=" << fmt(s.mean_mse) << " mean_em=" << fmt(s.mean_em)
        << " ok=" << s.succeeded << " failed=" << s.failed << '\n';
  }
  return kExitOk;
}

void add_rect_flags(CLI::App& cmd, RectMaskParams& r) {
  cmd.add_option("--rects", r.count, "Number of rectangles")->check(CLI::NonNegativeNumber);
  cmd.add_option("--min-size", r.min_side, "Smallest rectangle side")->check(CLI::PositiveNumber);
  cmd.add_option("--max-size", r.max_side, "Largest rectangle side")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"DEM void filling toolkit", "demfill"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  FillCommand fill;
  auto* fill_cmd = app.add_subcommand("fill", "Fill the voids of an ASCII grid");
  fill_cmd->add_option("--method", fill.filler.method, "extend | idw | spline | neural")
      ->required()
      ->check(CLI::IsMember({"extend", "idw", "spline", "neural"}));
  fill_cmd->add_option("--in", fill.in, "Input ASCII grid")->required();
  fill_cmd->add_option("--mask", fill.mask, "Extra 0/1 mask grid, merged with nodata pixels");
  fill_cmd->add_option("--out", fill.out, "Output ASCII grid")->required();
  add_filler_flags(*fill_cmd, fill.filler);

  FillCommand blend;
  auto* blend_cmd = app.add_subcommand("blend", "Fill, then blend the fill into a smooth boundary extension");
  blend_cmd->add_option("--method", blend.filler.method, "extend | idw | spline | neural")
      ->required()
      ->check(CLI::IsMember({"extend", "idw", "spline", "neural"}));
  blend_cmd->add_option("--in", blend.in, "Input ASCII grid")->required();
  blend_cmd->add_option("--mask", blend.mask, "Extra 0/1 mask grid, merged with nodata pixels");
  blend_cmd->add_option("--out", blend.out, "Output ASCII grid")->required();
  add_filler_flags(*blend_cmd, blend.filler);
  add_blend_flags(*blend_cmd, blend.filler.blend);

  EvalCommand eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a fill against ground truth over the mask");
  eval_cmd->add_option("--pred", eval.pred, "Filled ASCII grid")->required();
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth ASCII grid")->required();
  eval_cmd->add_option("--mask", eval.mask, "0/1 mask grid of scored pixels")->required();
  eval_cmd->add_option("--bins", eval.bins, "Histogram bins")->check(CLI::PositiveNumber);

  MaskGenCommand mask_gen;
  auto* mask_cmd = app.add_subcommand("mask-gen", "Sample a rectangular void mask");
  mask_cmd->add_option("--rows", mask_gen.rows)->required()->check(CLI::PositiveNumber);
  mask_cmd->add_option("--cols", mask_gen.cols)->required()->check(CLI::PositiveNumber);
  mask_cmd->add_option("--seed", mask_gen.seed);
  add_rect_flags(*mask_cmd, mask_gen.rects);
  mask_cmd->add_option("--out", mask_gen.out, "Output mask grid (default: stdout)");

  SynthCommand synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic terrain tile");
  synth_cmd->add_option("--rows", synth.rows)->check(CLI::Range(8, 1 << 16));
  synth_cmd->add_option("--cols", synth.cols)->check(CLI::Range(8, 1 << 16));
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--terrain", synth.terrain, "quadratic | gaussian_hills | fractal")
      ->check(CLI::IsMember({"quadratic", "gaussian_hills", "fractal"}));
  synth_cmd->add_option("--out", synth.out, "Output ASCII grid (default: stdout)");

  TrainCommand train;
  auto* train_cmd = app.add_subcommand("train-coarse", "Train the coarse stage on synthetic tiles");
  train_cmd->add_option("--steps", train.steps)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--seed", train.seed, "Weight initialisation seed");
  train_cmd->add_option("--data-seed", train.data_seed, "Synthetic dataset seed");
  train_cmd->add_option("--tiles", train.tiles)->check(CLI::PositiveNumber);
  train_cmd->add_option("--size", train.size)->check(CLI::Range(8, 4096));
  train_cmd->add_option("--learning-rate", train.learning_rate)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--network", train.network, "Network spec file (default: built-in canonical spec)");
  train_cmd->add_option("--out-weights", train.out_weights, "Output DEMW file")->required();
  train_cmd->add_option("--trace", train.trace, "Write the per-step loss trace as CSV");

  CompareCommand compare;
  auto* compare_cmd = app.add_subcommand("compare", "Compare fillers on masked tiles");
  compare_cmd->add_option("--methods", compare.methods, "Comma-separated method list")->delimiter(',');
  compare_cmd->add_option("--tiles-dir", compare.tiles_dir, "Directory of complete .asc tiles");
  compare_cmd->add_option("--tiles", compare.tiles, "Synthetic tile count")->check(CLI::PositiveNumber);
  compare_cmd->add_option("--size", compare.size, "Synthetic tile side")->check(CLI::Range(8, 4096));
  compare_cmd->add_option("--terrain", compare.terrain)
      ->check(CLI::IsMember({"quadratic", "gaussian_hills", "fractal"}));
  compare_cmd->add_option("--tile-seed", compare.tile_seed);
  compare_cmd->add_option("--mask-seed", compare.mask_seed);
  add_rect_flags(*compare_cmd, compare.rects);
  compare_cmd->add_option("--bins", compare.bins)->check(CLI::PositiveNumber);
  compare_cmd->add_option("--csv", compare.csv, "Output CSV file");
  compare_cmd->add_flag("--no-timing", compare.no_timing, "Write wall_time_s as 0");
  compare_cmd->add_flag("--blend", compare.blend, "Blend every fill into the boundary extension");
  add_filler_flags(*compare_cmd, compare.filler);
  add_blend_flags(*compare_cmd, compare.filler.blend);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    if (*fill_cmd) return run_fill(fill, false, out);
    if (*blend_cmd) return run_fill(blend, true, out);
    if (*eval_cmd) return run_eval(eval, out);
    if (*mask_cmd) return run_mask_gen(mask_gen, out);
    if (*synth_cmd) return run_synth(synth, out);
    if (*train_cmd) return run_train(train, out);
    if (*compare_cmd) return run_compare(compare, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace demfill

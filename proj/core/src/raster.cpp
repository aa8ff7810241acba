#include "demfill/raster.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include "demfill/error.hpp"

namespace demfill {

DemGrid::DemGrid(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw DataError("grid dimensions must be positive");
  values_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

DemGrid::DemGrid(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows < 1 || cols < 1) throw DataError("grid dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw DataError("grid value count does not match rows x cols");
  }
}

void DemGrid::copy_metadata(const DemGrid& other) {
  cell_size_ = other.cell_size_;
  origin_ = other.origin_;
  nodata_ = other.nodata_;
}

VoidMask::VoidMask(int rows, int cols, bool unknown) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw DataError("mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
               unknown ? 1 : 0);
}

std::size_t VoidMask::unknown_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool same_shape(const DemGrid& grid, const VoidMask& mask) noexcept {
  return grid.rows() == mask.rows() && grid.cols() == mask.cols();
}

bool same_shape(const DemGrid& a, const DemGrid& b) noexcept {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

void require_same_shape(const DemGrid& grid, const VoidMask& mask, const char* what) {
  if (!same_shape(grid, mask)) {
    throw DataError(std::string(what) + ": grid is " + std::to_string(grid.rows()) + "x" +
                    std::to_string(grid.cols()) + " but mask is " +
                    std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()));
  }
}

void require_same_shape(const DemGrid& a, const DemGrid& b, const char* what) {
  if (!same_shape(a, b)) {
    throw DataError(std::string(what) + ": grids differ in shape (" +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
}

VoidMask derive_mask(const DemGrid& grid) {
  VoidMask mask(grid.rows(), grid.cols());
  for (int i = 0; i < grid.rows(); ++i)
    for (int j = 0; j < grid.cols(); ++j)
      if (grid(i, j) == grid.nodata()) mask.set(i, j, true);
  return mask;
}

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Non-empty lines only; line numbers are 1-based physical lines.
std::vector<Line> tokenize_lines(const std::string& text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++number;
    auto tokens = split_ws(std::string_view(text).substr(pos, end - pos));
    if (!tokens.empty()) lines.push_back({number, std::move(tokens)});
    pos = end + 1;
  }
  return lines;
}

double parse_real(std::string_view tok, std::size_t line) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "non-numeric token '" + std::string(tok) + "'");
  }
  return v;
}

int parse_count(std::string_view tok, std::size_t line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  }
  if (v < 1) throw ParseError(line, "dimension must be positive");
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

constexpr std::array<std::string_view, 6> kHeaderKeys = {
    "ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"};

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string slurp(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

AscTile read_asc(std::istream& in) {
  const std::string text = slurp(in);
  const auto lines = tokenize_lines(text);
  if (lines.size() < kHeaderKeys.size()) {
    throw ParseError(lines.empty() ? 1 : lines.back().number + 1, "truncated header");
  }

  std::array<double, 6> header{};
  int ncols = 0;
  int nrows = 0;
  for (std::size_t h = 0; h < kHeaderKeys.size(); ++h) {
    const Line& line = lines[h];
    if (line.tokens.size() != 2) {
      throw ParseError(line.number, "malformed header line, expected '<key> <value>'");
    }
    if (lower(line.tokens[0]) != kHeaderKeys[h]) {
      throw ParseError(line.number, "expected header key '" + std::string(kHeaderKeys[h]) +
                                        "', got '" + std::string(line.tokens[0]) + "'");
    }
    if (h == 0) {
      ncols = parse_count(line.tokens[1], line.number);
    } else if (h == 1) {
      nrows = parse_count(line.tokens[1], line.number);
    } else {
      header[h] = parse_real(line.tokens[1], line.number);
      if (!std::isfinite(header[h])) throw ParseError(line.number, "non-finite header value");
    }
  }

  const std::size_t data_lines = lines.size() - kHeaderKeys.size();
  if (data_lines != static_cast<std::size_t>(nrows)) {
    const std::size_t at = data_lines > static_cast<std::size_t>(nrows)
                               ? lines[kHeaderKeys.size() + nrows].number
                               : lines.back().number + 1;
    throw ParseError(at, "expected " + std::to_string(nrows) + " data rows, found " +
                             std::to_string(data_lines));
  }

  const double nodata = header[5];
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(nrows) * static_cast<std::size_t>(ncols));
  for (int r = 0; r < nrows; ++r) {
    const Line& line = lines[kHeaderKeys.size() + r];
    if (line.tokens.size() != static_cast<std::size_t>(ncols)) {
      throw ParseError(line.number, "expected " + std::to_string(ncols) + " values, found " +
                                        std::to_string(line.tokens.size()));
    }
    for (auto tok : line.tokens) {
      const double v = parse_real(tok, line.number);
      if (!std::isfinite(v) && v != nodata) {
        throw ParseError(line.number, "non-finite value '" + std::string(tok) + "'");
      }
      values.push_back(v);
    }
  }

  AscTile tile;
  tile.grid = DemGrid(nrows, ncols, std::move(values));
  tile.grid.set_origin({header[2], header[3]});
  tile.grid.set_cell_size(header[4]);
  tile.grid.set_nodata(nodata);
  tile.mask = derive_mask(tile.grid);
  return tile;
}

AscTile read_asc_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_asc(in);
  } catch (const ParseError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace {

template <typename ValueAt>
void write_grid_text(std::ostream& out, int rows, int cols, WorldOrigin origin,
                     double cell_size, double nodata, ValueAt value_at) {
  out << "ncols " << cols << '\n'
      << "nrows " << rows << '\n'
      << "xllcorner " << format_real(origin.x) << '\n'
      << "yllcorner " << format_real(origin.y) << '\n'
      << "cellsize " << format_real(cell_size) << '\n'
      << "NODATA_value " << format_real(nodata) << '\n';
  std::string line;
  for (int i = 0; i < rows; ++i) {
    line.clear();
    for (int j = 0; j < cols; ++j) {
      if (j) line += ' ';
      line += format_real(value_at(i, j));
    }
    line += '\n';
    out << line;
  }
}

}  // namespace

void write_asc(std::ostream& out, const DemGrid& grid, const VoidMask& mask) {
  require_same_shape(grid, mask, "write_asc");
  write_grid_text(out, grid.rows(), grid.cols(), grid.origin(), grid.cell_size(),
                  grid.nodata(), [&](int i, int j) {
                    return mask.unknown(i, j) ? grid.nodata() : grid(i, j);
                  });
}

void write_asc_file(const std::filesystem::path& path, const DemGrid& grid,
                    const VoidMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_asc(out, grid, mask);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

VoidMask read_mask_asc(std::istream& in) {
  const AscTile tile = read_asc(in);
  VoidMask mask(tile.grid.rows(), tile.grid.cols());
  for (int i = 0; i < mask.rows(); ++i) {
    for (int j = 0; j < mask.cols(); ++j) {
      const double v = tile.grid(i, j);
      if (v == 1.0) {
        mask.set(i, j, true);
      } else if (v != 0.0) {
        // Data rows start after the six header lines.
        throw ParseError(static_cast<std::size_t>(7 + i),
                         "mask values must be 0 or 1, got " + format_real(v));
      }
    }
  }
  return mask;
}

VoidMask read_mask_asc_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_mask_asc(in);
  } catch (const ParseError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_mask_asc(std::ostream& out, const VoidMask& mask) {
  write_grid_text(out, mask.rows(), mask.cols(), {}, 1.0, kDefaultNodata,
                  [&](int i, int j) { return mask.unknown(i, j) ? 1.0 : 0.0; });
}

void write_mask_asc_file(const std::filesystem::path& path, const VoidMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_mask_asc(out, mask);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

VoidMask mask_union(const VoidMask& a, const VoidMask& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DataError("mask_union: masks differ in shape");
  }
  VoidMask out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (b.unknown(i, j)) out.set(i, j, true);
  return out;
}

DemGrid apply_mask(const DemGrid& grid, const VoidMask& mask) {
  require_same_shape(grid, mask, "apply_mask");
  DemGrid out = grid;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (mask[k]) out[k] = out.nodata();
  return out;
}

NormalizedGrid normalize(const DemGrid& grid, const VoidMask& mask) {
  require_same_shape(grid, mask, "normalize");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (mask[k]) continue;
    lo = std::min(lo, grid[k]);
    hi = std::max(hi, grid[k]);
  }
  if (lo > hi) throw DataError("normalize: every pixel is unknown");

  NormalizedGrid out;
  out.norm.mid = 0.5 * (lo + hi);
  out.norm.half_range = std::max(1e-6, 0.5 * (hi - lo));
  out.grid = DemGrid(grid.rows(), grid.cols(), 0.0);
  out.grid.copy_metadata(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!mask[k]) out.grid[k] = out.norm.normalize(grid[k]);
  }
  return out;
}

}  // namespace demfill

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace demfill {

inline constexpr double kDefaultNodata = -9999.0;

struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct WorldOrigin {
  double x = 0.0;
  double y = 0.0;
};

/// Row-major grid of heights in meters.
///
/// Every stored value is either finite or exactly the nodata sentinel.
/// Georeferencing (origin, cell size) is carried along for I/O only; all
/// algorithms work in pixel coordinates.
class DemGrid {
 public:
  DemGrid() = default;
  DemGrid(int rows, int cols, double fill = 0.0);
  DemGrid(int rows, int cols, std::vector<double> values);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int row, int col) const { return values_[index(row, col)]; }
  double& operator()(int row, int col) { return values_[index(row, col)]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double nodata() const noexcept { return nodata_; }
  void set_nodata(double v) noexcept { nodata_ = v; }
  double cell_size() const noexcept { return cell_size_; }
  void set_cell_size(double v) noexcept { cell_size_ = v; }
  WorldOrigin origin() const noexcept { return origin_; }
  void set_origin(WorldOrigin o) noexcept { origin_ = o; }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && row < rows_ && col >= 0 && col < cols_;
  }
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  /// Copies georeferencing and nodata from `other`.
  void copy_metadata(const DemGrid& other);

 private:
  int rows_ = 0;
  int cols_ = 0;
  double cell_size_ = 1.0;
  WorldOrigin origin_{};
  double nodata_ = kDefaultNodata;
  std::vector<double> values_;
};

/// Binary mask; 1 marks an unknown pixel, 0 a known one.
class VoidMask {
 public:
  VoidMask() = default;
  VoidMask(int rows, int cols, bool unknown = false);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool unknown(int row, int col) const { return bits_[index(row, col)] != 0; }
  bool known(int row, int col) const { return bits_[index(row, col)] == 0; }
  void set(int row, int col, bool unknown) { bits_[index(row, col)] = unknown ? 1 : 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t unknown_count() const noexcept;
  std::size_t known_count() const noexcept { return size() - unknown_count(); }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && row < rows_ && col >= 0 && col < cols_;
  }
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  friend bool operator==(const VoidMask&, const VoidMask&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

bool same_shape(const DemGrid& grid, const VoidMask& mask) noexcept;
bool same_shape(const DemGrid& a, const DemGrid& b) noexcept;

/// Throws DataError when the shapes differ.
void require_same_shape(const DemGrid& grid, const VoidMask& mask, const char* what);
void require_same_shape(const DemGrid& a, const DemGrid& b, const char* what);

/// Mask with bit = 1 exactly where the grid holds its nodata sentinel.
VoidMask derive_mask(const DemGrid& grid);

struct AscTile {
  DemGrid grid;
  VoidMask mask;
};

/// Parses the ASCII-grid format: six header lines (ncols, nrows, xllcorner,
/// yllcorner, cellsize, NODATA_value; keys case-insensitive) followed by
/// nrows lines of ncols values, top row first. Throws ParseError.
AscTile read_asc(std::istream& in);
AscTile read_asc_file(const std::filesystem::path& path);

/// Writes unknown pixels as the nodata sentinel and heights with 17
/// significant digits.
void write_asc(std::ostream& out, const DemGrid& grid, const VoidMask& mask);
void write_asc_file(const std::filesystem::path& path, const DemGrid& grid,
                    const VoidMask& mask);

/// A sidecar mask file is an ASCII grid whose values are 0 (known) or 1
/// (unknown).
VoidMask read_mask_asc(std::istream& in);
VoidMask read_mask_asc_file(const std::filesystem::path& path);
void write_mask_asc(std::ostream& out, const VoidMask& mask);
void write_mask_asc_file(const std::filesystem::path& path, const VoidMask& mask);

/// Union of two masks of the same shape.
VoidMask mask_union(const VoidMask& a, const VoidMask& b);

/// Grid copy with unknown pixels replaced by the nodata sentinel.
DemGrid apply_mask(const DemGrid& grid, const VoidMask& mask);

/// Affine map between heights and the network's [-1, 1] working range.
struct Normalization {
  double mid = 0.0;
  double half_range = 1.0;

  double normalize(double v) const noexcept { return (v - mid) / half_range; }
  double denormalize(double v) const noexcept { return v * half_range + mid; }
};

struct NormalizedGrid {
  DemGrid grid;
  Normalization norm;
};

/// Maps known pixels into [-1, 1] using their min/max; unknown pixels become
/// 0. Throws DataError when every pixel is unknown.
NormalizedGrid normalize(const DemGrid& grid, const VoidMask& mask);

}  // namespace demfill

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "demfill/neural/network_spec.hpp"

namespace demfill::neural {

struct NamedTensor {
  std::string name;
  std::vector<int> dims;
  std::vector<float> data;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Ordered list of named parameter tensors.
class WeightStore {
 public:
  WeightStore() = default;
  explicit WeightStore(std::vector<NamedTensor> tensors) : tensors_(std::move(tensors)) {}

  const std::vector<NamedTensor>& tensors() const noexcept { return tensors_; }
  std::size_t size() const noexcept { return tensors_.size(); }

  const NamedTensor* find(std::string_view name) const noexcept;
  NamedTensor* find(std::string_view name) noexcept;
  /// Throws DataError when absent.
  const NamedTensor& at(std::string_view name) const;
  NamedTensor& at(std::string_view name);

  void add(NamedTensor t) { tensors_.push_back(std::move(t)); }

  /// Bitwise equality of names, shapes and data.
  friend bool operator==(const WeightStore& a, const WeightStore& b);

 private:
  std::vector<NamedTensor> tensors_;
};

/// Glorot-uniform weights and zero biases, deterministic for a seed.
WeightStore init_weights(std::span<const ParamSlot> slots, std::uint64_t seed);
WeightStore zero_weights(std::span<const ParamSlot> slots);

/// Throws DataError unless the store matches the slots one-to-one in order,
/// name and shape.
void check_weights(const WeightStore& weights, std::span<const ParamSlot> slots);

inline constexpr std::uint32_t kWeightFormatVersion = 1;

/// DEMW container: "DEMW", u32 version, u32 tensor count, then per tensor
/// u16 name length, UTF-8 name, u8 rank, u32 dims, float32 data. All
/// integers and floats little-endian.
void save_weights(std::ostream& out, const WeightStore& weights);
void save_weights_file(const std::filesystem::path& path, const WeightStore& weights);

/// Reads a complete store or throws DataError (bad magic, unsupported
/// version, truncation); never returns partial weights.
WeightStore load_weights(std::istream& in);
/// As above, then check_weights against the expected slots.
WeightStore load_weights(std::istream& in, std::span<const ParamSlot> slots);
WeightStore load_weights_file(const std::filesystem::path& path, std::span<const ParamSlot> slots);

}  // namespace demfill::neural

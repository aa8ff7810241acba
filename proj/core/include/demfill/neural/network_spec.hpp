#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "demfill/neural/ops.hpp"

namespace demfill::neural {

enum class LayerKind { conv, upsample_nearest, elu, tanh, lfe, attention };

/// Dilations of the six 3x3 conv + ELU stages of a local feature extraction
/// block.
inline constexpr std::array<int, 6> kLfeDilations{2, 4, 8, 8, 4, 2};

struct LayerSpec {
  LayerKind kind = LayerKind::elu;
  ConvShape conv{};       // conv
  int channels = 0;       // lfe
  int factor = 2;         // upsample_nearest
  int patch = 3;          // attention
  double lambda = 10.0;   // attention
};

/// Coarse-to-fine generator layout.
///
/// The coarse stage maps [heights, mask] (2 channels) to one channel. Its
/// output is composited into the hole and, again paired with the mask, fed
/// to both refinement branches; their outputs are concatenated channel-wise
/// and decoded to one channel.
struct NetworkSpec {
  std::string name = "unnamed";
  std::vector<LayerSpec> coarse;
  std::vector<LayerSpec> branch_a;
  std::vector<LayerSpec> branch_b;
  std::vector<LayerSpec> decoder;
};

enum class CriticHead { sum, mean };

/// Conv stack on a 1-channel height map whose final one-channel map is
/// reduced to a scalar by the head.
struct CriticSpec {
  std::string name = "critic";
  std::vector<LayerSpec> layers;
  CriticHead head = CriticHead::mean;
};

struct ParamSlot {
  std::string name;
  std::vector<int> dims;

  std::size_t count() const noexcept;
  friend bool operator==(const ParamSlot&, const ParamSlot&) = default;
};

/// Parses the line-oriented layer format (see README). Throws ParseError on
/// syntax errors and DataError on channel or scale inconsistencies.
NetworkSpec parse_network_spec(std::string_view text);
NetworkSpec load_network_spec(const std::filesystem::path& path);

CriticSpec parse_critic_spec(std::string_view text);
CriticSpec load_critic_spec(const std::filesystem::path& path);

std::string_view canonical_network_text() noexcept;
NetworkSpec canonical_network_spec();

/// Parameter tensors in evaluation order. Conv weights are named
/// "<section>.<layer>.weight" with dims [out, in, k, k] and biases
/// "<section>.<layer>.bias" with dims [out]; LFE stages insert ".lfe<s>"
/// before the suffix.
std::vector<ParamSlot> parameter_slots(const NetworkSpec& spec);
std::vector<ParamSlot> parameter_slots(const CriticSpec& spec);
std::vector<ParamSlot> section_slots(std::string_view section, const std::vector<LayerSpec>& layers);

/// Largest cumulative stride of any section; inputs are padded to a multiple
/// of it.
int required_multiple(const NetworkSpec& spec);

}  // namespace demfill::neural

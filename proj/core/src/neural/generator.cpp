#include "demfill/neural/generator.hpp"

#include "demfill/error.hpp"
#include "demfill/neural/ops.hpp"
#include "demfill/neural/stack.hpp"

namespace demfill::neural {

namespace {

int round_up(int v, int multiple) { return (v + multiple - 1) / multiple * multiple; }

DemGrid composite(const DemGrid& known, const VoidMask& mask, const Tensor4& out, const Normalization& norm) {
  DemGrid result = known;
  for (int i = 0; i < known.rows(); ++i)
    for (int j = 0; j < known.cols(); ++j)
      if (mask.unknown(i, j)) result(i, j) = norm.denormalize(static_cast<double>(out(0, 0, i, j)));
  return result;
}

}  // namespace

VoidMask pad_mask(const VoidMask& mask, int multiple) {
  if (multiple < 1) throw DataError("pad_mask: multiple must be >= 1");
  VoidMask out(round_up(mask.rows(), multiple), round_up(mask.cols(), multiple), true);
  for (int i = 0; i < mask.rows(); ++i)
    for (int j = 0; j < mask.cols(); ++j) out.set(i, j, mask.unknown(i, j));
  return out;
}

Tensor4 make_input(const DemGrid& normalized, const VoidMask& mask, int multiple) {
  require_same_shape(normalized, mask, "make_input");
  const VoidMask padded = pad_mask(mask, multiple);
  Tensor4 x(1, 2, padded.rows(), padded.cols());
  for (int i = 0; i < padded.rows(); ++i) {
    for (int j = 0; j < padded.cols(); ++j) {
      const bool unknown = padded.unknown(i, j);
      x(0, 0, i, j) = unknown ? 0.0f : static_cast<float>(normalized(i, j));
      x(0, 1, i, j) = unknown ? 1.0f : 0.0f;
    }
  }
  return x;
}

GeneratorOutput generator_forward(const DemGrid& known, const VoidMask& mask, const NetworkSpec& spec,
                                  const WeightStore& weights) {
  require_same_shape(known, mask, "generator_forward");
  check_weights(weights, parameter_slots(spec));
  const NormalizedGrid ng = normalize(known, mask);
  const int multiple = required_multiple(spec);
  const VoidMask padded = pad_mask(mask, multiple);

  Stack<float> coarse(spec.coarse, "coarse", weights);
  Tensor4 x = make_input(ng.grid, mask, multiple);
  const Tensor4 coarse_out = coarse.forward(x, &padded);

  // Second-stage input: coarse prediction inside the hole, known heights outside.
  Tensor4 refine_in = x;
  for (int i = 0; i < padded.rows(); ++i)
    for (int j = 0; j < padded.cols(); ++j)
      if (padded.unknown(i, j)) refine_in(0, 0, i, j) = coarse_out(0, 0, i, j);

  Stack<float> branch_a(spec.branch_a, "branch_a", weights);
  Stack<float> branch_b(spec.branch_b, "branch_b", weights);
  Stack<float> decoder(spec.decoder, "decoder", weights);
  const Tensor4 a = branch_a.forward(refine_in, &padded);
  const Tensor4 b = branch_b.forward(refine_in, &padded);
  const Tensor4 refined = decoder.forward(concat_channels(a, b), &padded);

  return {composite(known, mask, coarse_out, ng.norm), composite(known, mask, refined, ng.norm)};
}

}  // namespace demfill::neural

#pragma once

#include <string>
#include <vector>

#include "demfill/neural/network_spec.hpp"
#include "demfill/neural/tensor.hpp"
#include "demfill/neural/weights.hpp"
#include "demfill/raster.hpp"

namespace demfill::neural {

template <typename T>
struct Param {
  std::string name;
  std::vector<int> dims;
  std::vector<T> value;
  std::vector<T> grad;
};

/// Executable layer list of one network section. LFE layers are expanded into
/// their six conv + ELU stages. Forward caches every activation so that a
/// following backward call can produce input and parameter gradients.
template <typename T>
class Stack {
 public:
  Stack(const std::vector<LayerSpec>& layers, std::string section, const WeightStore& weights);

  /// `mask` is the input-resolution void mask; required only by attention
  /// layers, which use it downsampled to their feature resolution.
  Tensor<T> forward(const Tensor<T>& x, const VoidMask* mask = nullptr);

  /// Gradient of the last forward call. Accumulates into the parameter
  /// gradients and returns the input gradient. Attention is not
  /// differentiable here and throws DataError.
  Tensor<T> backward(const Tensor<T>& grad_out);

  std::vector<Param<T>>& params() noexcept { return params_; }
  const std::vector<Param<T>>& params() const noexcept { return params_; }
  void zero_grad();

  /// Writes the current parameter values into matching tensors of `store`.
  void export_to(WeightStore& store) const;

  bool differentiable() const noexcept;

 private:
  struct Op {
    LayerKind kind;
    ConvShape conv{};
    int factor = 1;
    int patch = 3;
    double lambda = 10.0;
    std::size_t param = 0;  // weight index; bias follows
  };

  void add_conv(const ConvShape& shape, const std::string& base, const WeightStore& weights);

  std::string section_;
  std::vector<Op> ops_;
  std::vector<Param<T>> params_;
  std::vector<Tensor<T>> acts_;
};

extern template class Stack<float>;
extern template class Stack<double>;

}  // namespace demfill::neural

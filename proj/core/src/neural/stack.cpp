#include "demfill/neural/stack.hpp"

#include <algorithm>

#include "demfill/error.hpp"
#include "demfill/neural/attention.hpp"
#include "demfill/neural/ops.hpp"

namespace demfill::neural {

template <typename T>
Stack<T>::Stack(const std::vector<LayerSpec>& layers, std::string section, const WeightStore& weights)
    : section_(std::move(section)) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    const std::string base = section_ + "." + std::to_string(i);
    switch (l.kind) {
      case LayerKind::conv:
        add_conv(l.conv, base, weights);
        break;
      case LayerKind::lfe:
        for (std::size_t s = 0; s < kLfeDilations.size(); ++s) {
          add_conv({l.channels, l.channels, 3, 1, kLfeDilations[s]}, base + ".lfe" + std::to_string(s), weights);
          ops_.push_back({LayerKind::elu});
        }
        break;
      case LayerKind::upsample_nearest:
        ops_.push_back({LayerKind::upsample_nearest, {}, l.factor});
        break;
      case LayerKind::attention:
        ops_.push_back({LayerKind::attention, {}, 1, l.patch, l.lambda});
        break;
      case LayerKind::elu:
      case LayerKind::tanh:
        ops_.push_back({l.kind});
        break;
    }
  }
}

template <typename T>
void Stack<T>::add_conv(const ConvShape& shape, const std::string& base, const WeightStore& weights) {
  const NamedTensor& w = weights.at(base + ".weight");
  const NamedTensor& b = weights.at(base + ".bias");
  const std::vector<int> wdims{shape.out_channels, shape.in_channels, shape.kernel, shape.kernel};
  if (w.dims != wdims || w.data.size() != shape.weight_count()) {
    throw DataError("weights: shape mismatch for '" + w.name + "'");
  }
  if (b.dims != std::vector<int>{shape.out_channels} || b.data.size() != static_cast<std::size_t>(shape.out_channels)) {
    throw DataError("weights: shape mismatch for '" + b.name + "'");
  }
  Op op{LayerKind::conv, shape};
  op.param = params_.size();
  ops_.push_back(op);
  for (const NamedTensor* t : {&w, &b}) {
    Param<T> p{t->name, t->dims, std::vector<T>(t->data.begin(), t->data.end()),
               std::vector<T>(t->data.size(), T{0})};
    params_.push_back(std::move(p));
  }
}

template <typename T>
Tensor<T> Stack<T>::forward(const Tensor<T>& x, const VoidMask* mask) {
  acts_.clear();
  acts_.reserve(ops_.size() + 1);
  acts_.push_back(x);
  for (const Op& op : ops_) {
    const Tensor<T>& in = acts_.back();
    Tensor<T> out;
    switch (op.kind) {
      case LayerKind::conv:
        out = conv2d<T>(in, params_[op.param].value, params_[op.param + 1].value, op.conv);
        break;
      case LayerKind::elu:
        out = elu(in);
        break;
      case LayerKind::tanh:
        out = neural::tanh(in);
        break;
      case LayerKind::upsample_nearest:
        out = upsample_nearest(in, op.factor);
        break;
      case LayerKind::attention: {
        if (mask == nullptr) throw DataError("attention layer needs the void mask");
        const VoidMask feature_mask = downsample_mask(*mask, in.height(), in.width());
        out = contextual_attention(in, in, feature_mask, op.lambda, op.patch).output;
        break;
      }
      case LayerKind::lfe:
        break;  // expanded at construction
    }
    acts_.push_back(std::move(out));
  }
  return acts_.back();
}

template <typename T>
Tensor<T> Stack<T>::backward(const Tensor<T>& grad_out) {
  if (acts_.size() != ops_.size() + 1) throw DataError("backward called before forward");
  if (!grad_out.same_shape(acts_.back())) throw DataError("backward: gradient shape mismatch");
  Tensor<T> g = grad_out;
  for (std::size_t i = ops_.size(); i-- > 0;) {
    const Op& op = ops_[i];
    switch (op.kind) {
      case LayerKind::conv: {
        ConvGrads<T> cg = conv2d_backward<T>(acts_[i], params_[op.param].value, g, op.conv);
        auto& gw = params_[op.param].grad;
        auto& gb = params_[op.param + 1].grad;
        for (std::size_t k = 0; k < gw.size(); ++k) gw[k] += cg.weight[k];
        for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += cg.bias[k];
        g = std::move(cg.input);
        break;
      }
      case LayerKind::elu:
        g = elu_backward(acts_[i + 1], g);
        break;
      case LayerKind::tanh:
        g = tanh_backward(acts_[i + 1], g);
        break;
      case LayerKind::upsample_nearest:
        g = upsample_nearest_backward(g, op.factor);
        break;
      case LayerKind::attention:
        throw DataError("backward: attention layers are not differentiable");
      case LayerKind::lfe:
        break;
    }
  }
  return g;
}

template <typename T>
void Stack<T>::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.begin(), p.grad.end(), T{0});
}

template <typename T>
void Stack<T>::export_to(WeightStore& store) const {
  for (const auto& p : params_) {
    NamedTensor& t = store.at(p.name);
    if (t.data.size() != p.value.size()) throw DataError("weights: shape mismatch for '" + p.name + "'");
    for (std::size_t k = 0; k < p.value.size(); ++k) t.data[k] = static_cast<float>(p.value[k]);
  }
}

template <typename T>
bool Stack<T>::differentiable() const noexcept {
  return std::none_of(ops_.begin(), ops_.end(), [](const Op& op) { return op.kind == LayerKind::attention; });
}

template class Stack<float>;
template class Stack<double>;

}  // namespace demfill::neural

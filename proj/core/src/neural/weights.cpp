#include "demfill/neural/weights.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <random>

#include "demfill/error.hpp"

namespace demfill::neural {

const NamedTensor* WeightStore::find(std::string_view name) const noexcept {
  for (const auto& t : tensors_)
    if (t.name == name) return &t;
  return nullptr;
}

NamedTensor* WeightStore::find(std::string_view name) noexcept {
  for (auto& t : tensors_)
    if (t.name == name) return &t;
  return nullptr;
}

const NamedTensor& WeightStore::at(std::string_view name) const {
  if (const auto* t = find(name)) return *t;
  throw DataError("weights: missing tensor '" + std::string(name) + "'");
}

NamedTensor& WeightStore::at(std::string_view name) {
  if (auto* t = find(name)) return *t;
  throw DataError("weights: missing tensor '" + std::string(name) + "'");
}

bool operator==(const WeightStore& a, const WeightStore& b) {
  if (a.tensors_.size() != b.tensors_.size()) return false;
  for (std::size_t i = 0; i < a.tensors_.size(); ++i) {
    const auto& x = a.tensors_[i];
    const auto& y = b.tensors_[i];
    if (x.name != y.name || x.dims != y.dims || x.data.size() != y.data.size()) return false;
    if (!x.data.empty() &&
        std::memcmp(x.data.data(), y.data.data(), x.data.size() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

WeightStore init_weights(std::span<const ParamSlot> slots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WeightStore store;
  for (const ParamSlot& slot : slots) {
    NamedTensor t{slot.name, slot.dims, std::vector<float>(slot.count(), 0.0f)};
    if (slot.dims.size() == 4) {
      const double receptive = static_cast<double>(slot.dims[2]) * slot.dims[3];
      const double fan_in = slot.dims[1] * receptive;
      const double fan_out = slot.dims[0] * receptive;
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (float& v : t.data) v = static_cast<float>(dist(rng));
    }
    store.add(std::move(t));
  }
  return store;
}

WeightStore zero_weights(std::span<const ParamSlot> slots) {
  WeightStore store;
  for (const ParamSlot& slot : slots) {
    store.add({slot.name, slot.dims, std::vector<float>(slot.count(), 0.0f)});
  }
  return store;
}

void check_weights(const WeightStore& weights, std::span<const ParamSlot> slots) {
  if (weights.size() != slots.size()) {
    throw DataError("weights: expected " + std::to_string(slots.size()) + " tensors, found " +
                    std::to_string(weights.size()));
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const NamedTensor& t = weights.tensors()[i];
    if (t.name != slots[i].name) {
      throw DataError("weights: tensor " + std::to_string(i) + " is '" + t.name + "', expected '" +
                      slots[i].name + "'");
    }
    if (t.dims != slots[i].dims || t.data.size() != slots[i].count()) {
      throw DataError("weights: shape mismatch for '" + t.name + "'");
    }
  }
}

namespace {

constexpr char kMagic[4] = {'D', 'E', 'M', 'W'};

template <typename U>
void put_le(std::string& buf, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf.push_back(static_cast<char>(static_cast<unsigned char>(v >> (8 * i))));
  }
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  template <typename U>
  U get(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }

  std::string get_string(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw DataError(std::string("weights: truncated stream while reading ") + what);
    }
  }

  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_weights(std::ostream& out, const WeightStore& weights) {
  std::string buf(kMagic, 4);
  put_le<std::uint32_t>(buf, kWeightFormatVersion);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(weights.size()));
  for (const NamedTensor& t : weights.tensors()) {
    if (t.name.size() > 0xFFFF) throw DataError("weights: tensor name too long");
    if (t.dims.size() > 0xFF) throw DataError("weights: tensor rank too large");
    put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(t.name.size()));
    buf += t.name;
    buf.push_back(static_cast<char>(t.dims.size()));
    for (int d : t.dims) put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(d));
    for (float v : t.data) put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(v));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("weights: write failed");
}

void save_weights_file(const std::filesystem::path& path, const WeightStore& weights) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  save_weights(out, weights);
}

WeightStore load_weights(std::istream& in) {
  Reader r{std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>())};
  if (r.get_string(4, "magic") != std::string(kMagic, 4)) throw DataError("weights: bad magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kWeightFormatVersion) {
    throw DataError("weights: unsupported format version " + std::to_string(version));
  }
  const auto count = r.get<std::uint32_t>("tensor count");
  std::vector<NamedTensor> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    const auto len = r.get<std::uint16_t>("name length");
    t.name = r.get_string(len, "name");
    const auto rank = r.get<std::uint8_t>("rank");
    std::size_t total = 1;
    for (int d = 0; d < rank; ++d) {
      const auto dim = r.get<std::uint32_t>("dims");
      if (dim == 0 || dim > (1u << 24)) throw DataError("weights: implausible dimension in '" + t.name + "'");
      t.dims.push_back(static_cast<int>(dim));
      total *= dim;
    }
    if (total > (std::size_t{1} << 28)) throw DataError("weights: tensor '" + t.name + "' too large");
    t.data.resize(total);
    for (float& v : t.data) v = std::bit_cast<float>(r.get<std::uint32_t>("tensor data"));
    tensors.push_back(std::move(t));
  }
  return WeightStore(std::move(tensors));
}

WeightStore load_weights(std::istream& in, std::span<const ParamSlot> slots) {
  WeightStore w = load_weights(in);
  check_weights(w, slots);
  return w;
}

WeightStore load_weights_file(const std::filesystem::path& path, std::span<const ParamSlot> slots) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return load_weights(in, slots);
}

}  // namespace demfill::neural

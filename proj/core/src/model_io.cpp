#include "decode/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include "decode/errors.hpp"
#include "decode/io.hpp"

namespace decode {
namespace {

constexpr char kMagic[8] = {'D', 'C', 'D', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "model files are little-endian");

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  template <typename T>
  T get() {
    if (bytes_.size() < sizeof(T)) throw DataError("model file truncated");
    T value;
    std::memcpy(&value, bytes_.data(), sizeof(T));
    bytes_.remove_prefix(sizeof(T));
    return value;
  }
  std::string_view take(std::size_t n) {
    if (bytes_.size() < n) throw DataError("model file truncated");
    auto s = bytes_.substr(0, n);
    bytes_.remove_prefix(n);
    return s;
  }
  bool done() const { return bytes_.empty(); }

 private:
  std::string_view bytes_;
};

}  // namespace

std::string serialize_model(const Model& model) {
  std::string out(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(model.variant()));
  put(out, static_cast<std::uint64_t>(model.input_dim()));
  put(out, static_cast<std::uint64_t>(model.hidden_dim()));
  put(out, static_cast<std::uint64_t>(model.num_layers()));
  put(out, static_cast<std::uint64_t>(model.num_classes()));
  put(out, static_cast<std::uint64_t>(model.parameters().size()));
  for (const auto& p : model.parameters()) {
    put(out, static_cast<std::uint64_t>(p.rows()));
    put(out, static_cast<std::uint64_t>(p.cols()));
    out.append(reinterpret_cast<const char*>(p.data()), static_cast<std::size_t>(p.size()) * sizeof(double));
  }
  return out;
}

Model deserialize_model(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic)) throw DataError("not a model file (bad magic)");
  if (auto v = in.get<std::uint32_t>(); v != kVersion) throw DataError("unsupported model version " + std::to_string(v));
  const auto variant = in.get<std::uint32_t>();
  if (variant > static_cast<std::uint32_t>(Variant::sage)) throw DataError("unknown model variant in file");
  const auto input_dim = in.get<std::uint64_t>();
  const auto hidden = in.get<std::uint64_t>();
  const auto layers = in.get<std::uint64_t>();
  const auto classes = in.get<std::uint64_t>();
  Model model(static_cast<Variant>(variant), input_dim, hidden, layers, classes, 0);
  auto& params = model.parameters();
  if (in.get<std::uint64_t>() != params.size()) throw DataError("model tensor count mismatch");
  for (auto& p : params) {
    const auto rows = in.get<std::uint64_t>(), cols = in.get<std::uint64_t>();
    if (rows != static_cast<std::uint64_t>(p.rows()) || cols != static_cast<std::uint64_t>(p.cols())) {
      throw DataError("model tensor shape mismatch");
    }
    auto raw = in.take(static_cast<std::size_t>(rows * cols) * sizeof(double));
    std::memcpy(p.data(), raw.data(), raw.size());
  }
  if (!in.done()) throw DataError("trailing bytes in model file");
  return model;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  write_file_atomic(path, serialize_model(model));
}

Model load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

}  // namespace decode

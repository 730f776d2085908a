#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "decode/mpnn.hpp"

namespace decode {

/// Versioned little-endian binary: magic "DCDMODEL", u32 version, u32 variant,
/// u64 input_dim, hidden_dim, num_layers, num_classes, u64 tensor count, then
/// per tensor u64 rows, u64 cols and rows*cols f64 in row-major order.
std::string serialize_model(const Model& model);
Model deserialize_model(std::string_view bytes);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace decode

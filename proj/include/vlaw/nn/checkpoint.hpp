#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vlaw/nn/mlp.hpp"

namespace vlaw::nn {

// Flat named-tensor binary: magic "VLAW", version u32, tensor count u32, then
// per tensor: name length u32, name bytes, rank u32, dims u32 each, row-major
// f64 little-endian values.
struct NamedTensor {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::vector<double> values;
};

void save_tensors(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_tensors(const std::string& path);

// Mlp <-> tensors under `prefix.layerN.{w,b}` plus a `prefix.arch` descriptor
// (layer count, then in/out/activation per layer).
void append_mlp_tensors(std::vector<NamedTensor>& out, const std::string& prefix, const MlpParams& p);
MlpParams mlp_from_tensors(const std::vector<NamedTensor>& tensors, const std::string& prefix);

const NamedTensor* find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name);

}  // namespace vlaw::nn

#include "vlaw/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vlaw::nn {

namespace {
constexpr char kMagic[4] = {'V', 'L', 'A', 'W'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ofstream& out, double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw std::runtime_error("checkpoint: truncated file");
    }
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | b[i];
    }
    return v;
}

double get_f64(std::ifstream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) {
        throw std::runtime_error("checkpoint: truncated file");
    }
    std::uint64_t u = 0;
    for (int i = 7; i >= 0; --i) {
        u = (u << 8) | b[i];
    }
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}
}  // namespace

void save_tensors(const std::string& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("checkpoint: cannot open for write: " + path);
    }
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
        std::size_t expect = 1;
        for (std::uint32_t d : t.dims) {
            put_u32(out, d);
            expect *= d;
        }
        if (expect != t.values.size()) {
            throw std::invalid_argument("checkpoint: dims do not match value count for " + t.name);
        }
        for (double v : t.values) {
            put_f64(out, v);
        }
    }
    if (!out) {
        throw std::runtime_error("checkpoint: write failed: " + path);
    }
}

std::vector<NamedTensor> load_tensors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("checkpoint: cannot open: " + path);
    }
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("checkpoint: bad magic in " + path);
    }
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw std::runtime_error("checkpoint: unsupported version");
    }
    const std::uint32_t count = get_u32(in);
    std::vector<NamedTensor> tensors;
    tensors.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
        NamedTensor t;
        const std::uint32_t name_len = get_u32(in);
        t.name.resize(name_len);
        if (!in.read(t.name.data(), name_len)) {
            throw std::runtime_error("checkpoint: truncated name");
        }
        const std::uint32_t rank = get_u32(in);
        std::size_t n = 1;
        t.dims.resize(rank);
        for (std::uint32_t i = 0; i < rank; ++i) {
            t.dims[i] = get_u32(in);
            n *= t.dims[i];
        }
        t.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            t.values[i] = get_f64(in);
        }
        tensors.push_back(std::move(t));
    }
    return tensors;
}

void append_mlp_tensors(std::vector<NamedTensor>& out, const std::string& prefix, const MlpParams& p) {
    NamedTensor arch;
    arch.name = prefix + ".arch";
    arch.values.push_back(static_cast<double>(p.layers.size()));
    for (const auto& l : p.layers) {
        arch.values.push_back(static_cast<double>(l.in));
        arch.values.push_back(static_cast<double>(l.out));
        arch.values.push_back(static_cast<double>(static_cast<int>(l.act)));
    }
    arch.dims = {static_cast<std::uint32_t>(arch.values.size())};
    out.push_back(std::move(arch));
    for (std::size_t li = 0; li < p.layers.size(); ++li) {
        const auto& l = p.layers[li];
        NamedTensor w;
        w.name = prefix + ".layer" + std::to_string(li) + ".w";
        w.dims = {static_cast<std::uint32_t>(l.out), static_cast<std::uint32_t>(l.in)};
        w.values = l.w;
        out.push_back(std::move(w));
        NamedTensor b;
        b.name = prefix + ".layer" + std::to_string(li) + ".b";
        b.dims = {static_cast<std::uint32_t>(l.out)};
        b.values = l.b;
        out.push_back(std::move(b));
    }
}

const NamedTensor* find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
    for (const auto& t : tensors) {
        if (t.name == name) {
            return &t;
        }
    }
    return nullptr;
}

MlpParams mlp_from_tensors(const std::vector<NamedTensor>& tensors, const std::string& prefix) {
    const NamedTensor* arch = find_tensor(tensors, prefix + ".arch");
    if (arch == nullptr || arch->values.empty()) {
        throw std::runtime_error("checkpoint: missing arch tensor for " + prefix);
    }
    const auto layer_count = static_cast<std::size_t>(arch->values[0]);
    if (arch->values.size() != 1 + 3 * layer_count) {
        throw std::runtime_error("checkpoint: malformed arch tensor for " + prefix);
    }
    MlpParams p;
    for (std::size_t li = 0; li < layer_count; ++li) {
        Layer l;
        l.in = static_cast<int>(arch->values[1 + 3 * li]);
        l.out = static_cast<int>(arch->values[2 + 3 * li]);
        l.act = static_cast<Activation>(static_cast<int>(arch->values[3 + 3 * li]));
        const NamedTensor* w = find_tensor(tensors, prefix + ".layer" + std::to_string(li) + ".w");
        const NamedTensor* b = find_tensor(tensors, prefix + ".layer" + std::to_string(li) + ".b");
        if (w == nullptr || b == nullptr) {
            throw std::runtime_error("checkpoint: missing layer tensors for " + prefix);
        }
        if (w->values.size() != static_cast<std::size_t>(l.in) * l.out ||
            b->values.size() != static_cast<std::size_t>(l.out)) {
            throw std::runtime_error("checkpoint: layer tensor shape mismatch for " + prefix);
        }
        l.w = w->values;
        l.b = b->values;
        p.layers.push_back(std::move(l));
    }
    return p;
}

}  // namespace vlaw::nn

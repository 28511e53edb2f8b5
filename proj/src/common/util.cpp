#include "vlaw/common/util.hpp"

#include <atomic>
#include <mutex>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vlaw {

namespace {
constexpr char kB64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}
}  // namespace

std::string base64_encode(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        const unsigned b0 = bytes[i];
        const unsigned b1 = i + 1 < len ? bytes[i + 1] : 0;
        const unsigned b2 = i + 2 < len ? bytes[i + 2] : 0;
        out.push_back(kB64Chars[b0 >> 2]);
        out.push_back(kB64Chars[((b0 & 0x3u) << 4) | (b1 >> 4)]);
        out.push_back(i + 1 < len ? kB64Chars[((b1 & 0xfu) << 2) | (b2 >> 6)] : '=');
        out.push_back(i + 2 < len ? kB64Chars[b2 & 0x3fu] : '=');
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    int acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') {
            continue;
        }
        const int v = b64_value(c);
        if (v < 0) {
            throw std::runtime_error("base64: invalid character");
        }
        acc = (acc << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
        }
    }
    return out;
}

std::string doubles_to_base64(const std::vector<double>& v) {
    static_assert(sizeof(double) == 8);
    std::vector<unsigned char> bytes(v.size() * 8);
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint64_t u;
        std::memcpy(&u, &v[i], 8);
        for (int b = 0; b < 8; ++b) {
            bytes[i * 8 + b] = static_cast<unsigned char>((u >> (8 * b)) & 0xff);
        }
    }
    return base64_encode(bytes.data(), bytes.size());
}

std::vector<double> base64_to_doubles(const std::string& text) {
    const auto bytes = base64_decode(text);
    if (bytes.size() % 8 != 0) {
        throw std::runtime_error("base64: payload is not a whole number of f64 values");
    }
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t u = 0;
        for (int b = 7; b >= 0; --b) {
            u = (u << 8) | bytes[i * 8 + b];
        }
        std::memcpy(&out[i], &u, 8);
    }
    return out;
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
    const std::string text = read_file(path);
    return fnv1a(text.data(), text.size());
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
    pool.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace vlaw

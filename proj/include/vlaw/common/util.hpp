#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vlaw {

// base64 of raw bytes (RFC 4648, with padding).
std::string base64_encode(const void* data, std::size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

// f64 little-endian <-> base64, the on-disk encoding for observation and
// action payloads.
std::string doubles_to_base64(const std::vector<double>& v);
std::vector<double> base64_to_doubles(const std::string& text);

// FNV-1a over bytes; used for artifact comparisons in tests and reports.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ULL);
std::uint64_t fnv1a_file(const std::string& path);

// Runs fn(0..n-1), splitting indices across `jobs` threads. Each index must
// write only to its own output slot; reductions happen after the call in
// index order, so the result is independent of jobs.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

std::string read_file(const std::string& path);

}  // namespace vlaw

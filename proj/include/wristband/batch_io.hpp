#pragma once

// WBPC batch files:
//   offset 0   "WBPC"
//   offset 4   u32 LE version (= 1)
//   offset 8   u64 LE n
//   offset 16  u64 LE d
//   offset 24  n*d IEEE-754 binary64 LE, row-major

#include <bit>
#include <cmath>
#include <iterator>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "point_batch.hpp"

namespace wristband {

inline constexpr char kBatchMagic[4] = {'W', 'B', 'P', 'C'};
inline constexpr std::uint32_t kBatchVersion = 1;
inline constexpr std::size_t kBatchHeaderBytes = 24;

namespace batch_io_detail {

template <typename T>
void put_le(std::vector<unsigned char>& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const unsigned char* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

}  // namespace batch_io_detail

inline std::vector<unsigned char> encode_batch(const PointBatch& batch) {
    using namespace batch_io_detail;
    require(batch.all_finite(), "write_batch: batch has non-finite entries");
    std::vector<unsigned char> out;
    out.reserve(kBatchHeaderBytes + 8 * batch.size());
    out.insert(out.end(), kBatchMagic, kBatchMagic + 4);
    put_le<std::uint32_t>(out, kBatchVersion);
    put_le<std::uint64_t>(out, batch.n());
    put_le<std::uint64_t>(out, batch.dim());
    for (double v : batch.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

inline PointBatch decode_batch(const std::vector<unsigned char>& bytes) {
    using namespace batch_io_detail;
    if (bytes.size() < kBatchHeaderBytes)
        throw FormatError("batch file: header truncated at offset " + std::to_string(bytes.size()) + ", expected " +
                          std::to_string(kBatchHeaderBytes) + " bytes");
    if (std::memcmp(bytes.data(), kBatchMagic, 4) != 0) throw FormatError("batch file: bad magic at offset 0");
    const auto version = get_le<std::uint32_t>(bytes.data() + 4);
    if (version != kBatchVersion)
        throw FormatError("batch file: unsupported version " + std::to_string(version) + " at offset 4");
    const auto n = get_le<std::uint64_t>(bytes.data() + 8);
    const auto d = get_le<std::uint64_t>(bytes.data() + 16);
    if (d != 0 && n > (UINT64_MAX / 8) / d) throw FormatError("batch file: n*d overflows at offset 8");
    const std::uint64_t expected = kBatchHeaderBytes + 8 * n * d;
    if (bytes.size() != expected)
        throw FormatError("batch file: expected " + std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()) + " (payload starts at offset 24)");
    std::vector<double> data(n * d);
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes.data() + kBatchHeaderBytes + 8 * i));
        if (!std::isfinite(data[i]))
            throw FormatError("batch file: non-finite value at offset " + std::to_string(kBatchHeaderBytes + 8 * i));
    }
    return PointBatch(n, d, std::move(data));
}

inline void write_batch(const std::string& path, const PointBatch& batch) {
    const std::vector<unsigned char> bytes = encode_batch(batch);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw FormatError("write failed for '" + path + "'");
}

inline PointBatch read_batch(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_batch(bytes);
}

}  // namespace wristband

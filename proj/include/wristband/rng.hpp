#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace wristband {

/// Labeled pseudo-random stream.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// The engine seed is splitmix64(seed ^ fnv1a64(label)), so (seed, label) pins the
/// sequence. Uniforms take the top 53 bits; normals use the Marsaglia polar method.
/// The std:: distributions are avoided because their algorithms are
/// implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string label)
        : seed_(seed), label_(std::move(label)), engine_(mix(seed, label_)) {}

    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& label() const noexcept { return label_; }

    /// Child stream with label "<label>/<suffix>".
    RngStream child(std::string_view suffix) const {
        return RngStream(seed_, label_ + "/" + std::string(suffix));
    }
    RngStream child(std::uint64_t index) const { return child(std::to_string(index)); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() {
        double u;
        do u = uniform();
        while (u == 0.0);
        return u;
    }

    /// Uniform integer in [0, bound) by rejection (no modulo bias).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do r = engine_();
        while (r >= limit);
        return r % bound;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Fisher-Yates with this stream.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    static std::uint64_t fnv1a64(std::string_view s) noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    static std::uint64_t splitmix64(std::uint64_t x) noexcept {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    static std::uint64_t mix(std::uint64_t seed, std::string_view label) noexcept {
        return splitmix64(seed ^ fnv1a64(label));
    }

    std::uint64_t seed_;
    std::string label_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace wristband

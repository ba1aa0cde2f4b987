#pragma once

// Counter-based random streams. Trajectory j of disorder realization i must
// be reproducible no matter which worker runs it, so every consumer derives
// its own stream from (master seed, role, indices) and the generator state is
// pure function of that key plus a draw counter.
//
// Generator: Philox4x64-10 (the numpy.random.Philox variant). Key derivation:
// splitmix64 absorption of master seed, FNV-1a of the role string, then each
// index in order; the two key words are two successive splitmix64 outputs.
// Gaussian draws use Box-Muller over 53-bit uniforms; both halves of the pair
// are consumed. This fixed pipeline is the cross-platform reproducibility
// contract.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

namespace sffmon {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

} // namespace detail

/// Identifies one independent stream; equal keys reproduce equal output.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::string role;
    std::array<std::uint64_t, 4> indices{};
    std::size_t n_indices = 0;

    std::array<std::uint64_t, 2> philox_key() const {
        std::uint64_t s = master_seed ^ detail::fnv1a64(role);
        (void)detail::splitmix64(s);
        for (std::size_t i = 0; i < n_indices; ++i) {
            s ^= indices[i];
            (void)detail::splitmix64(s);
        }
        std::uint64_t t = s;
        const std::uint64_t k0 = detail::splitmix64(t);
        const std::uint64_t k1 = detail::splitmix64(t);
        return {k0, k1};
    }

    std::string describe() const {
        std::string out = role + "[seed=" + std::to_string(master_seed);
        for (std::size_t i = 0; i < n_indices; ++i) out += "," + std::to_string(indices[i]);
        return out + "]";
    }
};

/// Philox4x64-10 keyed counter generator with Gaussian output.
class NoiseStream {
public:
    NoiseStream() : NoiseStream(StreamKey{}) {}

    explicit NoiseStream(const StreamKey& key)
        : key_words_(key.philox_key()), id_(key.describe()) {}

    NoiseStream(std::uint64_t raw_key0, std::uint64_t raw_key1)
        : key_words_{raw_key0, raw_key1}, id_("raw") {}

    std::uint64_t next_u64() {
        if (buffer_pos_ == 4) {
            block(counter_, key_words_, buffer_);
            increment_counter();
            buffer_pos_ = 0;
        }
        return buffer_[buffer_pos_++];
    }

    /// Uniform on [0, 1): top 53 bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pair cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so log(u1) is finite.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    const std::string& id() const { return id_; }

    /// One keyed block; exposed for the known-answer tests.
    static void block(const std::array<std::uint64_t, 4>& counter,
                      const std::array<std::uint64_t, 2>& key,
                      std::array<std::uint64_t, 4>& out) {
        constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
        constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
        constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;
        std::array<std::uint64_t, 4> c = counter;
        std::array<std::uint64_t, 2> k = key;
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, lo0, hi1, lo1;
            detail::mulhilo64(M0, c[0], hi0, lo0);
            detail::mulhilo64(M1, c[2], hi1, lo1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
            k[0] += W0;
            k[1] += W1;
        }
        out = c;
    }

private:
    void increment_counter() {
        for (auto& word : counter_)
            if (++word != 0) break;
    }

    std::array<std::uint64_t, 2> key_words_{};
    std::array<std::uint64_t, 4> counter_{};
    std::array<std::uint64_t, 4> buffer_{};
    int buffer_pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
    std::string id_;
};

/// Stream factory. Roles in use: "syk", "gue", "traj", "bridge", plus
/// test-local tags; indices are (disorder, trajectory) and similar.
template <typename... Ix>
NoiseStream derive_stream(std::uint64_t master_seed, std::string_view role, Ix... indices) {
    static_assert(sizeof...(Ix) <= 4, "at most four stream indices");
    StreamKey key;
    key.master_seed = master_seed;
    key.role = std::string(role);
    key.n_indices = sizeof...(Ix);
    std::size_t pos = 0;
    ((key.indices[pos++] = static_cast<std::uint64_t>(indices)), ...);
    return NoiseStream(key);
}

} // namespace sffmon

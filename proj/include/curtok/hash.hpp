#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curtok {

// FNV-1a, the workhorse for content keys and seed derivation. Not
// cryptographic; collisions are confirmed by byte equality where it matters.
constexpr uint64_t fnv1a64(std::string_view bytes, uint64_t basis = 0xcbf29ce484222325ULL) {
    uint64_t h = basis;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// splitmix64 finalizer; full avalanche over 64 bits.
constexpr uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Hash128 {
    uint64_t lo = 0;
    uint64_t hi = 0;
    friend bool operator==(const Hash128&, const Hash128&) = default;
    friend auto operator<=>(const Hash128&, const Hash128&) = default;
};

inline Hash128 hash128(std::string_view bytes) {
    uint64_t a = fnv1a64(bytes);
    uint64_t b = fnv1a64(bytes, 0x84222325cbf29ce4ULL);
    return {mix64(a), mix64(b ^ a)};
}

struct Hash128Hasher {
    size_t operator()(const Hash128& h) const { return static_cast<size_t>(h.lo ^ mix64(h.hi)); }
};

// Deterministic seed derivation: one root seed fans out per (tag, index).
inline uint64_t derive_seed(uint64_t root, std::string_view tag, uint64_t index = 0) {
    return mix64(root ^ fnv1a64(tag) ^ mix64(index + 0x51ed2701));
}

// Minimal deterministic PRNG (splitmix64 stream). std::shuffle with a
// standard engine is stdlib-dependent; this keeps samples reproducible
// everywhere.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) by rejection.
    uint64_t next_below(uint64_t bound) {
        if (bound <= 1) return 0;
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    double next_double() {  // [0,1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

}  // namespace curtok

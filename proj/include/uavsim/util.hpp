#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavsim {

// splitmix64, used to derive independent sub-seeds from one master seed.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic seed derivation: one stream id per purpose, one index per
// episode/scenario.  Same (seed, stream, index) always yields the same engine.
inline uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t index = 0) {
    uint64_t s = splitmix64(master ^ (0xa076'1d64'78bd'642fULL * (stream + 1)));
    return splitmix64(s ^ (0xe703'7ed1'a0b4'28dbULL * (index + 1)));
}

inline std::mt19937_64 make_rng(uint64_t master, uint64_t stream, uint64_t index = 0) {
    return std::mt19937_64(derive_seed(master, stream, index));
}

// Canonical float formatting shared by every text format we emit: the
// shortest decimal that round-trips, so configs and logs stay byte-stable.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Fixed-size bit grid used for completion maps.
class BitGrid {
  public:
    BitGrid() = default;
    explicit BitGrid(int cells) : cells_(cells), words_((cells + 63) / 64, 0) {}

    int size() const { return cells_; }
    bool get(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i) { words_[static_cast<size_t>(i >> 6)] |= (1ULL << (i & 63)); }

    void or_with(const BitGrid& other) {
        for (size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
    }

    bool all_set() const {
        int remaining = cells_;
        for (uint64_t w : words_) {
            int bits = remaining >= 64 ? 64 : remaining;
            uint64_t mask = bits == 64 ? ~0ULL : ((1ULL << bits) - 1);
            if ((w & mask) != mask) return false;
            remaining -= bits;
        }
        return true;
    }

    int count() const {
        int c = 0;
        for (uint64_t w : words_) c += __builtin_popcountll(w);
        return c;
    }

    bool operator==(const BitGrid& o) const { return cells_ == o.cells_ && words_ == o.words_; }

  private:
    int cells_ = 0;
    std::vector<uint64_t> words_;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace uavsim

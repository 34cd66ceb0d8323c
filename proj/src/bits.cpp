#include "basisn/bits.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace basisn {

namespace {

void check_coeff_bits(int coeff_bits) {
    if (coeff_bits < kMinCoeffBits || coeff_bits > kMaxCoeffBits) {
        throw ConfigError("coeff_bits must be in [1, 16], got " +
                          std::to_string(coeff_bits));
    }
}

}  // namespace

int max_code(int coeff_bits) {
    check_coeff_bits(coeff_bits);
    if (coeff_bits == 1) return 1;
    return (1 << (coeff_bits - 1)) - 1;
}

int min_code(int coeff_bits) {
    check_coeff_bits(coeff_bits);
    if (coeff_bits == 1) return 0;
    return -(1 << (coeff_bits - 1));
}

bool code_in_range(long long v, int coeff_bits) {
    return v >= min_code(coeff_bits) && v <= max_code(coeff_bits);
}

double coeff_step(double scale, int coeff_bits) {
    check_coeff_bits(coeff_bits);
    if (coeff_bits == 1) return scale;
    return scale / static_cast<double>(max_code(coeff_bits));
}

uint32_t code_bit(int32_t code, int plane, int coeff_bits) {
    check_coeff_bits(coeff_bits);
    if (plane < 0 || plane >= coeff_bits) {
        throw ConfigError("bit plane " + std::to_string(plane) +
                          " out of range for " + std::to_string(coeff_bits) +
                          "-bit codes");
    }
    const uint32_t word =
        static_cast<uint32_t>(code) & ((1u << coeff_bits) - 1u);
    return (word >> plane) & 1u;
}

double plane_weight(int plane, int coeff_bits) {
    check_coeff_bits(coeff_bits);
    if (plane < 0 || plane >= coeff_bits) {
        throw ConfigError("bit plane " + std::to_string(plane) +
                          " out of range for " + std::to_string(coeff_bits) +
                          "-bit codes");
    }
    if (coeff_bits == 1) return 1.0;  // unsigned single-plane case
    const double w = std::ldexp(1.0, plane);
    return plane == coeff_bits - 1 ? -w : w;
}

int popcount_code(int32_t code, int coeff_bits) {
    check_coeff_bits(coeff_bits);
    const uint32_t word =
        static_cast<uint32_t>(code) & ((1u << coeff_bits) - 1u);
    return std::popcount(word);
}

BitMask::BitMask(int size)
    : size_(size), words_((size + 63) / 64, 0ull) {
    if (size < 0) throw DimensionError("mask size must be non-negative");
}

bool BitMask::test(int i) const {
    if (i < 0 || i >= size_) {
        throw DimensionError("mask index " + std::to_string(i) +
                             " out of range for size " + std::to_string(size_));
    }
    return (words_[i / 64] >> (i % 64)) & 1ull;
}

void BitMask::set(int i, bool value) {
    if (i < 0 || i >= size_) {
        throw DimensionError("mask index " + std::to_string(i) +
                             " out of range for size " + std::to_string(size_));
    }
    const uint64_t bit = 1ull << (i % 64);
    if (value) {
        words_[i / 64] |= bit;
    } else {
        words_[i / 64] &= ~bit;
    }
}

int BitMask::count() const {
    int total = 0;
    for (uint64_t w : words_) total += std::popcount(w);
    return total;
}

bool BitMask::any() const {
    for (uint64_t w : words_) {
        if (w) return true;
    }
    return false;
}

bool BitMask::intersects(const BitMask& other) const {
    if (other.size_ != size_) {
        throw DimensionError("mask size mismatch: " + std::to_string(size_) +
                             " vs " + std::to_string(other.size_));
    }
    for (size_t i = 0; i < words_.size(); ++i) {
        if (words_[i] & other.words_[i]) return true;
    }
    return false;
}

BitMask& BitMask::operator|=(const BitMask& other) {
    if (other.size_ != size_) {
        throw DimensionError("mask size mismatch: " + std::to_string(size_) +
                             " vs " + std::to_string(other.size_));
    }
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
}

std::string BitMask::to_hex() const {
    const int nibbles = std::max(1, (size_ + 3) / 4);
    std::string out = "0x";
    out.reserve(2 + nibbles);
    for (int i = nibbles - 1; i >= 0; --i) {
        const int bit = i * 4;
        uint32_t v = 0;
        for (int b = 0; b < 4; ++b) {
            if (bit + b < size_ && test(bit + b)) v |= 1u << b;
        }
        out += "0123456789abcdef"[v];
    }
    return out;
}

BitMask BitMask::from_hex(std::string_view hex, int size) {
    if (hex.substr(0, 2) == "0x" || hex.substr(0, 2) == "0X") {
        hex.remove_prefix(2);
    }
    BitMask mask(size);
    for (size_t i = 0; i < hex.size(); ++i) {
        const char c = hex[hex.size() - 1 - i];
        uint32_t v = 0;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            v = 10 + (c - 'a');
        } else if (c >= 'A' && c <= 'F') {
            v = 10 + (c - 'A');
        } else {
            throw ParseError(std::string("invalid hex digit '") + c +
                             "' in mask");
        }
        for (int b = 0; b < 4; ++b) {
            const int bit = static_cast<int>(i) * 4 + b;
            if (v & (1u << b)) {
                if (bit >= size) {
                    throw ParseError("mask hex wider than declared size " +
                                     std::to_string(size));
                }
                mask.set(bit);
            }
        }
    }
    return mask;
}

BitMask plane_mask(std::span<const int16_t> codes, int plane, int coeff_bits) {
    BitMask mask(static_cast<int>(codes.size()));
    for (size_t l = 0; l < codes.size(); ++l) {
        if (code_bit(codes[l], plane, coeff_bits)) {
            mask.set(static_cast<int>(l));
        }
    }
    return mask;
}

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

uint64_t hash_combine(uint64_t seed, uint64_t value) {
    uint64_t state = seed ^ (value + 0x9e3779b97f4a7c15ull);
    return splitmix64(state);
}

}  // namespace basisn

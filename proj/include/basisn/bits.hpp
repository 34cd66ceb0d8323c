#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "basisn/types.hpp"

namespace basisn {

// Signed code range for N-bit coefficients. N == 1 is the unsigned single-TG
// case with codes in {0, 1}; N > 1 uses two's complement.
int max_code(int coeff_bits);
int min_code(int coeff_bits);
bool code_in_range(long long v, int coeff_bits);

// LSB granularity of an N-bit coefficient with per-layer range `scale`.
double coeff_step(double scale, int coeff_bits);

// Bit `plane` of the code's N-bit two's-complement word. This is exactly the
// TG control bit driven during the plane's cycle.
uint32_t code_bit(int32_t code, int plane, int coeff_bits);

// Accumulation weight of one bit plane: 2^n for the low planes and
// -2^(N-1) for the sign plane. N == 1 has a single +1 plane.
double plane_weight(int plane, int coeff_bits);

// Number of set bits in the code's N-bit two's-complement word.
int popcount_code(int32_t code, int coeff_bits);

// Fixed-width bit mask over crossbar columns. Column 0 is bit 0.
class BitMask {
public:
    BitMask() = default;
    explicit BitMask(int size);

    int size() const { return size_; }
    bool test(int i) const;
    void set(int i, bool value = true);
    int count() const;
    bool any() const;
    bool intersects(const BitMask& other) const;
    BitMask& operator|=(const BitMask& other);
    bool operator==(const BitMask& other) const = default;

    // Hex string of the mask value, most significant nibble first, e.g. "0x0005"
    // for columns {0, 2} of an 16-wide mask.
    std::string to_hex() const;
    static BitMask from_hex(std::string_view hex, int size);

private:
    int size_ = 0;
    std::vector<uint64_t> words_;
};

// Mask of columns whose TG closes on `plane` for the given tile codes.
BitMask plane_mask(std::span<const int16_t> codes, int plane, int coeff_bits);

// splitmix64; used wherever independent deterministic streams are needed.
uint64_t splitmix64(uint64_t& state);
uint64_t hash_combine(uint64_t seed, uint64_t value);

}  // namespace basisn

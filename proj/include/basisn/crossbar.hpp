#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "basisn/basis.hpp"
#include "basisn/bits.hpp"
#include "basisn/linalg.hpp"
#include "basisn/schedule.hpp"
#include "basisn/types.hpp"

namespace basisn {

// TG state of one crossbar in one cycle: per-group column mask plus the
// kernel that owns the group's accumulated current.
struct TgConfiguration {
    struct Group {
        int kernel = 0;
        BitMask mask;
    };
    std::vector<Group> groups;

    // Masks must be pairwise disjoint and fit the group capacity.
    void validate(int dim, int capacity) const;
};

// Summed currents of the selected columns: sum_l mask_l * (x . b_l), with
// b_l taken from the cell-quantized image the crossbar stores.
double mac_bit_plane(const Eigen::VectorXd& x, const BasisMatrix& basis,
                     const BitMask& mask);

// Time-multiplexed N-plane MAC of one tile: plane n contributes with weight
// 2^n (the sign plane with -2^(N-1)), the digital accumulator applies the
// shifts, and the step maps codes back to coefficient units. Equals the
// dense product of the reconstructed tile (cell image) with x up to float
// rounding.
double mac_bit_serial(const Eigen::VectorXd& x, std::span<const int16_t> codes,
                      double scale, const BasisMatrix& basis, int coeff_bits);

// Executes the schedule slice of one tile column (all planes of one input
// partition) and returns per-kernel partial sums. Re-validates the contest
// constraint per slot and the mask/code consistency per entry.
Eigen::VectorXd simulate_tile_column(const Eigen::VectorXd& x,
                                     const CoefficientSet& coeffs,
                                     int partition,
                                     std::span<const ScheduleGroup> slice,
                                     const BasisMatrix& basis,
                                     const CrossbarConfig& config);

// Full layer: slices the flattened input into partitions, runs each tile
// column, and accumulates the partial sums per kernel.
Eigen::VectorXd simulate_layer(const Eigen::VectorXd& input,
                               const CoefficientSet& coeffs,
                               const Schedule& schedule, int layer,
                               const BasisMatrix& basis,
                               const CrossbarConfig& config);

}  // namespace basisn

#include "basisn/crossbar.hpp"

#include <set>
#include <string>

namespace basisn {

void TgConfiguration::validate(int dim, int capacity) const {
    if (static_cast<int>(groups.size()) > capacity) {
        throw ContestViolationError(
            "configuration uses " + std::to_string(groups.size()) +
            " TG groups but only " + std::to_string(capacity) + " exist");
    }
    BitMask used(dim);
    for (const auto& group : groups) {
        if (group.mask.size() != dim) {
            throw DimensionError("TG mask length " +
                                 std::to_string(group.mask.size()) +
                                 " does not match crossbar dimension " +
                                 std::to_string(dim));
        }
        if (used.intersects(group.mask)) {
            throw ContestViolationError(
                "two kernels activate the same basis column in one cycle");
        }
        used |= group.mask;
    }
}

double mac_bit_plane(const Eigen::VectorXd& x, const BasisMatrix& basis,
                     const BitMask& mask) {
    if (x.size() != basis.dim() || mask.size() != basis.dim()) {
        throw DimensionError("input/mask length does not match crossbar "
                             "dimension " +
                             std::to_string(basis.dim()));
    }
    // Fixed ascending column order keeps the reduction deterministic.
    double acc = 0.0;
    for (int l = 0; l < basis.dim(); ++l) {
        if (mask.test(l)) {
            acc += x.dot(basis.cell_rows().row(l).transpose());
        }
    }
    return acc;
}

double mac_bit_serial(const Eigen::VectorXd& x, std::span<const int16_t> codes,
                      double scale, const BasisMatrix& basis, int coeff_bits) {
    if (static_cast<int>(codes.size()) != basis.dim()) {
        throw DimensionError("code count does not match crossbar dimension");
    }
    for (int16_t v : codes) {
        if (!code_in_range(v, coeff_bits)) {
            throw DataError("code " + std::to_string(v) + " outside " +
                            std::to_string(coeff_bits) + "-bit range");
        }
    }
    double acc = 0.0;
    for (int plane = 0; plane < coeff_bits; ++plane) {
        const BitMask mask = plane_mask(codes, plane, coeff_bits);
        acc += plane_weight(plane, coeff_bits) * mac_bit_plane(x, basis, mask);
    }
    return acc * coeff_step(scale, coeff_bits);
}

Eigen::VectorXd simulate_tile_column(const Eigen::VectorXd& x,
                                     const CoefficientSet& coeffs,
                                     int partition,
                                     std::span<const ScheduleGroup> slice,
                                     const BasisMatrix& basis,
                                     const CrossbarConfig& config) {
    if (x.size() != basis.dim() || coeffs.dim() != basis.dim()) {
        throw DimensionError("input length does not match crossbar dimension");
    }
    const int n_bits = coeffs.coeff_bits();
    const double step = coeff_step(coeffs.scale(), n_bits);

    Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs.num_kernels());
    std::set<std::pair<int, int>> seen;  // (kernel, plane)
    for (const auto& group : slice) {
        if (group.partition != partition) {
            throw DimensionError("schedule slice targets partition " +
                                 std::to_string(group.partition) +
                                 " but partition " + std::to_string(partition) +
                                 " is being simulated");
        }
        for (const auto& slot : group.slots) {
            TgConfiguration tg;
            for (const auto& entry : slot.entries) {
                tg.groups.push_back({entry.kernel, entry.mask});
            }
            tg.validate(basis.dim(), config.tg_groups);

            const double weight = plane_weight(group.plane, n_bits);
            for (const auto& entry : slot.entries) {
                const BitMask expected =
                    plane_mask(coeffs.tile_codes(entry.kernel, partition),
                               group.plane, n_bits);
                if (!(expected == entry.mask)) {
                    throw InternalError(
                        "scheduled mask does not match coefficient codes");
                }
                if (!seen.emplace(entry.kernel, group.plane).second) {
                    throw InternalError("kernel scheduled twice on one plane");
                }
                out[entry.kernel] +=
                    weight * mac_bit_plane(x, basis, entry.mask);
            }
        }
    }

    // Every active plane of every kernel must have run exactly once.
    for (int i = 0; i < coeffs.num_kernels(); ++i) {
        for (int p = 0; p < n_bits; ++p) {
            const bool active =
                plane_mask(coeffs.tile_codes(i, partition), p, n_bits).any();
            if (active && seen.count({i, p}) == 0) {
                throw InternalError("schedule slice is missing kernel " +
                                    std::to_string(i) + " plane " +
                                    std::to_string(p));
            }
        }
    }
    return out * step;
}

Eigen::VectorXd simulate_layer(const Eigen::VectorXd& input,
                               const CoefficientSet& coeffs,
                               const Schedule& schedule, int layer,
                               const BasisMatrix& basis,
                               const CrossbarConfig& config) {
    const int d = basis.dim();
    const long long flat = input.size();
    const int partitions = coeffs.num_partitions();
    if ((flat + d - 1) / d != partitions) {
        throw DimensionError("input length " + std::to_string(flat) +
                             " does not match " + std::to_string(partitions) +
                             " partitions of width " + std::to_string(d));
    }

    // Group the layer's schedule slices by partition.
    std::vector<std::vector<ScheduleGroup>> by_partition(partitions);
    for (const auto& group : schedule.groups()) {
        if (group.layer == layer) {
            by_partition[static_cast<size_t>(group.partition)].push_back(group);
        }
    }

    Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs.num_kernels());
    Eigen::VectorXd slice = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < partitions; ++j) {
        const long long begin = static_cast<long long>(j) * d;
        const int len = static_cast<int>(std::min<long long>(d, flat - begin));
        slice.setZero();
        slice.head(len) = input.segment(begin, len);
        out += simulate_tile_column(slice, coeffs, j, by_partition[j], basis,
                                    config);
    }
    return out;
}

}  // namespace basisn

#include "basisn/cost.hpp"

#include <cmath>
#include <string>

namespace basisn {

const char* write_mode_name(WriteMode mode) {
    return mode == WriteMode::Row ? "row" : "block";
}

void BaselineCostParams::validate() const {
    if (cycles_per_row_write <= 0 || cycles_per_block_write <= 0) {
        throw ConfigError("write cycle costs must be positive");
    }
    if (block_rows <= 0 || block_cols <= 0) {
        throw ConfigError("block shape must be positive");
    }
    if (energy_per_cell_write <= 0.0 || energy_per_mac_cycle <= 0.0 ||
        energy_per_tg_load_bit <= 0.0) {
        throw ConfigError("energy constants must be positive");
    }
    if (tg_load_cycles < 0) {
        throw ConfigError("tg_load_cycles must be non-negative");
    }
}

long long crossbar_write_cycles(int d, WriteMode mode,
                                const BaselineCostParams& params) {
    if (d <= 0) throw DimensionError("crossbar dimension must be positive");
    if (mode == WriteMode::Row) {
        // Calibrated per 128-wide row; wider rows cost proportionally more.
        const double per_row =
            static_cast<double>(params.cycles_per_row_write) * d / 128.0;
        return static_cast<long long>(std::llround(per_row * d));
    }
    const long long blocks =
        static_cast<long long>((d + params.block_rows - 1) / params.block_rows) *
        ((d + params.block_cols - 1) / params.block_cols);
    return params.cycles_per_block_write * blocks;
}

std::vector<long long> layer_crossbars(const NetworkSpec& net, int d) {
    net.validate();
    if (d <= 0) throw DimensionError("crossbar dimension must be positive");
    std::vector<long long> out;
    out.reserve(net.layers.size());
    for (const auto& layer : net.layers) {
        const long long rows = (layer.n + d - 1) / d;
        const long long cols = (layer.flat_len() + d - 1) / d;
        out.push_back(rows * cols);
    }
    return out;
}

long long crossbars_needed(const NetworkSpec& net, int d) {
    long long total = 0;
    for (long long c : layer_crossbars(net, d)) total += c;
    return total;
}

WeightStationaryCost weight_stationary_cycles(const NetworkSpec& net, int d,
                                              long long available,
                                              const BaselineCostParams& params,
                                              WriteMode mode) {
    params.validate();
    if (available < 1) {
        throw ConfigError("available crossbar count must be at least 1");
    }
    const std::vector<long long> per_layer = layer_crossbars(net, d);

    WeightStationaryCost cost;
    long long contents = 0;
    for (long long c : per_layer) {
        contents += c;
        // One cycle per activation; a layer's contents run in parallel up to
        // the crossbar count, layers are sequential (distinct inputs).
        cost.compute_cycles += (c + available - 1) / available;
        cost.activations += c;
    }
    cost.rewrites = std::max(0ll, contents - available);
    // Reprogramming is serialized with compute: the chip halts while a
    // crossbar is rewritten.
    cost.reprogram_cycles =
        cost.rewrites * crossbar_write_cycles(d, mode, params);
    return cost;
}

long long SlotSummary::cycles(long long num_crossbars) const {
    if (num_crossbars < 1) {
        throw ConfigError("crossbar count must be at least 1");
    }
    long long total = 0;
    for (long long slots : group_slots) {
        total += (slots + num_crossbars - 1) / num_crossbars;
    }
    return total;
}

SlotSummary summarize_schedule(const Schedule& schedule) {
    SlotSummary summary;
    summary.dim = schedule.dim();
    summary.coeff_bits = schedule.coeff_bits();
    summary.tg_groups = schedule.tg_groups();
    summary.group_slots.reserve(schedule.groups().size());
    for (const auto& group : schedule.groups()) {
        summary.group_slots.push_back(
            static_cast<long long>(group.slots.size()));
        summary.total_slots += static_cast<long long>(group.slots.size());
        for (const auto& slot : group.slots) {
            summary.slot_entries += static_cast<long long>(slot.entries.size());
        }
    }
    return summary;
}

namespace {

BitMask synthetic_mask(int dim, double density, uint64_t stream_seed) {
    BitMask mask(dim);
    uint64_t state = stream_seed;
    if (density == 0.5) {
        // iid fair column bits straight from the generator words.
        for (int base = 0; base < dim; base += 64) {
            const uint64_t word = splitmix64(state);
            const int len = std::min(64, dim - base);
            for (int b = 0; b < len; ++b) {
                if ((word >> b) & 1ull) mask.set(base + b);
            }
        }
        return mask;
    }
    for (int l = 0; l < dim; ++l) {
        const double u =
            static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        if (u < density) mask.set(l);
    }
    return mask;
}

}  // namespace

SlotSummary synthetic_slot_summary(const NetworkSpec& net,
                                   const CrossbarConfig& config, uint64_t seed,
                                   double bit_density) {
    config.validate();
    net.validate();
    if (bit_density < 0.0 || bit_density > 1.0) {
        throw ConfigError("bit density must be in [0, 1]");
    }
    SlotSummary summary;
    summary.dim = config.dim;
    summary.coeff_bits = config.coeff_bits;
    summary.tg_groups = config.tg_groups;

    for (size_t layer = 0; layer < net.layers.size(); ++layer) {
        const auto& shape = net.layers[layer];
        const long long partitions =
            (shape.flat_len() + config.dim - 1) / config.dim;
        for (long long j = 0; j < partitions; ++j) {
            for (int p = 0; p < config.coeff_bits; ++p) {
                ContestInstance inst;
                inst.dim = config.dim;
                inst.group_capacity = config.tg_groups;
                inst.masks.reserve(static_cast<size_t>(shape.n));
                for (int i = 0; i < shape.n; ++i) {
                    uint64_t stream = seed;
                    stream = hash_combine(stream, layer);
                    stream = hash_combine(stream, static_cast<uint64_t>(j));
                    stream = hash_combine(stream, static_cast<uint64_t>(p));
                    stream = hash_combine(stream, static_cast<uint64_t>(i));
                    inst.masks.emplace_back(
                        i, synthetic_mask(config.dim, bit_density, stream));
                }
                const auto slots = pack_greedy(inst);
                if (slots.empty()) continue;
                summary.group_slots.push_back(
                    static_cast<long long>(slots.size()));
                summary.total_slots += static_cast<long long>(slots.size());
                for (const auto& slot : slots) {
                    summary.slot_entries +=
                        static_cast<long long>(slot.entries.size());
                }
            }
        }
    }
    return summary;
}

long long basisn_cycles(const SlotSummary& summary, long long num_crossbars,
                        const BaselineCostParams& params) {
    params.validate();
    // No write cycles, ever: the basis is programmed once, before inference.
    return summary.cycles(num_crossbars) +
           params.tg_load_cycles * summary.total_slots;
}

void EventCounts::validate() const {
    if (cell_writes < 0 || mac_cycles < 0 || tg_load_bits < 0) {
        throw ConfigError("event counts must be non-negative");
    }
}

EnergyBreakdown energy_breakdown(const EventCounts& counts,
                                 const BaselineCostParams& params) {
    counts.validate();
    params.validate();
    EnergyBreakdown e;
    e.write_j = static_cast<double>(counts.cell_writes) *
                params.energy_per_cell_write;
    e.mac_j =
        static_cast<double>(counts.mac_cycles) * params.energy_per_mac_cycle;
    e.tg_load_j = static_cast<double>(counts.tg_load_bits) *
                  params.energy_per_tg_load_bit;
    return e;
}

std::pair<double, double> energy_and_edp(long long cycles,
                                         const BaselineCostParams& params,
                                         const EventCounts& counts) {
    if (cycles < 0) throw ConfigError("cycle count must be non-negative");
    const double energy = energy_breakdown(counts, params).total_j();
    return {energy, energy * static_cast<double>(cycles)};
}

EventCounts weight_stationary_events(const WeightStationaryCost& cost, int d) {
    EventCounts counts;
    counts.cell_writes = cost.rewrites * static_cast<long long>(d) * d;
    counts.mac_cycles = cost.activations;
    counts.tg_load_bits = 0;
    return counts;
}

EventCounts basisn_events(const SlotSummary& summary) {
    EventCounts counts;
    counts.cell_writes = 0;  // structural: BasisN never reprograms
    counts.mac_cycles = summary.total_slots;
    counts.tg_load_bits =
        summary.slot_entries * static_cast<long long>(summary.dim);
    return counts;
}

CostComparison compare_costs(const NetworkSpec& net, const SlotSummary& summary,
                             const CrossbarConfig& config,
                             const BaselineCostParams& params) {
    CostComparison cmp;
    cmp.network = net.name;
    cmp.dim = config.dim;
    cmp.coeff_bits = config.coeff_bits;
    cmp.crossbars_available = config.num_crossbars;
    cmp.crossbars_needed = crossbars_needed(net, config.dim);

    cmp.basisn_cycles = basisn_cycles(summary, config.num_crossbars, params);
    const auto row = weight_stationary_cycles(net, config.dim,
                                              config.num_crossbars, params,
                                              WriteMode::Row);
    const auto block = weight_stationary_cycles(net, config.dim,
                                                config.num_crossbars, params,
                                                WriteMode::Block);
    cmp.row_cycles = row.total_cycles();
    cmp.block_cycles = block.total_cycles();

    const auto [basisn_energy, basisn_edp] =
        energy_and_edp(cmp.basisn_cycles, params, basisn_events(summary));
    const auto [row_energy, row_edp] = energy_and_edp(
        cmp.row_cycles, params, weight_stationary_events(row, config.dim));
    const auto [block_energy, block_edp] = energy_and_edp(
        cmp.block_cycles, params, weight_stationary_events(block, config.dim));
    cmp.basisn_energy_j = basisn_energy;
    cmp.row_energy_j = row_energy;
    cmp.block_energy_j = block_energy;
    cmp.basisn_edp = basisn_edp;
    cmp.row_edp = row_edp;
    cmp.block_edp = block_edp;

    cmp.cycle_ratio_row = static_cast<double>(cmp.basisn_cycles) /
                          static_cast<double>(cmp.row_cycles);
    cmp.cycle_ratio_block = static_cast<double>(cmp.basisn_cycles) /
                            static_cast<double>(cmp.block_cycles);
    cmp.edp_ratio_row = cmp.basisn_edp / cmp.row_edp;
    cmp.edp_ratio_block = cmp.basisn_edp / cmp.block_edp;
    return cmp;
}

long long crossing_point(const NetworkSpec& net, const SlotSummary& summary,
                         const CrossbarConfig& config,
                         const BaselineCostParams& params, WriteMode mode) {
    const long long needed = crossbars_needed(net, config.dim);
    for (long long x = 1; x <= needed + 1; ++x) {
        const auto ws =
            weight_stationary_cycles(net, config.dim, x, params, mode);
        if (ws.total_cycles() <= basisn_cycles(summary, x, params)) {
            return x;
        }
    }
    return needed + 1;
}

}  // namespace basisn

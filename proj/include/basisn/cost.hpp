#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "basisn/schedule.hpp"
#include "basisn/types.hpp"

namespace basisn {

enum class WriteMode { Row, Block };

const char* write_mode_name(WriteMode mode);

// Reprogramming-baseline calibration and energy constants. Cycle defaults
// put a full 128x128 crossbar rewrite at ~1e5 cycles (row mode, 781 cycles
// per 128-wide row) and 1e4 cycles (block mode, 625 cycles per 32x32 block).
// Energy constants are config inputs; the defaults are order-of-magnitude
// device values.
struct BaselineCostParams {
    long long cycles_per_row_write = 781;    // one row at 128-column width
    long long cycles_per_block_write = 625;  // one block_rows x block_cols block
    int block_rows = 32;
    int block_cols = 32;
    double energy_per_cell_write = 1e-11;   // J per cell reprogram
    double energy_per_mac_cycle = 1e-9;     // J per crossbar activation
    double energy_per_tg_load_bit = 1e-15;  // J per TG control bit loaded
    long long tg_load_cycles = 0;           // extra cycles per slot reconfiguration

    void validate() const;
};

// Cycles to rewrite one whole d x d crossbar. Row mode scales the calibrated
// per-row cost linearly in row width; block mode counts blocks.
long long crossbar_write_cycles(int d, WriteMode mode,
                                const BaselineCostParams& params);

// Crossbars per layer under weight-stationary mapping: one d x d crossbar
// region per tile of the 2D weight matrix, whole crossbars per layer.
std::vector<long long> layer_crossbars(const NetworkSpec& net, int d);
long long crossbars_needed(const NetworkSpec& net, int d);

struct WeightStationaryCost {
    long long compute_cycles = 0;
    long long reprogram_cycles = 0;
    long long rewrites = 0;      // whole-crossbar rewrites
    long long activations = 0;   // crossbar MAC activations
    long long total_cycles() const { return compute_cycles + reprogram_cycles; }
};

// Weight-stationary execution with `available` on-chip crossbars: one cycle
// per crossbar content activation (contents of one layer run in parallel up
// to the crossbar count) plus serialized whole-crossbar rewrites for every
// content beyond capacity.
WeightStationaryCost weight_stationary_cycles(const NetworkSpec& net, int d,
                                              long long available,
                                              const BaselineCostParams& params,
                                              WriteMode mode);

// Slot counts per (layer, partition, plane) group: everything the cost model
// needs from a schedule, valid for any crossbar count.
struct SlotSummary {
    int dim = 0;
    int coeff_bits = 0;
    int tg_groups = 0;
    std::vector<long long> group_slots;
    long long total_slots = 0;
    long long slot_entries = 0;

    long long cycles(long long num_crossbars) const;
};

SlotSummary summarize_schedule(const Schedule& schedule);

// Slot summary from synthetic coefficient bits: per-plane masks with iid
// column bits at `bit_density` (0.5 matches codes uniform over the N-bit
// range). Used to cost networks without trained coefficients; deterministic
// in (seed, layer, partition, plane, kernel).
SlotSummary synthetic_slot_summary(const NetworkSpec& net,
                                   const CrossbarConfig& config, uint64_t seed,
                                   double bit_density = 0.5);

// Scheduled cycles plus the configured TG-load overhead. Never includes
// write cycles.
long long basisn_cycles(const SlotSummary& summary, long long num_crossbars,
                        const BaselineCostParams& params);

struct EventCounts {
    long long cell_writes = 0;
    long long mac_cycles = 0;   // crossbar activations
    long long tg_load_bits = 0;

    void validate() const;
};

struct EnergyBreakdown {
    double write_j = 0.0;
    double mac_j = 0.0;
    double tg_load_j = 0.0;
    double total_j() const { return write_j + mac_j + tg_load_j; }
};

EnergyBreakdown energy_breakdown(const EventCounts& counts,
                                 const BaselineCostParams& params);

// energy in J and EDP in J*cycles for one run.
std::pair<double, double> energy_and_edp(long long cycles,
                                         const BaselineCostParams& params,
                                         const EventCounts& counts);

EventCounts weight_stationary_events(const WeightStationaryCost& cost, int d);
EventCounts basisn_events(const SlotSummary& summary);

// One network at one (d, N, crossbar-count) point: cycles, energy, EDP and
// the BasisN/baseline ratios.
struct CostComparison {
    std::string network;
    int dim = 0;
    int coeff_bits = 0;
    long long crossbars_available = 0;
    long long crossbars_needed = 0;

    long long basisn_cycles = 0;
    long long row_cycles = 0;
    long long block_cycles = 0;
    double basisn_energy_j = 0.0;
    double row_energy_j = 0.0;
    double block_energy_j = 0.0;
    double basisn_edp = 0.0;
    double row_edp = 0.0;
    double block_edp = 0.0;

    double cycle_ratio_row = 0.0;  // basisn / baseline
    double cycle_ratio_block = 0.0;
    double edp_ratio_row = 0.0;
    double edp_ratio_block = 0.0;
};

CostComparison compare_costs(const NetworkSpec& net, const SlotSummary& summary,
                             const CrossbarConfig& config,
                             const BaselineCostParams& params);

// Smallest crossbar count at which weight-stationary total cycles drop to or
// below BasisN cycles. With the default calibration this sits at the point
// where reprogramming vanishes, i.e. crossbars_needed.
long long crossing_point(const NetworkSpec& net, const SlotSummary& summary,
                         const CrossbarConfig& config,
                         const BaselineCostParams& params, WriteMode mode);

}  // namespace basisn

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "basisn/bits.hpp"
#include "basisn/linalg.hpp"
#include "basisn/types.hpp"

namespace basisn {

// The per-plane packing problem: which columns each kernel needs in one
// cycle of one tile column. Kernels with empty masks are inactive on this
// plane and are never packed.
struct ContestInstance {
    int dim = 0;
    int group_capacity = 1;  // G, parallel TG sets per crossbar
    std::vector<std::pair<int, BitMask>> masks;  // (kernel id, column mask)

    int active_count() const;
    // Largest number of kernels wanting any single column; a slot-count
    // lower bound, since contested columns serialize.
    int max_column_usage() const;
};

ContestInstance build_contest_instance(const CoefficientSet& coeffs, int plane,
                                       int partition = 0,
                                       int group_capacity = 1);

// One crossbar-cycle worth of TG assignments: at most G kernels with
// pairwise-disjoint masks.
struct ScheduleSlot {
    struct Entry {
        int kernel = 0;
        BitMask mask;
    };
    std::vector<Entry> entries;
    BitMask used;  // union of entry masks
};

// First-fit-decreasing by mask popcount. Feasible by construction and
// deterministic (ties broken by kernel id).
std::vector<ScheduleSlot> pack_greedy(const ContestInstance& inst);

// Exact minimum slot count by branch-and-bound; test oracle only. Throws
// when the instance has more than `limit` active kernels.
int pack_exact_small(const ContestInstance& inst, int limit = 12);

// All slots of one (layer, tile column, bit plane). After schedule assembly
// the group also knows its cycle range: slots are spread round-robin over
// the crossbars, so the group spans ceil(slots / num_crossbars) cycles.
struct ScheduleGroup {
    int layer = 0;
    int partition = 0;
    int plane = 0;
    std::vector<ScheduleSlot> slots;
    long long first_cycle = 0;
    long long cycle_count = 0;
};

struct CycleEntry {
    int crossbar = 0;
    int layer = 0;
    int kernel = 0;
    int partition = 0;
    int plane = 0;
    BitMask mask;
};

struct ScheduleCycle {
    std::vector<CycleEntry> entries;
};

class Schedule {
public:
    Schedule(int dim, int coeff_bits, int tg_groups, int num_crossbars);

    int dim() const { return dim_; }
    int coeff_bits() const { return coeff_bits_; }
    int tg_groups() const { return tg_groups_; }
    int num_crossbars() const { return num_crossbars_; }
    const std::vector<ScheduleGroup>& groups() const { return groups_; }

    // Appends the group, assigns its cycle range, and extends the total.
    void add_group(ScheduleGroup group);

    long long total_cycles() const { return total_cycles_; }
    long long total_slots() const;
    long long slot_entries() const;

    // Materializes the cycle-by-cycle view (one input vector per crossbar
    // per cycle). Intended for inspection and small networks; the cost
    // model works from slot counts instead.
    std::vector<ScheduleCycle> explicit_cycles() const;

    // Re-validates feasibility of every slot and, when coefficient sets are
    // given, completeness: every nonzero (kernel, partition, plane) mask
    // appears exactly once and matches the codes.
    void validate(const std::vector<CoefficientSet>* coeffs = nullptr) const;

private:
    int dim_;
    int coeff_bits_;
    int tg_groups_;
    int num_crossbars_;
    long long total_cycles_ = 0;
    std::vector<ScheduleGroup> groups_;
};

// Packs every layer, tile column, and bit plane of the network and lays the
// slots out over the available crossbars. All crossbars hold the same basis,
// so any slot may run on any crossbar; slots of one group share the same
// input partition and may therefore run in the same cycle on different
// crossbars. Kernels from different layers never share a cycle.
Schedule schedule_network(const NetworkSpec& net,
                          const std::vector<CoefficientSet>& coeffs,
                          const CrossbarConfig& config);

}  // namespace basisn

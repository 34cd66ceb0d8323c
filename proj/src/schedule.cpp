#include "basisn/schedule.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace basisn {

int ContestInstance::active_count() const {
    int n = 0;
    for (const auto& [kernel, mask] : masks) {
        if (mask.any()) ++n;
    }
    return n;
}

int ContestInstance::max_column_usage() const {
    int best = 0;
    for (int col = 0; col < dim; ++col) {
        int usage = 0;
        for (const auto& [kernel, mask] : masks) {
            if (mask.test(col)) ++usage;
        }
        best = std::max(best, usage);
    }
    return best;
}

ContestInstance build_contest_instance(const CoefficientSet& coeffs, int plane,
                                       int partition, int group_capacity) {
    if (plane < 0 || plane >= coeffs.coeff_bits()) {
        throw ConfigError("plane " + std::to_string(plane) +
                          " out of range for " +
                          std::to_string(coeffs.coeff_bits()) + "-bit codes");
    }
    if (partition < 0 || partition >= coeffs.num_partitions()) {
        throw DimensionError("partition " + std::to_string(partition) +
                             " out of range");
    }
    ContestInstance inst;
    inst.dim = coeffs.dim();
    inst.group_capacity = group_capacity;
    inst.masks.reserve(coeffs.num_kernels());
    for (int i = 0; i < coeffs.num_kernels(); ++i) {
        inst.masks.emplace_back(
            i, plane_mask(coeffs.tile_codes(i, partition), plane,
                          coeffs.coeff_bits()));
    }
    return inst;
}

std::vector<ScheduleSlot> pack_greedy(const ContestInstance& inst) {
    if (inst.group_capacity < 1) {
        throw ConfigError("group capacity must be at least 1");
    }
    // First-fit-decreasing: widest masks first, ties by kernel id for
    // determinism.
    std::vector<std::pair<int, const BitMask*>> order;
    order.reserve(inst.masks.size());
    for (const auto& [kernel, mask] : inst.masks) {
        if (mask.any()) order.emplace_back(kernel, &mask);
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        const int ca = a.second->count();
        const int cb = b.second->count();
        if (ca != cb) return ca > cb;
        return a.first < b.first;
    });

    std::vector<ScheduleSlot> slots;
    for (const auto& [kernel, mask] : order) {
        bool placed = false;
        for (auto& slot : slots) {
            if (static_cast<int>(slot.entries.size()) >= inst.group_capacity) {
                continue;
            }
            if (slot.used.intersects(*mask)) continue;
            slot.entries.push_back({kernel, *mask});
            slot.used |= *mask;
            placed = true;
            break;
        }
        if (!placed) {
            ScheduleSlot slot;
            slot.used = *mask;
            slot.entries.push_back({kernel, *mask});
            slots.push_back(std::move(slot));
        }
    }
    return slots;
}

namespace {

struct ExactSearch {
    const std::vector<const BitMask*>* masks = nullptr;
    int capacity = 1;
    int best = 0;

    struct OpenSlot {
        BitMask used;
        int size = 0;
    };

    void dfs(size_t index, std::vector<OpenSlot>& slots) {
        if (static_cast<int>(slots.size()) >= best) return;  // can't improve
        if (index == masks->size()) {
            best = static_cast<int>(slots.size());
            return;
        }
        const BitMask& mask = *(*masks)[index];
        for (auto& slot : slots) {
            if (slot.size >= capacity || slot.used.intersects(mask)) continue;
            const BitMask saved = slot.used;
            slot.used |= mask;
            ++slot.size;
            dfs(index + 1, slots);
            slot.used = saved;
            --slot.size;
        }
        // Opening a new slot last keeps the enumeration canonical: slots are
        // identified by the first mask they receive.
        if (static_cast<int>(slots.size()) + 1 < best) {
            slots.push_back({mask, 1});
            dfs(index + 1, slots);
            slots.pop_back();
        }
    }
};

}  // namespace

int pack_exact_small(const ContestInstance& inst, int limit) {
    std::vector<const BitMask*> active;
    for (const auto& [kernel, mask] : inst.masks) {
        if (mask.any()) active.push_back(&mask);
    }
    if (static_cast<int>(active.size()) > limit) {
        throw ConfigError("exact packing limited to " + std::to_string(limit) +
                          " active kernels, got " +
                          std::to_string(active.size()));
    }
    if (active.empty()) return 0;

    std::sort(active.begin(), active.end(),
              [](const BitMask* a, const BitMask* b) {
                  return a->count() > b->count();
              });

    const int upper = static_cast<int>(pack_greedy(inst).size());
    const int lower = std::max(
        inst.max_column_usage(),
        static_cast<int>((active.size() + inst.group_capacity - 1) /
                         inst.group_capacity));
    if (upper == lower) return upper;  // greedy already optimal

    ExactSearch search;
    search.masks = &active;
    search.capacity = inst.group_capacity;
    search.best = upper;  // achievable; search only for strict improvements
    std::vector<ExactSearch::OpenSlot> slots;
    search.dfs(0, slots);
    return search.best;
}

Schedule::Schedule(int dim, int coeff_bits, int tg_groups, int num_crossbars)
    : dim_(dim),
      coeff_bits_(coeff_bits),
      tg_groups_(tg_groups),
      num_crossbars_(num_crossbars) {
    if (dim <= 0 || num_crossbars <= 0 || tg_groups < 1) {
        throw ConfigError("invalid schedule configuration");
    }
}

void Schedule::add_group(ScheduleGroup group) {
    group.first_cycle = total_cycles_;
    group.cycle_count =
        (static_cast<long long>(group.slots.size()) + num_crossbars_ - 1) /
        num_crossbars_;
    total_cycles_ += group.cycle_count;
    groups_.push_back(std::move(group));
}

long long Schedule::total_slots() const {
    long long n = 0;
    for (const auto& g : groups_) n += static_cast<long long>(g.slots.size());
    return n;
}

long long Schedule::slot_entries() const {
    long long n = 0;
    for (const auto& g : groups_) {
        for (const auto& slot : g.slots) {
            n += static_cast<long long>(slot.entries.size());
        }
    }
    return n;
}

std::vector<ScheduleCycle> Schedule::explicit_cycles() const {
    std::vector<ScheduleCycle> cycles(static_cast<size_t>(total_cycles_));
    for (const auto& g : groups_) {
        for (size_t s = 0; s < g.slots.size(); ++s) {
            const long long cycle =
                g.first_cycle + static_cast<long long>(s) / num_crossbars_;
            const int crossbar = static_cast<int>(s % num_crossbars_);
            for (const auto& entry : g.slots[s].entries) {
                cycles[static_cast<size_t>(cycle)].entries.push_back(
                    {crossbar, g.layer, entry.kernel, g.partition, g.plane,
                     entry.mask});
            }
        }
    }
    return cycles;
}

void Schedule::validate(const std::vector<CoefficientSet>* coeffs) const {
    for (const auto& g : groups_) {
        for (const auto& slot : g.slots) {
            if (static_cast<int>(slot.entries.size()) > tg_groups_) {
                throw ContestViolationError(
                    "slot holds " + std::to_string(slot.entries.size()) +
                    " kernels but only " + std::to_string(tg_groups_) +
                    " TG groups exist");
            }
            BitMask used(dim_);
            int total = 0;
            for (const auto& entry : slot.entries) {
                if (used.intersects(entry.mask)) {
                    throw ContestViolationError(
                        "overlapping masks in one slot (layer " +
                        std::to_string(g.layer) + ", plane " +
                        std::to_string(g.plane) + ")");
                }
                used |= entry.mask;
                total += entry.mask.count();
            }
            if (used.count() != total) {
                throw ContestViolationError("mask union/cardinality mismatch");
            }
        }
    }

    if (coeffs == nullptr) return;
    // Completeness: every nonzero (kernel, partition, plane) mask scheduled
    // exactly once, with the mask matching the codes.
    std::set<std::tuple<int, int, int, int>> seen;
    for (const auto& g : groups_) {
        const auto& set = coeffs->at(static_cast<size_t>(g.layer));
        for (const auto& slot : g.slots) {
            for (const auto& entry : slot.entries) {
                const BitMask expected =
                    plane_mask(set.tile_codes(entry.kernel, g.partition),
                               g.plane, set.coeff_bits());
                if (!(expected == entry.mask)) {
                    throw InternalError("scheduled mask does not match codes");
                }
                if (!seen.emplace(g.layer, entry.kernel, g.partition, g.plane)
                         .second) {
                    throw InternalError("duplicate schedule entry");
                }
            }
        }
    }
    for (size_t layer = 0; layer < coeffs->size(); ++layer) {
        const auto& set = (*coeffs)[layer];
        for (int i = 0; i < set.num_kernels(); ++i) {
            for (int j = 0; j < set.num_partitions(); ++j) {
                for (int p = 0; p < set.coeff_bits(); ++p) {
                    const bool active =
                        plane_mask(set.tile_codes(i, j), p, set.coeff_bits())
                            .any();
                    const bool scheduled =
                        seen.count({static_cast<int>(layer), i, j, p}) > 0;
                    if (active && !scheduled) {
                        throw InternalError("schedule is missing an active "
                                            "(kernel, partition, plane)");
                    }
                }
            }
        }
    }
}

Schedule schedule_network(const NetworkSpec& net,
                          const std::vector<CoefficientSet>& coeffs,
                          const CrossbarConfig& config) {
    config.validate();
    net.validate();
    if (net.layers.size() != coeffs.size()) {
        throw DimensionError("network has " + std::to_string(net.layers.size()) +
                             " layers but " + std::to_string(coeffs.size()) +
                             " coefficient sets were given");
    }
    for (size_t layer = 0; layer < coeffs.size(); ++layer) {
        if (coeffs[layer].dim() != config.dim) {
            throw DimensionError("layer " + std::to_string(layer) +
                                 " was decomposed at d=" +
                                 std::to_string(coeffs[layer].dim()) +
                                 " but the crossbar dimension is " +
                                 std::to_string(config.dim));
        }
        if (coeffs[layer].coeff_bits() != config.coeff_bits) {
            throw DimensionError("coefficient bit width mismatch in layer " +
                                 std::to_string(layer));
        }
    }

    Schedule schedule(config.dim, config.coeff_bits, config.tg_groups,
                      config.num_crossbars);
    for (size_t layer = 0; layer < coeffs.size(); ++layer) {
        const auto& set = coeffs[layer];
        for (int j = 0; j < set.num_partitions(); ++j) {
            for (int p = 0; p < set.coeff_bits(); ++p) {
                ContestInstance inst =
                    build_contest_instance(set, p, j, config.tg_groups);
                ScheduleGroup group;
                group.layer = static_cast<int>(layer);
                group.partition = j;
                group.plane = p;
                group.slots = pack_greedy(inst);
                if (group.slots.empty()) continue;  // plane inactive
                schedule.add_group(std::move(group));
            }
        }
    }
    return schedule;
}

}  // namespace basisn

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ccfsim/errors.hpp"

// Plant structure and voting. The protection system is `divisions` redundant
// divisions, each holding the same column of acquisition units (APUs). An APU is
// one C1 processing element in series with its C2 communication stage; C2 can be
// modelled as one block or as individual cards. Same-index APUs across divisions
// form a group (GAPU) that fails once gapu_vote_k of its members are down. Every
// GAPU belongs to one of two subsystems; a subsystem fails when any of its GAPUs
// fails, and the system-level vote combines the two subsystems.
namespace ccfsim {

enum class Subsystem : std::uint8_t { A = 0, B = 1 };

enum class VoteConfig : std::uint8_t {
    OneOutOfTwo,  // system fails when either subsystem fails
    TwoOutOfTwo,  // system fails only when both subsystems fail
};

enum class C2Granularity : std::uint8_t { SeriesBlock, PerCard };

enum class ElementKind : std::uint8_t { C1, C2Block, C2Card };

struct TopologyConfig {
    int divisions = 4;
    int apus_per_division = 5;
    // Subsystem of each APU column; defaults: first three columns A, last two B.
    std::vector<Subsystem> subsystem_of_apu = {Subsystem::A, Subsystem::A, Subsystem::A,
                                               Subsystem::B, Subsystem::B};
    int gapu_vote_k = 3;  // failed APUs (out of `divisions`) that take a GAPU down
    VoteConfig vote = VoteConfig::OneOutOfTwo;
    C2Granularity granularity = C2Granularity::SeriesBlock;
    // C2 card count per APU column; 0 means the APU is its C1 element alone.
    std::vector<int> c2_cards_per_apu = {4, 4, 3, 3, 3};
};

struct ElementInfo {
    int division = 0;
    int apu = 0;  // APU column index; doubles as the GAPU id
    ElementKind kind = ElementKind::C1;
    int card = -1;  // C2 card ordinal within the APU, PerCard only
    Subsystem subsystem = Subsystem::A;
};

// Down flags for every vote level, derived from one element down-set.
struct LevelStatus {
    std::vector<char> apu_down;   // indexed division * apus_per_division + apu
    std::vector<char> gapu_down;  // indexed by APU column
    bool subsystem_down[2] = {false, false};
    bool system_down = false;
};

class Topology {
public:
    explicit Topology(TopologyConfig config);

    int element_count() const { return static_cast<int>(elements_.size()); }
    int division_count() const { return config_.divisions; }
    int apus_per_division() const { return config_.apus_per_division; }
    const TopologyConfig& config() const { return config_; }
    const std::vector<ElementInfo>& elements() const { return elements_; }
    const ElementInfo& membership(int element) const;

    int apu_flat_index(int division, int apu) const {
        return division * config_.apus_per_division + apu;
    }

    // Full recompute of the voting chain from scratch. The simulation keeps
    // incremental counters for speed; this is the reference the counters are
    // checked against.
    LevelStatus evaluate(std::span<const char> element_down) const;

    // Element ids of one subsystem, ascending.
    std::vector<int> subsystem_elements(Subsystem s) const;

private:
    TopologyConfig config_;
    std::vector<ElementInfo> elements_;
};

const char* to_string(Subsystem s);
const char* to_string(VoteConfig v);

}  // namespace ccfsim

#include "ccfsim/topology.hpp"

#include <string>

namespace ccfsim {

Topology::Topology(TopologyConfig config) : config_(std::move(config)) {
    if (config_.divisions < 1)
        throw DomainError("divisions must be >= 1, got " + std::to_string(config_.divisions));
    if (config_.apus_per_division < 1)
        throw DomainError("apus_per_division must be >= 1, got " +
                          std::to_string(config_.apus_per_division));
    if (static_cast<int>(config_.subsystem_of_apu.size()) != config_.apus_per_division)
        throw DomainError("subsystem_of_apu must list one subsystem per APU column: expected " +
                          std::to_string(config_.apus_per_division) + " entries, got " +
                          std::to_string(config_.subsystem_of_apu.size()));
    if (config_.gapu_vote_k < 1 || config_.gapu_vote_k > config_.divisions)
        throw DomainError("gapu_vote_k must be in [1, divisions], got " +
                          std::to_string(config_.gapu_vote_k));
    if (static_cast<int>(config_.c2_cards_per_apu.size()) != config_.apus_per_division)
        throw DomainError("c2_cards_per_apu must list one count per APU column: expected " +
                          std::to_string(config_.apus_per_division) + " entries, got " +
                          std::to_string(config_.c2_cards_per_apu.size()));
    for (int c : config_.c2_cards_per_apu)
        if (c < 0) throw DomainError("c2 card counts must be >= 0, got " + std::to_string(c));

    for (int d = 0; d < config_.divisions; ++d) {
        for (int a = 0; a < config_.apus_per_division; ++a) {
            const Subsystem ss = config_.subsystem_of_apu[a];
            const int cards = config_.c2_cards_per_apu[a];
            elements_.push_back({d, a, ElementKind::C1, -1, ss});
            if (cards == 0) continue;
            if (config_.granularity == C2Granularity::SeriesBlock) {
                elements_.push_back({d, a, ElementKind::C2Block, -1, ss});
            } else {
                for (int c = 0; c < cards; ++c)
                    elements_.push_back({d, a, ElementKind::C2Card, c, ss});
            }
        }
    }
}

const ElementInfo& Topology::membership(int element) const {
    if (element < 0 || element >= element_count())
        throw DomainError("element id out of range: " + std::to_string(element));
    return elements_[static_cast<std::size_t>(element)];
}

LevelStatus Topology::evaluate(std::span<const char> element_down) const {
    if (static_cast<int>(element_down.size()) != element_count())
        throw DomainError("element state vector has size " + std::to_string(element_down.size()) +
                          ", topology has " + std::to_string(element_count()) + " elements");
    LevelStatus st;
    st.apu_down.assign(static_cast<std::size_t>(config_.divisions * config_.apus_per_division), 0);
    st.gapu_down.assign(static_cast<std::size_t>(config_.apus_per_division), 0);

    for (int e = 0; e < element_count(); ++e) {
        if (!element_down[static_cast<std::size_t>(e)]) continue;
        const ElementInfo& m = elements_[static_cast<std::size_t>(e)];
        st.apu_down[static_cast<std::size_t>(apu_flat_index(m.division, m.apu))] = 1;
    }
    for (int a = 0; a < config_.apus_per_division; ++a) {
        int down = 0;
        for (int d = 0; d < config_.divisions; ++d)
            down += st.apu_down[static_cast<std::size_t>(apu_flat_index(d, a))];
        if (down >= config_.gapu_vote_k) {
            st.gapu_down[static_cast<std::size_t>(a)] = 1;
            st.subsystem_down[static_cast<int>(config_.subsystem_of_apu[static_cast<std::size_t>(a)])] = true;
        }
    }
    st.system_down = config_.vote == VoteConfig::OneOutOfTwo
                         ? (st.subsystem_down[0] || st.subsystem_down[1])
                         : (st.subsystem_down[0] && st.subsystem_down[1]);
    return st;
}

std::vector<int> Topology::subsystem_elements(Subsystem s) const {
    std::vector<int> ids;
    for (int e = 0; e < element_count(); ++e)
        if (elements_[static_cast<std::size_t>(e)].subsystem == s) ids.push_back(e);
    return ids;
}

const char* to_string(Subsystem s) { return s == Subsystem::A ? "A" : "B"; }

const char* to_string(VoteConfig v) {
    return v == VoteConfig::OneOutOfTwo ? "1oo2" : "2oo2";
}

}  // namespace ccfsim

#include "ccfsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ccfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Safety cap for FirstFailureUncapped: a history that survives this many mission
// lengths is treated as non-failing rather than looping forever.
constexpr double kUncappedMissionMultiple = 1000.0;

EventKind rex_kind_for(FailureCause cause) {
    switch (cause) {
        case FailureCause::IndependentSa:
        case FailureCause::IndependentNsa:
            return EventKind::IndependentFailure;
        case FailureCause::CcfNonlethal:
            return EventKind::NonlethalShock;
        case FailureCause::CcfLethal:
            return EventKind::LethalShock;
    }
    throw std::logic_error("unreachable failure cause");
}

}  // namespace

const char* to_string(FailureCause c) {
    switch (c) {
        case FailureCause::IndependentSa: return "independent_sa";
        case FailureCause::IndependentNsa: return "independent_nsa";
        case FailureCause::CcfNonlethal: return "ccf_nonlethal";
        case FailureCause::CcfLethal: return "ccf_lethal";
    }
    return "?";
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::RepairDone: return "repair_done";
        case EventKind::PeriodicTest: return "periodic_test";
        case EventKind::IndependentFailure: return "independent_failure";
        case EventKind::NonlethalShock: return "nonlethal_shock";
        case EventKind::LethalShock: return "lethal_shock";
        case EventKind::MissionEnd: return "mission_end";
    }
    return "?";
}

HistorySimulation::HistorySimulation(const Topology& topology, const HistoryParams& params,
                                     std::uint64_t history_index, std::uint64_t master_seed)
    : topology_(topology),
      params_(params),
      rng_(history_seed(master_seed, history_index)) {
    if (!(params_.lambda_sa >= 0.0) || !(params_.lambda_nsa >= 0.0))
        throw DomainError("independent failure rates must be >= 0");
    if (!(params_.coverage >= 0.0 && params_.coverage <= 1.0))
        throw DomainError("coverage must be in [0, 1], got " + std::to_string(params_.coverage));
    if (!(params_.mu >= 0.0) || !(params_.omega >= 0.0))
        throw DomainError("shock rates must be >= 0");
    if (params_.mu > 0.0 &&
        static_cast<int>(params_.victim_probs.prob.size()) != topology_.element_count())
        throw DomainError("victim probabilities must cover every element: expected " +
                          std::to_string(topology_.element_count()) + " entries, got " +
                          std::to_string(params_.victim_probs.prob.size()));
    if (!(params_.mission_hours > 0.0))
        throw DomainError("mission_hours must be > 0, got " + std::to_string(params_.mission_hours));
    if (!(params_.repair.hours >= 0.0))
        throw DomainError("repair hours must be >= 0, got " + std::to_string(params_.repair.hours));
    if (params_.repair.distribution == RepairDistribution::Exponential &&
        !(params_.repair.hours > 0.0))
        throw DomainError("exponential repair needs a positive mean");
    if (params_.tests.enabled && !(params_.tests.period_hours > 0.0))
        throw DomainError("test period must be > 0, got " +
                          std::to_string(params_.tests.period_hours));

    const int n = topology_.element_count();
    elems_.assign(static_cast<std::size_t>(n), {});
    division_elements_.assign(static_cast<std::size_t>(topology_.division_count()), {});
    for (int e = 0; e < n; ++e)
        division_elements_[static_cast<std::size_t>(topology_.membership(e).division)].push_back(e);

    const std::size_t apus =
        static_cast<std::size_t>(topology_.division_count() * topology_.apus_per_division());
    ref_.apu_down_elems.assign(apus, 0);
    ref_.gapu_down_apus.assign(static_cast<std::size_t>(topology_.apus_per_division()), 0);
    vis_ = ref_;

    if (params_.repair.crews == RepairCrews::OnePerDivision) {
        crew_busy_.assign(static_cast<std::size_t>(topology_.division_count()), 0);
        crew_wait_.assign(static_cast<std::size_t>(topology_.division_count()), {});
    }

    result_.index = history_index;
    result_.mission_hours = params_.mission_hours;
}

ElementMode HistorySimulation::element_mode(int element) const {
    topology_.membership(element);  // range check
    return elems_[static_cast<std::size_t>(element)].mode;
}

FailureCause HistorySimulation::element_cause(int element) const {
    topology_.membership(element);
    return elems_[static_cast<std::size_t>(element)].cause;
}

void HistorySimulation::advance_time(double t) {
    if (t < now_) throw std::logic_error("time must not move backwards");
    const double dt = t - now_;
    if (dt > 0.0) {
        if (ref_.system_down) result_.reference_downtime += dt;
        if (vis_.system_down) result_.visible_downtime += dt;
    }
    now_ = t;
}

void HistorySimulation::refresh_system_flag(VoteCounters& c) const {
    const bool a = c.subsys_down_gapus[0] > 0;
    const bool b = c.subsys_down_gapus[1] > 0;
    c.system_down = topology_.config().vote == VoteConfig::OneOutOfTwo ? (a || b) : (a && b);
}

void HistorySimulation::raise(VoteCounters& c, int element) {
    const ElementInfo& m = topology_.membership(element);
    const std::size_t flat = static_cast<std::size_t>(topology_.apu_flat_index(m.division, m.apu));
    if (++c.apu_down_elems[flat] != 1) return;  // APU was already down
    if (++c.gapu_down_apus[static_cast<std::size_t>(m.apu)] != topology_.config().gapu_vote_k)
        return;  // GAPU did not cross its vote threshold
    ++c.subsys_down_gapus[static_cast<int>(m.subsystem)];
    refresh_system_flag(c);
}

void HistorySimulation::lower(VoteCounters& c, int element) {
    const ElementInfo& m = topology_.membership(element);
    const std::size_t flat = static_cast<std::size_t>(topology_.apu_flat_index(m.division, m.apu));
    if (c.apu_down_elems[flat] == 0) throw std::logic_error("lowering an APU with no down elements");
    if (--c.apu_down_elems[flat] != 0) return;
    // The GAPU leaves the failed region only when it drops below the threshold.
    if (c.gapu_down_apus[static_cast<std::size_t>(m.apu)]-- != topology_.config().gapu_vote_k)
        return;
    --c.subsys_down_gapus[static_cast<int>(m.subsystem)];
    refresh_system_flag(c);
}

void HistorySimulation::log_rex(EventKind kind, int element, FailureCause cause,
                                bool detected_online) {
    if (!params_.collect_rex) return;
    const ElementInfo& m = topology_.membership(element);
    RexRecord r;
    r.history = result_.index;
    r.time = now_;
    r.kind = kind;
    r.element = element;
    r.division = static_cast<std::int16_t>(m.division);
    r.apu = static_cast<std::int16_t>(m.apu);
    r.subsystem = m.subsystem;
    r.cause = cause;
    r.detected_online = detected_online;
    r.system_ref_down = ref_.system_down;
    r.system_vis_down = vis_.system_down;
    result_.rex.push_back(r);
}

bool HistorySimulation::fail_element(int element, FailureCause cause, bool detected_online) {
    topology_.membership(element);  // range check
    ElementState& el = elems_[static_cast<std::size_t>(element)];
    if (el.mode != ElementMode::Operational) return false;  // absorbed, cause unchanged
    el.mode = detected_online ? ElementMode::FailedDetected : ElementMode::FailedHidden;
    el.cause = cause;
    raise(ref_, element);
    if (detected_online) {
        raise(vis_, element);
        schedule_repair(element);
    }
    switch (cause) {
        case FailureCause::IndependentSa:
        case FailureCause::IndependentNsa:
            ++result_.counts.independent_failures;
            break;
        case FailureCause::CcfNonlethal:
            ++result_.counts.nonlethal_victims;
            break;
        case FailureCause::CcfLethal:
            ++result_.counts.lethal_victims;
            break;
    }
    log_rex(rex_kind_for(cause), element, cause, detected_online);
    return true;
}

int HistorySimulation::apply_periodic_test(int division) {
    if (division < 0 || division >= topology_.division_count())
        throw DomainError("division out of range: " + std::to_string(division));
    int revealed = 0;
    for (int e : division_elements_[static_cast<std::size_t>(division)]) {
        ElementState& el = elems_[static_cast<std::size_t>(e)];
        if (el.mode != ElementMode::FailedHidden) continue;
        el.mode = ElementMode::FailedDetected;
        raise(vis_, e);
        schedule_repair(e);
        ++result_.counts.revealed_by_test;
        ++revealed;
        log_rex(EventKind::PeriodicTest, e, el.cause, false);
    }
    return revealed;
}

void HistorySimulation::complete_repair(int element) {
    ElementState& el = elems_[static_cast<std::size_t>(element)];
    if (el.mode != ElementMode::FailedDetected || !el.repair_running)
        throw std::logic_error("repair completion for element " + std::to_string(element) +
                               " which is not under repair");
    const FailureCause repaired = el.cause;
    el.mode = ElementMode::Operational;
    el.repair_running = false;
    ++el.seq;  // cancels any stale independent-failure clock
    lower(ref_, element);
    lower(vis_, element);
    ++result_.counts.repairs_completed;
    log_rex(EventKind::RepairDone, element, repaired, true);
    schedule_independent(element);
    if (params_.repair.crews == RepairCrews::OnePerDivision) {
        const int d = topology_.membership(element).division;
        crew_busy_[static_cast<std::size_t>(d)] = 0;
        auto& wait = crew_wait_[static_cast<std::size_t>(d)];
        if (!wait.empty()) {
            const int next = wait.front();
            wait.pop_front();
            start_repair(next);
        }
    }
}

void HistorySimulation::schedule_independent(int element) {
    ElementState& el = elems_[static_cast<std::size_t>(element)];
    double t = kInf;
    if (params_.independent_sampling == IndependentSampling::CompetingClocks) {
        // Draw order is fixed (self-announcing first) so the stream layout does not
        // depend on which rates happen to be zero at runtime.
        double t_sa = kInf, t_nsa = kInf;
        if (params_.lambda_sa > 0.0)
            t_sa = now_ + apply_rounding(rng_.exponential(params_.lambda_sa), params_.rounding);
        if (params_.lambda_nsa > 0.0)
            t_nsa = now_ + apply_rounding(rng_.exponential(params_.lambda_nsa), params_.rounding);
        if (t_sa == kInf && t_nsa == kInf) return;
        el.pending_sa = t_sa <= t_nsa;
        t = el.pending_sa ? t_sa : t_nsa;
    } else {
        const double total = params_.lambda_sa + params_.lambda_nsa;
        if (!(total > 0.0)) return;
        t = now_ + apply_rounding(rng_.exponential(total), params_.rounding);
    }
    queue_.push({t, EventKind::IndependentFailure, element, el.seq});
}

void HistorySimulation::schedule_repair(int element) {
    if (params_.repair.crews == RepairCrews::Unlimited) {
        start_repair(element);
        return;
    }
    const int d = topology_.membership(element).division;
    if (crew_busy_[static_cast<std::size_t>(d)])
        crew_wait_[static_cast<std::size_t>(d)].push_back(element);
    else
        start_repair(element);
}

void HistorySimulation::start_repair(int element) {
    ElementState& el = elems_[static_cast<std::size_t>(element)];
    if (el.mode != ElementMode::FailedDetected || el.repair_running)
        throw std::logic_error("repair start for element " + std::to_string(element) +
                               " in an invalid state");
    el.repair_running = true;
    if (params_.repair.crews == RepairCrews::OnePerDivision)
        crew_busy_[static_cast<std::size_t>(topology_.membership(element).division)] = 1;
    double duration = params_.repair.hours;
    if (params_.repair.distribution == RepairDistribution::Exponential)
        duration = apply_rounding(rng_.exponential(1.0 / params_.repair.hours), params_.rounding);
    queue_.push({now_ + duration, EventKind::RepairDone, element, el.seq});
}

void HistorySimulation::apply_nonlethal_shock() {
    ++result_.counts.nonlethal_shocks;
    const std::vector<int> victims = mark_victims(rng_, params_.victim_probs);
    // The detection draw happens for every shock, victims or not, so the stream
    // consumption per shock depends only on the victim set.
    bool shock_detected = false;
    if (params_.detection == DetectionGranularity::PerShock)
        shock_detected = classify_detection(rng_, params_.coverage);
    for (int v : victims) {
        const bool detected = params_.detection == DetectionGranularity::PerShock
                                  ? shock_detected
                                  : classify_detection(rng_, params_.coverage);
        fail_element(v, FailureCause::CcfNonlethal, detected);
    }
}

void HistorySimulation::apply_lethal_shock() {
    ++result_.counts.lethal_shocks;
    // Lethal shocks are always detected; elements already down are absorbed and in
    // particular a hidden failure is not revealed by a lethal shock.
    for (int e = 0; e < topology_.element_count(); ++e)
        fail_element(e, FailureCause::CcfLethal, true);
}

void HistorySimulation::handle_independent_event(const Event& ev) {
    ElementState& el = elems_[static_cast<std::size_t>(ev.id)];
    if (ev.seq != el.seq) return;                      // clock canceled by a repair
    if (el.mode != ElementMode::Operational) return;   // absorbed by an earlier shock
    FailureCause cause;
    if (params_.independent_sampling == IndependentSampling::CompetingClocks)
        cause = el.pending_sa ? FailureCause::IndependentSa : FailureCause::IndependentNsa;
    else
        cause = classify_detection(rng_, params_.coverage) ? FailureCause::IndependentSa
                                                           : FailureCause::IndependentNsa;
    fail_element(ev.id, cause, cause == FailureCause::IndependentSa);
}

void HistorySimulation::snapshot_failed_elements() {
    result_.failure_snapshot.clear();
    for (int e = 0; e < topology_.element_count(); ++e) {
        const ElementState& el = elems_[static_cast<std::size_t>(e)];
        if (el.mode == ElementMode::Operational) continue;
        result_.failure_snapshot.push_back({e, el.cause, el.mode});
    }
}

void HistorySimulation::validate_counters() const {
    const int n = topology_.element_count();
    std::vector<char> ref_flags(static_cast<std::size_t>(n), 0);
    std::vector<char> vis_flags(static_cast<std::size_t>(n), 0);
    for (int e = 0; e < n; ++e) {
        const ElementMode m = elems_[static_cast<std::size_t>(e)].mode;
        ref_flags[static_cast<std::size_t>(e)] = m != ElementMode::Operational;
        vis_flags[static_cast<std::size_t>(e)] = m == ElementMode::FailedDetected;
    }
    const LevelStatus rs = topology_.evaluate(ref_flags);
    const LevelStatus vs = topology_.evaluate(vis_flags);
    if (rs.system_down != ref_.system_down || vs.system_down != vis_.system_down)
        throw std::logic_error("incremental system state diverged from full recompute");
    for (std::size_t a = 0; a < rs.gapu_down.size(); ++a) {
        const bool inc_ref = ref_.gapu_down_apus[a] >= topology_.config().gapu_vote_k;
        const bool inc_vis = vis_.gapu_down_apus[a] >= topology_.config().gapu_vote_k;
        if (inc_ref != static_cast<bool>(rs.gapu_down[a]) ||
            inc_vis != static_cast<bool>(vs.gapu_down[a]))
            throw std::logic_error("incremental GAPU state diverged from full recompute");
    }
    if (vs.system_down && !rs.system_down)
        throw std::logic_error("visible failure without reference failure");
}

HistoryResult HistorySimulation::run() {
    if (ran_) throw std::logic_error("a history can only run once");
    ran_ = true;

    for (int e = 0; e < topology_.element_count(); ++e) schedule_independent(e);
    if (params_.tests.enabled) {
        const double stagger = params_.tests.period_hours / topology_.division_count();
        for (int d = 0; d < topology_.division_count(); ++d)
            queue_.push({stagger * d, EventKind::PeriodicTest, d, 0});
    }
    if (params_.mu > 0.0)
        queue_.push({next_nonlethal_delay(rng_, params_.mu, params_.rounding),
                     EventKind::NonlethalShock, -1, 0});
    if (params_.omega > 0.0) {
        const double t = next_lethal_delay(rng_, params_.omega, params_.rounding);
        if (t < kInf) queue_.push({t, EventKind::LethalShock, -1, 0});
    }
    const bool uncapped = params_.stop == StopMode::FirstFailureUncapped;
    if (!uncapped) queue_.push({params_.mission_hours, EventKind::MissionEnd, -1, 0});
    // New periodic events are only scheduled up to this time.
    const double horizon =
        uncapped ? params_.mission_hours * kUncappedMissionMultiple : params_.mission_hours;

    while (!queue_.empty()) {
        const Event ev = queue_.top();
        queue_.pop();
        if (ev.time > horizon) {
            advance_time(horizon);  // uncapped survivor hit the safety cap
            break;
        }
        advance_time(ev.time);
        bool mission_over = false;
        switch (ev.kind) {
            case EventKind::RepairDone:
                complete_repair(ev.id);
                break;
            case EventKind::PeriodicTest: {
                apply_periodic_test(ev.id);
                const double next = ev.time + params_.tests.period_hours;
                if (next <= horizon) queue_.push({next, EventKind::PeriodicTest, ev.id, 0});
                break;
            }
            case EventKind::IndependentFailure:
                handle_independent_event(ev);
                break;
            case EventKind::NonlethalShock: {
                apply_nonlethal_shock();
                const double next = ev.time + next_nonlethal_delay(rng_, params_.mu, params_.rounding);
                if (next <= horizon) queue_.push({next, EventKind::NonlethalShock, -1, 0});
                break;
            }
            case EventKind::LethalShock: {
                apply_lethal_shock();
                const double next = ev.time + next_lethal_delay(rng_, params_.omega, params_.rounding);
                if (next <= horizon) queue_.push({next, EventKind::LethalShock, -1, 0});
                break;
            }
            case EventKind::MissionEnd:
                mission_over = true;
                break;
        }
        if (params_.paranoid_checks) validate_counters();
        if (!result_.first_system_failure && ref_.system_down) {
            result_.first_system_failure = now_;
            snapshot_failed_elements();
            if (params_.stop != StopMode::FullMission) break;
        }
        if (mission_over) break;
    }

    result_.end_time = now_;
    return std::move(result_);
}

}  // namespace ccfsim

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <vector>

#include "ccfsim/shock.hpp"
#include "ccfsim/topology.hpp"

// Discrete-event simulation of one mission history. Elements fail independently
// (self-announcing or hidden), non-lethal shocks fail random victim sets at once,
// lethal shocks fail everything. Hidden failures surface at staggered periodic
// tests; detected elements are repaired. Two system states are tracked in
// parallel: the reference state from the true element modes and the visible state
// from detected failures only.
namespace ccfsim {

enum class FailureCause : std::uint8_t {
    IndependentSa = 0,  // independent, self-announcing
    IndependentNsa,     // independent, hidden until a periodic test
    CcfNonlethal,
    CcfLethal,
};
const char* to_string(FailureCause c);

enum class ElementMode : std::uint8_t {
    Operational,
    FailedHidden,    // down in the reference state only
    FailedDetected,  // down in both states; queued for or under repair
};

// Tie-break rank for simultaneous events is the enum value: repairs complete
// before tests run, tests run before new failures, mission end applies last.
enum class EventKind : std::uint8_t {
    RepairDone = 0,
    PeriodicTest,
    IndependentFailure,
    NonlethalShock,
    LethalShock,
    MissionEnd,
};
const char* to_string(EventKind k);

enum class IndependentSampling : std::uint8_t {
    // Separate exponential clocks for the self-announcing and hidden rates; the
    // earlier one fires. Equivalent to one clock at the summed rate with a
    // probability-weighted coin, by competing risks.
    CompetingClocks,
    // One clock at lambda_sa + lambda_nsa; a coverage draw at the failure instant
    // decides whether it announced itself.
    BernoulliSplit,
};

enum class RepairDistribution : std::uint8_t { Fixed, Exponential };
enum class RepairCrews : std::uint8_t { Unlimited, OnePerDivision };

enum class StopMode : std::uint8_t {
    FullMission,           // run to mission end, accumulate downtime ledgers
    FirstFailureCapped,    // end at the first reference-state failure or mission end
    FirstFailureUncapped,  // ignore mission end, run until the system fails
};

struct RepairPolicy {
    RepairDistribution distribution = RepairDistribution::Fixed;
    double hours = 8.0;  // duration when Fixed, mean when Exponential
    RepairCrews crews = RepairCrews::Unlimited;
};

struct TestPolicy {
    bool enabled = true;
    // Each division is tested every period; division d's tests sit at
    // d * period / divisions + k * period, so tests spread evenly over the period.
    double period_hours = 13140.0;
};

struct HistoryParams {
    double lambda_sa = 0.0;   // per element per hour
    double lambda_nsa = 0.0;  // per element per hour
    double coverage = 0.85;   // detection probability for shocks and BernoulliSplit
    double mu = 0.0;
    double omega = 0.0;
    VictimProbabilities victim_probs;  // one entry per element when mu > 0
    DetectionGranularity detection = DetectionGranularity::PerShock;
    IndependentSampling independent_sampling = IndependentSampling::CompetingClocks;
    Rounding rounding = Rounding::Continuous;
    RepairPolicy repair;
    TestPolicy tests;
    double mission_hours = 87600.0;
    StopMode stop = StopMode::FullMission;
    bool collect_rex = false;
    bool paranoid_checks = false;  // cross-check incremental vote state every event
};

// One record per element state change. Shock events with several victims produce
// one record per changed element, in ascending element order; the system flags
// show the state after that element's change, so the last record of an event
// carries the post-event state. Events that change nothing log nothing.
struct RexRecord {
    std::uint64_t history = 0;
    double time = 0.0;
    EventKind kind = EventKind::IndependentFailure;
    std::int32_t element = -1;
    std::int16_t division = -1;
    std::int16_t apu = -1;
    Subsystem subsystem = Subsystem::A;
    FailureCause cause = FailureCause::IndependentSa;
    bool detected_online = false;  // failure records: announced at the instant it happened
    bool system_ref_down = false;
    bool system_vis_down = false;
};

struct FailedElementSnapshot {
    std::int32_t element = -1;
    FailureCause cause = FailureCause::IndependentSa;
    ElementMode mode = ElementMode::FailedHidden;
};

struct EventCounts {
    std::uint64_t independent_failures = 0;  // element state changes, by kind
    std::uint64_t nonlethal_victims = 0;
    std::uint64_t lethal_victims = 0;
    std::uint64_t revealed_by_test = 0;
    std::uint64_t repairs_completed = 0;
    std::uint64_t nonlethal_shocks = 0;  // shocks fired, including zero-victim ones
    std::uint64_t lethal_shocks = 0;

    // Every REX record corresponds to exactly one of the five state-change counts.
    std::uint64_t state_changes() const {
        return independent_failures + nonlethal_victims + lethal_victims + revealed_by_test +
               repairs_completed;
    }
};

struct HistoryResult {
    std::uint64_t index = 0;
    double mission_hours = 0.0;
    double end_time = 0.0;                // mission end, or the failure instant in stop modes
    double reference_downtime = 0.0;      // hours the true system state was failed
    double visible_downtime = 0.0;        // hours the detected state was failed
    std::optional<double> first_system_failure;  // reference-state failure instant
    EventCounts counts;
    // Elements down at the first system failure, complete event applied; used for
    // failure-combination classification.
    std::vector<FailedElementSnapshot> failure_snapshot;
    std::vector<RexRecord> rex;  // filled only when collect_rex
};

class HistorySimulation {
public:
    HistorySimulation(const Topology& topology, const HistoryParams& params,
                      std::uint64_t history_index, std::uint64_t master_seed);

    // Drives the event queue to completion. Call at most once.
    HistoryResult run();

    // Atomic transitions, public so scenario tests can drive the model directly.
    // fail_element returns false when the failure is absorbed (element already
    // down: no mode change, no reveal, cause kept).
    bool fail_element(int element, FailureCause cause, bool detected_online);
    int apply_periodic_test(int division);  // reveals hidden failures, returns count
    void complete_repair(int element);
    void advance_time(double t);  // integrates downtime ledgers up to t >= now()

    double now() const { return now_; }
    ElementMode element_mode(int element) const;
    FailureCause element_cause(int element) const;
    bool reference_down() const { return ref_.system_down; }
    bool visible_down() const { return vis_.system_down; }
    const HistoryResult& partial_result() const { return result_; }

private:
    struct Event {
        double time = 0.0;
        EventKind kind = EventKind::MissionEnd;
        std::int32_t id = -1;       // element for failures/repairs, division for tests
        std::uint32_t seq = 0;      // element sequence stamp, guards stale failure clocks
    };
    struct LaterEvent {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.kind != b.kind) return a.kind > b.kind;
            return a.id > b.id;
        }
    };

    struct ElementState {
        ElementMode mode = ElementMode::Operational;
        FailureCause cause = FailureCause::IndependentSa;
        bool pending_sa = false;     // CompetingClocks: which clock won the next event
        bool repair_running = false;
        std::uint32_t seq = 0;       // bumped on repair completion
    };

    struct VoteCounters {
        std::vector<std::uint16_t> apu_down_elems;  // per flat APU index
        std::vector<std::uint16_t> gapu_down_apus;  // per APU column
        int subsys_down_gapus[2] = {0, 0};
        bool system_down = false;
    };

    void schedule_independent(int element);
    void schedule_repair(int element);
    void start_repair(int element);
    void apply_nonlethal_shock();
    void apply_lethal_shock();
    void handle_independent_event(const Event& ev);
    void raise(VoteCounters& c, int element);
    void lower(VoteCounters& c, int element);
    void refresh_system_flag(VoteCounters& c) const;
    void log_rex(EventKind kind, int element, FailureCause cause, bool detected_online);
    void snapshot_failed_elements();
    void validate_counters() const;

    const Topology& topology_;
    const HistoryParams& params_;
    RandomStream rng_;
    double now_ = 0.0;
    std::priority_queue<Event, std::vector<Event>, LaterEvent> queue_;
    std::vector<ElementState> elems_;
    std::vector<std::vector<int>> division_elements_;
    VoteCounters ref_, vis_;
    std::vector<char> crew_busy_;              // OnePerDivision
    std::vector<std::deque<int>> crew_wait_;   // OnePerDivision, FIFO per division
    HistoryResult result_;
    bool ran_ = false;
};

}  // namespace ccfsim

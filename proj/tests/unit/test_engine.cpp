#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "ccfsim/campaign.hpp"
#include "ccfsim/engine.hpp"

using namespace ccfsim;

namespace {

// Four single-element divisions voting 1-out-of-4: the system is a series chain
// of four elements, the smallest shape where every vote level does something.
TopologyConfig series4_config() {
    TopologyConfig cfg;
    cfg.divisions = 4;
    cfg.apus_per_division = 1;
    cfg.subsystem_of_apu = {Subsystem::A};
    cfg.c2_cards_per_apu = {0};
    cfg.gapu_vote_k = 1;
    return cfg;
}

HistoryParams quiet_params() {
    HistoryParams p;
    p.lambda_sa = 0.0;
    p.lambda_nsa = 0.0;
    p.mu = 0.0;
    p.omega = 0.0;
    p.tests.enabled = true;
    p.paranoid_checks = true;
    return p;
}

// Replays the event log from scratch with the full-recompute evaluator and
// reintegrates both downtime ledgers. Independent of the engine's incremental
// state, so it cross-checks ledgers, record ordering and the logged system flags.
void check_history_against_rex(const Topology& topo, const HistoryResult& h) {
    const int n = topo.element_count();
    std::vector<char> ref(n, 0), vis(n, 0);
    double t_prev = 0.0, ref_dt = 0.0, vis_dt = 0.0;
    for (const RexRecord& r : h.rex) {
        REQUIRE(r.time >= t_prev);
        if (topo.evaluate(ref).system_down) ref_dt += r.time - t_prev;
        if (topo.evaluate(vis).system_down) vis_dt += r.time - t_prev;
        t_prev = r.time;
        const std::size_t e = static_cast<std::size_t>(r.element);
        switch (r.kind) {
            case EventKind::IndependentFailure:
            case EventKind::NonlethalShock:
            case EventKind::LethalShock:
                REQUIRE_FALSE(ref[e]);
                ref[e] = 1;
                vis[e] = r.detected_online ? 1 : 0;
                break;
            case EventKind::PeriodicTest:
                REQUIRE(ref[e]);
                REQUIRE_FALSE(vis[e]);
                vis[e] = 1;
                break;
            case EventKind::RepairDone:
                REQUIRE(ref[e]);
                REQUIRE(vis[e]);
                ref[e] = 0;
                vis[e] = 0;
                break;
            default:
                FAIL("unexpected record kind");
        }
        CHECK(topo.evaluate(ref).system_down == r.system_ref_down);
        CHECK(topo.evaluate(vis).system_down == r.system_vis_down);
    }
    if (topo.evaluate(ref).system_down) ref_dt += h.end_time - t_prev;
    if (topo.evaluate(vis).system_down) vis_dt += h.end_time - t_prev;
    CHECK(h.reference_downtime == doctest::Approx(ref_dt).epsilon(1e-9));
    CHECK(h.visible_downtime == doctest::Approx(vis_dt).epsilon(1e-9));
    CHECK(h.counts.state_changes() == h.rex.size());
}

}  // namespace

TEST_CASE("a history with all rates zero does nothing") {
    const Topology topo{TopologyConfig{}};
    HistoryParams p = quiet_params();
    p.collect_rex = true;
    HistorySimulation sim(topo, p, 0, 42);
    const HistoryResult h = sim.run();
    CHECK(h.end_time == 87600.0);
    CHECK(h.reference_downtime == 0.0);
    CHECK(h.visible_downtime == 0.0);
    CHECK_FALSE(h.first_system_failure.has_value());
    CHECK(h.rex.empty());
    CHECK(h.counts.state_changes() == 0);
}

TEST_CASE("zero victim probability means shocks change nothing") {
    const Topology topo{TopologyConfig{}};
    HistoryParams p = quiet_params();
    p.mu = 1e-2;  // ~876 shocks, all without victims
    p.victim_probs = VictimProbabilities::uniform(40, 0.0);
    p.collect_rex = true;
    HistorySimulation sim(topo, p, 1, 42);
    const HistoryResult h = sim.run();
    CHECK(h.counts.nonlethal_shocks > 500);
    CHECK(h.counts.nonlethal_victims == 0);
    CHECK(h.rex.empty());
    CHECK(h.reference_downtime == 0.0);
}

TEST_CASE("element transitions: absorption, reveal, repair") {
    const Topology topo{series4_config()};
    HistoryParams p = quiet_params();
    HistorySimulation sim(topo, p, 0, 1);

    // Hidden independent failure takes the reference system down (series chain)
    // but stays invisible.
    CHECK(sim.fail_element(0, FailureCause::IndependentNsa, false));
    CHECK(sim.element_mode(0) == ElementMode::FailedHidden);
    CHECK(sim.reference_down());
    CHECK_FALSE(sim.visible_down());

    // A lethal shock hitting the already-failed element is absorbed: the stored
    // cause survives and the element is not revealed.
    CHECK_FALSE(sim.fail_element(0, FailureCause::CcfLethal, true));
    CHECK(sim.element_mode(0) == ElementMode::FailedHidden);
    CHECK(sim.element_cause(0) == FailureCause::IndependentNsa);
    CHECK_FALSE(sim.visible_down());

    // The periodic test reveals it, preserving the original cause.
    CHECK(sim.apply_periodic_test(0) == 1);
    CHECK(sim.element_mode(0) == ElementMode::FailedDetected);
    CHECK(sim.element_cause(0) == FailureCause::IndependentNsa);
    CHECK(sim.visible_down());
    CHECK(sim.apply_periodic_test(0) == 0);  // nothing left to reveal

    // Ledgers integrate while down.
    sim.advance_time(5.0);
    CHECK(sim.partial_result().reference_downtime == 5.0);
    CHECK(sim.partial_result().visible_downtime == 5.0);

    sim.complete_repair(0);
    CHECK(sim.element_mode(0) == ElementMode::Operational);
    CHECK_FALSE(sim.reference_down());
    CHECK_THROWS_AS(sim.complete_repair(0), std::logic_error);
    CHECK_THROWS_AS(sim.advance_time(1.0), std::logic_error);  // time cannot rewind
}

TEST_CASE("downtime ledger matches a replay of the event log") {
    TopologyConfig cfg;  // default plant
    const Topology topo{cfg};
    HistoryParams p = quiet_params();
    // Rates inflated far above the nominal point so failures, reveals, shocks and
    // repairs all occur in almost every history.
    p.lambda_sa = 4e-4;
    p.lambda_nsa = 1e-4;
    p.mu = 1e-4;
    p.omega = 1e-5;
    p.victim_probs = VictimProbabilities::uniform(40, 0.2);
    p.repair.hours = 50.0;
    p.collect_rex = true;
    for (std::uint64_t i = 0; i < 50; ++i) {
        HistorySimulation sim(topo, p, i, 9001);
        const HistoryResult h = sim.run();
        check_history_against_rex(topo, h);
        CHECK(h.visible_downtime <= h.reference_downtime + 1e-12);
        CHECK(h.reference_downtime <= h.mission_hours);
    }
}

TEST_CASE("event log replay holds under exponential repairs and a single crew") {
    const Topology topo{TopologyConfig{}};
    HistoryParams p = quiet_params();
    p.lambda_sa = 4e-4;
    p.lambda_nsa = 2e-4;
    p.mu = 5e-5;
    p.omega = 0.0;
    p.victim_probs = VictimProbabilities::uniform(40, 0.33);
    p.repair.distribution = RepairDistribution::Exponential;
    p.repair.hours = 30.0;
    p.repair.crews = RepairCrews::OnePerDivision;
    p.collect_rex = true;
    for (std::uint64_t i = 0; i < 30; ++i) {
        HistorySimulation sim(topo, p, i, 512);
        const HistoryResult h = sim.run();
        check_history_against_rex(topo, h);
    }
}

TEST_CASE("steady-state unavailability of a series chain matches renewal theory") {
    // Four independent elements, each up Exp(1/500 h) and down a fixed 8 h:
    // q = 8 / 508 per element, system unavailability 1 - (1-q)^4.
    const Topology topo{series4_config()};
    CampaignParams params;
    params.history = quiet_params();
    params.history.paranoid_checks = false;
    params.history.lambda_sa = 2e-3;
    params.history.tests.enabled = false;
    params.histories = 10000;
    params.master_seed = 777;
    params.jobs = 2;
    const CampaignResult res = run_campaign(topo, params);
    CHECK(res.pfd.reference.mean == doctest::Approx(0.06151968358248816).epsilon(0.02));
    // Every failure announces itself, so both ledgers agree history by history.
    for (const HistoryResult& h : res.histories)
        CHECK(h.visible_downtime == h.reference_downtime);
}

TEST_CASE("steady-state unavailability of a single element is lambda*tau/(1+lambda*tau)") {
    TopologyConfig cfg = series4_config();
    cfg.divisions = 1;
    const Topology topo{cfg};
    CampaignParams params;
    params.history = quiet_params();
    params.history.lambda_sa = 2e-3;
    params.history.tests.enabled = false;
    params.histories = 4000;
    params.master_seed = 31;
    params.jobs = 1;
    const CampaignResult res = run_campaign(topo, params);
    CHECK(res.pfd.reference.mean == doctest::Approx(0.015748031496062992).epsilon(0.03));
}

TEST_CASE("periodic tests run on the staggered division schedule") {
    const Topology topo{TopologyConfig{}};
    HistoryParams p = quiet_params();
    p.lambda_nsa = 5e-4;  // hidden failures only, so tests have work to do
    p.collect_rex = true;
    std::uint64_t reveals = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        HistorySimulation sim(topo, p, i, 2025);
        const HistoryResult h = sim.run();
        for (const RexRecord& r : h.rex) {
            if (r.kind != EventKind::PeriodicTest) continue;
            ++reveals;
            // Division d is tested at 3285*d + 13140*m, nowhere else.
            CHECK(std::fmod(r.time, 13140.0) == 3285.0 * r.division);
            CHECK(r.cause == FailureCause::IndependentNsa);
            CHECK_FALSE(r.detected_online);
        }
    }
    CHECK(reveals > 100);
}

TEST_CASE("paper rounding keeps every event on whole hours") {
    const Topology topo{TopologyConfig{}};
    HistoryParams p = quiet_params();
    p.lambda_sa = 2e-4;
    p.lambda_nsa = 1e-4;
    p.mu = 1e-4;
    p.victim_probs = VictimProbabilities::uniform(40, 0.2);
    p.rounding = Rounding::Paper;
    p.collect_rex = true;
    HistorySimulation sim(topo, p, 0, 4096);
    const HistoryResult h = sim.run();
    REQUIRE(h.rex.size() > 50);
    for (const RexRecord& r : h.rex) CHECK(r.time == std::floor(r.time));
}

TEST_CASE("zero-length repairs contribute zero downtime") {
    const Topology topo{series4_config()};
    HistoryParams p = quiet_params();
    p.lambda_sa = 1e-3;
    p.repair.hours = 0.0;
    p.tests.enabled = false;
    HistorySimulation sim(topo, p, 0, 5);
    const HistoryResult h = sim.run();
    CHECK(h.counts.independent_failures > 100);
    CHECK(h.counts.repairs_completed == h.counts.independent_failures);
    CHECK(h.reference_downtime == 0.0);
}

TEST_CASE("a single crew per division serializes repairs") {
    TopologyConfig cfg;
    cfg.divisions = 1;
    cfg.apus_per_division = 3;
    cfg.subsystem_of_apu = {Subsystem::A, Subsystem::A, Subsystem::A};
    cfg.c2_cards_per_apu = {0, 0, 0};
    cfg.gapu_vote_k = 1;
    const Topology topo{cfg};

    HistoryParams p = quiet_params();
    p.lambda_sa = 1e-2;  // overlapping repair demand is common at this rate
    p.tests.enabled = false;
    p.repair.hours = 8.0;
    p.repair.crews = RepairCrews::OnePerDivision;
    p.collect_rex = true;

    bool saw_queueing = false;
    for (std::uint64_t i = 0; i < 50; ++i) {
        HistorySimulation sim(topo, p, i, 321);
        const HistoryResult h = sim.run();
        std::vector<double> completions;
        for (const RexRecord& r : h.rex)
            if (r.kind == EventKind::RepairDone) completions.push_back(r.time);
        for (std::size_t k = 1; k < completions.size(); ++k) {
            const double gap = completions[k] - completions[k - 1];
            CHECK(gap >= 8.0 - 1e-9);
            if (gap < 8.0 + 1e-9) saw_queueing = true;
        }
    }
    // Back-to-back completions exactly 8 h apart prove the queue actually formed.
    CHECK(saw_queueing);
}

TEST_CASE("stop at first failure, uncapped") {
    const Topology topo{series4_config()};
    HistoryParams p = quiet_params();
    p.lambda_sa = 1e-4;
    p.tests.enabled = false;
    p.stop = StopMode::FirstFailureUncapped;
    HistorySimulation sim(topo, p, 0, 9);
    const HistoryResult h = sim.run();
    REQUIRE(h.first_system_failure.has_value());
    CHECK(h.end_time == *h.first_system_failure);
    // The system was never down before its first failure.
    CHECK(h.reference_downtime == 0.0);
    CHECK(h.visible_downtime == 0.0);
    REQUIRE_FALSE(h.failure_snapshot.empty());
    std::vector<char> down(4, 0);
    for (const FailedElementSnapshot& s : h.failure_snapshot)
        down[static_cast<std::size_t>(s.element)] = 1;
    CHECK(topo.evaluate(down).system_down);
}

TEST_CASE("stop at first failure, capped by the mission") {
    const Topology topo{series4_config()};
    HistoryParams p = quiet_params();
    p.lambda_sa = 1e-9;  // essentially never fails within one mission
    p.tests.enabled = false;
    p.stop = StopMode::FirstFailureCapped;
    HistorySimulation sim(topo, p, 0, 10);
    const HistoryResult h = sim.run();
    CHECK_FALSE(h.first_system_failure.has_value());
    CHECK(h.end_time == 87600.0);
}

TEST_CASE("competing clocks and bernoulli splitting agree in distribution") {
    const Topology topo{series4_config()};
    CampaignParams params;
    params.history = quiet_params();
    params.history.paranoid_checks = false;
    params.history.lambda_sa = 1.7e-3;
    params.history.lambda_nsa = 3e-4;
    params.history.coverage = 1.7e-3 / 2e-3;  // must match the rate split
    params.histories = 4000;
    params.master_seed = 88;
    params.jobs = 2;

    params.history.independent_sampling = IndependentSampling::CompetingClocks;
    const CampaignResult a = run_campaign(topo, params);
    params.history.independent_sampling = IndependentSampling::BernoulliSplit;
    const CampaignResult b = run_campaign(topo, params);
    CHECK(a.mean_independent_failures ==
          doctest::Approx(b.mean_independent_failures).epsilon(0.02));
    CHECK(a.pfd.reference.mean == doctest::Approx(b.pfd.reference.mean).epsilon(0.06));
}

TEST_CASE("identical seeds reproduce a history bit for bit") {
    const Topology topo{TopologyConfig{}};
    HistoryParams p = quiet_params();
    p.lambda_sa = 4e-4;
    p.lambda_nsa = 1e-4;
    p.mu = 1e-4;
    p.omega = 1e-5;
    p.victim_probs = VictimProbabilities::uniform(40, 0.2);
    p.collect_rex = true;
    HistorySimulation sim1(topo, p, 3, 606);
    HistorySimulation sim2(topo, p, 3, 606);
    const HistoryResult a = sim1.run();
    const HistoryResult b = sim2.run();
    CHECK(a.reference_downtime == b.reference_downtime);
    CHECK(a.visible_downtime == b.visible_downtime);
    CHECK(a.counts.state_changes() == b.counts.state_changes());
    REQUIRE(a.rex.size() == b.rex.size());
    for (std::size_t i = 0; i < a.rex.size(); ++i) {
        CHECK(a.rex[i].time == b.rex[i].time);
        CHECK(a.rex[i].element == b.rex[i].element);
        CHECK(a.rex[i].kind == b.rex[i].kind);
    }
}

TEST_CASE("campaign results do not depend on the worker count") {
    const Topology topo{TopologyConfig{}};
    CampaignParams params;
    params.history = quiet_params();
    params.history.paranoid_checks = false;
    params.history.lambda_sa = 4e-4;
    params.history.lambda_nsa = 1e-4;
    params.history.mu = 1e-4;
    params.history.victim_probs = VictimProbabilities::uniform(40, 0.2);
    params.histories = 300;
    params.master_seed = 14;

    params.jobs = 1;
    const CampaignResult serial = run_campaign(topo, params);
    params.jobs = 3;
    const CampaignResult parallel = run_campaign(topo, params);
    REQUIRE(serial.histories.size() == parallel.histories.size());
    for (std::size_t i = 0; i < serial.histories.size(); ++i) {
        CHECK(serial.histories[i].reference_downtime == parallel.histories[i].reference_downtime);
        CHECK(serial.histories[i].visible_downtime == parallel.histories[i].visible_downtime);
        CHECK(serial.histories[i].counts.state_changes() ==
              parallel.histories[i].counts.state_changes());
    }
    CHECK(serial.mean_independent_failures == parallel.mean_independent_failures);
}

TEST_CASE("lethal shocks take the whole system down visibly") {
    const Topology topo{TopologyConfig{}};
    HistoryParams p = quiet_params();
    p.omega = 1e-3;  // ~88 lethal shocks per mission
    p.repair.hours = 8.0;
    HistorySimulation sim(topo, p, 0, 77);
    const HistoryResult h = sim.run();
    CHECK(h.counts.lethal_shocks > 30);
    // All 40 repairs run in parallel and finish together, so a shock finds either
    // everything up (40 victims) or everything down (fully absorbed).
    CHECK(h.counts.lethal_victims % 40 == 0);
    CHECK(h.counts.lethal_victims >= 40 * 30);
    CHECK(h.reference_downtime > 0.0);
    // Lethal shocks are always announced, so both states match exactly.
    CHECK(h.visible_downtime == h.reference_downtime);
    REQUIRE(h.first_system_failure.has_value());
}

TEST_CASE("engine parameter validation") {
    const Topology topo{TopologyConfig{}};
    HistoryParams p = quiet_params();
    p.mu = 1e-4;  // victim probabilities missing
    CHECK_THROWS_AS(HistorySimulation(topo, p, 0, 1), DomainError);
    p = quiet_params();
    p.coverage = 1.5;
    CHECK_THROWS_AS(HistorySimulation(topo, p, 0, 1), DomainError);
    p = quiet_params();
    p.mission_hours = 0.0;
    CHECK_THROWS_AS(HistorySimulation(topo, p, 0, 1), DomainError);
    p = quiet_params();
    p.repair.distribution = RepairDistribution::Exponential;
    p.repair.hours = 0.0;
    CHECK_THROWS_AS(HistorySimulation(topo, p, 0, 1), DomainError);
    p = quiet_params();
    p.lambda_sa = -1.0;
    CHECK_THROWS_AS(HistorySimulation(topo, p, 0, 1), DomainError);
}

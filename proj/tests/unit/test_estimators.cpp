#include <cmath>
#include <vector>

#include <doctest.h>

#include "ccfsim/campaign.hpp"
#include "ccfsim/estimators.hpp"

using namespace ccfsim;

namespace {

HistoryResult history_with(double mission, double ref_dt, double vis_dt) {
    HistoryResult h;
    h.mission_hours = mission;
    h.end_time = mission;
    h.reference_downtime = ref_dt;
    h.visible_downtime = vis_dt;
    return h;
}

FailedElementSnapshot failed(int element, FailureCause cause) {
    return {element, cause, ElementMode::FailedDetected};
}

// C1 element id of (division, apu_column) in the default 40-element plant.
constexpr int c1(int division, int apu) { return division * 10 + apu * 2; }

}  // namespace

TEST_CASE("mean estimate over a hand sample") {
    const std::vector<double> values = {1.0, 2.0, 3.0, 4.0};
    const MeanEstimate est = mean_estimate(values);
    CHECK(est.n == 4);
    CHECK(est.mean == doctest::Approx(2.5));
    // Sample std dev sqrt(5/3), halved for the standard error of the mean.
    const double se = std::sqrt(5.0 / 3.0) / 2.0;
    CHECK(est.std_error == doctest::Approx(se));
    CHECK(est.ci_low == doctest::Approx(2.5 - 1.96 * se));
    CHECK(est.ci_high == doctest::Approx(2.5 + 1.96 * se));

    const std::vector<double> one = {7.0};
    const MeanEstimate single = mean_estimate(one);
    CHECK(single.mean == 7.0);
    CHECK(single.std_error == 0.0);
    CHECK(single.ci_low == 7.0);

    CHECK_THROWS_AS(mean_estimate(std::vector<double>{}), DomainError);
}

TEST_CASE("PFD is the mean downtime fraction") {
    std::vector<HistoryResult> hs;
    hs.push_back(history_with(100.0, 10.0, 0.0));
    hs.push_back(history_with(100.0, 30.0, 10.0));
    const PfdEstimates pfd = estimate_pfd(hs);
    CHECK(pfd.reference.mean == doctest::Approx(0.2));
    CHECK(pfd.visible.mean == doctest::Approx(0.05));
    CHECK(pfd.reference.n == 2);
    CHECK_THROWS_AS(estimate_pfd(std::vector<HistoryResult>{}), DomainError);
}

TEST_CASE("minimal failed set drops elements the vote does not need") {
    const Topology topo{TopologyConfig{}};

    // Three divisions of APU column 0 are exactly the vote threshold.
    std::vector<FailedElementSnapshot> snap = {
        failed(c1(0, 0), FailureCause::IndependentSa),
        failed(c1(1, 0), FailureCause::IndependentSa),
        failed(c1(2, 0), FailureCause::IndependentSa),
    };
    CHECK(minimal_failed_set(topo, snap) == std::vector<int>{c1(0, 0), c1(1, 0), c1(2, 0)});

    // An extra element elsewhere is not needed and gets dropped.
    snap.push_back(failed(c1(0, 2), FailureCause::CcfNonlethal));
    CHECK(minimal_failed_set(topo, snap) == std::vector<int>{c1(0, 0), c1(1, 0), c1(2, 0)});

    // With all four divisions down, greedy removal in ascending order drops the
    // lowest id first and keeps the remaining three.
    snap = {
        failed(c1(0, 0), FailureCause::IndependentSa),
        failed(c1(1, 0), FailureCause::IndependentSa),
        failed(c1(2, 0), FailureCause::IndependentSa),
        failed(c1(3, 0), FailureCause::IndependentSa),
    };
    CHECK(minimal_failed_set(topo, snap) == std::vector<int>{c1(1, 0), c1(2, 0), c1(3, 0)});

    // C1 and its C2 block both down in one APU: the C1 is redundant because the
    // C2 keeps that APU failed.
    snap = {
        failed(c1(0, 0), FailureCause::IndependentSa),
        failed(c1(0, 0) + 1, FailureCause::IndependentNsa),
        failed(c1(1, 0), FailureCause::IndependentSa),
        failed(c1(2, 0), FailureCause::IndependentSa),
    };
    CHECK(minimal_failed_set(topo, snap) ==
          std::vector<int>{c1(0, 0) + 1, c1(1, 0), c1(2, 0)});

    // A snapshot that does not fail the system is a caller error.
    snap = {failed(0, FailureCause::IndependentSa)};
    CHECK_THROWS_AS(minimal_failed_set(topo, snap), DomainError);
    CHECK_THROWS_AS(classify_combination(topo, snap), DomainError);
}

TEST_CASE("failure combinations classify by the causes in the minimal set") {
    const Topology topo{TopologyConfig{}};
    const auto classify = [&](FailureCause a, FailureCause b, FailureCause c) {
        const std::vector<FailedElementSnapshot> snap = {
            failed(c1(0, 0), a), failed(c1(1, 0), b), failed(c1(2, 0), c)};
        return classify_combination(topo, snap);
    };
    using FC = FailureCause;
    CHECK(classify(FC::CcfNonlethal, FC::CcfNonlethal, FC::CcfNonlethal) ==
          CombinationClass::CcfAlone);
    CHECK(classify(FC::CcfLethal, FC::CcfLethal, FC::CcfLethal) == CombinationClass::CcfAlone);
    CHECK(classify(FC::IndependentSa, FC::IndependentSa, FC::IndependentSa) ==
          CombinationClass::IndependentSaOnly);
    CHECK(classify(FC::IndependentNsa, FC::IndependentNsa, FC::IndependentNsa) ==
          CombinationClass::IndependentNsaOnly);
    CHECK(classify(FC::IndependentSa, FC::IndependentNsa, FC::IndependentSa) ==
          CombinationClass::IndependentSaAndNsa);
    CHECK(classify(FC::CcfNonlethal, FC::IndependentSa, FC::IndependentSa) ==
          CombinationClass::CcfPlusSa);
    CHECK(classify(FC::CcfNonlethal, FC::IndependentNsa, FC::IndependentNsa) ==
          CombinationClass::CcfPlusNsa);
    // All three kinds at once: the hidden participant wins the label.
    CHECK(classify(FC::CcfNonlethal, FC::IndependentSa, FC::IndependentNsa) ==
          CombinationClass::CcfPlusNsa);

    // A CCF victim outside the minimal set must not color the classification.
    const std::vector<FailedElementSnapshot> snap = {
        failed(c1(0, 0), FailureCause::IndependentSa),
        failed(c1(0, 2), FailureCause::CcfNonlethal),  // different GAPU, dropped
        failed(c1(1, 0), FailureCause::IndependentSa),
        failed(c1(2, 0), FailureCause::IndependentSa),
    };
    CHECK(classify_combination(topo, snap) == CombinationClass::IndependentSaOnly);
}

TEST_CASE("combination labels are stable") {
    CHECK(std::string(to_string(CombinationClass::CcfAlone)) == "ccf_alone");
    CHECK(std::string(to_string(CombinationClass::IndependentSaOnly)) == "independent_sa");
    CHECK(std::string(to_string(CombinationClass::IndependentNsaOnly)) == "independent_nsa");
    CHECK(std::string(to_string(CombinationClass::IndependentSaAndNsa)) == "independent_sa_nsa");
    CHECK(std::string(to_string(CombinationClass::CcfPlusSa)) == "ccf_plus_sa");
    CHECK(std::string(to_string(CombinationClass::CcfPlusNsa)) == "ccf_plus_nsa");
}

TEST_CASE("mean time to first failure splits failing from surviving histories") {
    std::vector<HistoryResult> hs;
    hs.push_back(history_with(87600.0, 0.0, 0.0));
    hs.back().first_system_failure = 100.0;
    hs.push_back(history_with(87600.0, 0.0, 0.0));  // survivor
    hs.push_back(history_with(87600.0, 0.0, 0.0));
    hs.back().first_system_failure = 300.0;
    const auto est = mttff(hs);
    REQUIRE(est.has_value());
    CHECK(est->time_to_failure.mean == doctest::Approx(200.0));
    CHECK(est->failing == 2);
    CHECK(est->surviving == 1);

    const std::vector<HistoryResult> none = {history_with(87600.0, 0.0, 0.0)};
    CHECK_FALSE(mttff(none).has_value());
}

TEST_CASE("rate estimation pipeline recovers the independent rate it simulated") {
    const Topology topo{TopologyConfig{}};
    CampaignParams params;
    const double lambda = 2.35e-6;
    params.history.coverage = 0.85;
    params.history.lambda_sa = 0.85 * lambda;
    params.history.lambda_nsa = lambda - params.history.lambda_sa;
    params.histories = 2000;
    params.master_seed = 4242;
    params.jobs = 2;
    const PipelineResult r =
        estimate_params_pipeline(topo, params, 0.405, 5e-3, 0.2, atwood::SumVariant::CoefficientFree);

    // 40 elements for 87600 h at 2.35e-6/h give about 8.2 failures per history.
    CHECK(r.mean_independent_failures == doctest::Approx(8.2).epsilon(0.06));
    CHECK(r.gamma == doctest::Approx(0.9949820554220569));
    CHECK(r.rates.lambda_ind == doctest::Approx(lambda).epsilon(0.05));
    // The scaling from the independent rate to the shock rates is exact.
    CHECK(r.rates.lambda_total == doctest::Approx(r.rates.lambda_ind / r.gamma));
    CHECK(r.rates.mu == doctest::Approx(0.405 * r.rates.lambda_total));
    CHECK(r.rates.omega == doctest::Approx(5e-3 * r.rates.lambda_total));
}

#include "ccfsim/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace ccfsim {

CampaignResult run_campaign(const Topology& topology, const CampaignParams& params) {
    if (params.histories < 1) throw DomainError("a campaign needs at least one history");
    // Construct once up front so parameter errors surface before any thread starts.
    { HistorySimulation probe(topology, params.history, 0, params.master_seed); }

    CampaignResult out;
    out.histories.resize(params.histories);

    const unsigned hw = std::thread::hardware_concurrency();
    const unsigned requested = params.jobs > 0 ? static_cast<unsigned>(params.jobs)
                                               : (hw > 0 ? hw : 1);
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(requested, params.histories));

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto work = [&] {
        try {
            while (true) {
                const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= params.histories) break;
                HistorySimulation sim(topology, params.history, i, params.master_seed);
                out.histories[i] = sim.run();
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(params.histories);  // drain remaining work
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Index-order reduction.
    out.pfd = estimate_pfd(out.histories);
    out.time_to_failure = mttff(out.histories);
    double independent_sum = 0.0;
    for (const HistoryResult& h : out.histories) {
        independent_sum += static_cast<double>(h.counts.independent_failures);
        out.total_counts.independent_failures += h.counts.independent_failures;
        out.total_counts.nonlethal_victims += h.counts.nonlethal_victims;
        out.total_counts.lethal_victims += h.counts.lethal_victims;
        out.total_counts.revealed_by_test += h.counts.revealed_by_test;
        out.total_counts.repairs_completed += h.counts.repairs_completed;
        out.total_counts.nonlethal_shocks += h.counts.nonlethal_shocks;
        out.total_counts.lethal_shocks += h.counts.lethal_shocks;
        if (!h.failure_snapshot.empty())
            ++out.combinations[classify_combination(topology, h.failure_snapshot)];
    }
    out.mean_independent_failures = independent_sum / static_cast<double>(params.histories);
    return out;
}

PipelineResult estimate_params_pipeline(const Topology& topology, const CampaignParams& params,
                                        double alpha, double beta, double rho,
                                        atwood::SumVariant variant) {
    CampaignParams measured = params;
    measured.history.mu = 0.0;
    measured.history.omega = 0.0;
    measured.history.victim_probs.prob.clear();
    measured.history.stop = StopMode::FullMission;

    const CampaignResult campaign = run_campaign(topology, measured);

    PipelineResult r;
    r.mean_independent_failures = campaign.mean_independent_failures;
    r.gamma = atwood::gamma_ratio(topology.element_count(), alpha, beta, rho, variant);
    r.rates = atwood::estimate_rates_from_counts(r.mean_independent_failures,
                                                 topology.element_count(),
                                                 params.history.mission_hours, alpha, beta,
                                                 r.gamma);
    return r;
}

}  // namespace ccfsim

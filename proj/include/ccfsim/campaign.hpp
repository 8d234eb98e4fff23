#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ccfsim/atwood.hpp"
#include "ccfsim/engine.hpp"
#include "ccfsim/estimators.hpp"

// Runs many independent histories, optionally across threads, and reduces them.
// History i always uses seed derived from (master_seed, i), and the reduction
// walks results in index order, so outputs are identical for any thread count.
namespace ccfsim {

struct CampaignParams {
    HistoryParams history;
    std::uint64_t histories = 10000;
    std::uint64_t master_seed = 1;
    int jobs = 0;  // 0 = hardware concurrency
};

struct CampaignResult {
    std::vector<HistoryResult> histories;  // index order
    PfdEstimates pfd;
    std::optional<MttffEstimate> time_to_failure;
    // Failing histories by the combination that took the system down.
    std::map<CombinationClass, std::uint64_t> combinations;
    double mean_independent_failures = 0.0;  // per history
    EventCounts total_counts;
};

CampaignResult run_campaign(const Topology& topology, const CampaignParams& params);

struct PipelineResult {
    double mean_independent_failures = 0.0;
    double gamma = 1.0;
    atwood::EstimatedRates rates;
};

// Shock-free measurement campaign: count independent failures per history, then
// invert the mean into lambda_ind, mu and omega through the situation fractions.
PipelineResult estimate_params_pipeline(const Topology& topology, const CampaignParams& params,
                                        double alpha, double beta, double rho,
                                        atwood::SumVariant variant);

}  // namespace ccfsim

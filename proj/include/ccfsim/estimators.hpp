#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ccfsim/engine.hpp"

// Statistics over collections of simulated histories.
namespace ccfsim {

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
    double ci_low = 0.0;     // normal 95% interval: mean -/+ 1.96 * std_error
    double ci_high = 0.0;
    std::uint64_t n = 0;
};

MeanEstimate mean_estimate(std::span<const double> values);

struct PfdEstimates {
    MeanEstimate reference;  // mean fraction of the mission the true state was down
    MeanEstimate visible;    // same for the detected state
};

PfdEstimates estimate_pfd(std::span<const HistoryResult> histories);

// What combination of element failures took the system down. CCF means at least
// one shock victim is in the minimal set; SA/NSA refer to independent failures by
// detection. Mixed sets with a CCF member classify as CcfPlusNsa when any hidden
// independent failure participates, else CcfPlusSa.
enum class CombinationClass : std::uint8_t {
    CcfAlone = 0,
    IndependentSaOnly,
    IndependentNsaOnly,
    IndependentSaAndNsa,
    CcfPlusSa,
    CcfPlusNsa,
};
const char* to_string(CombinationClass c);
inline constexpr int kCombinationClassCount = 6;

// Minimal subset of the snapshot that still fails the vote: greedy removal in
// ascending element order (an element is dropped when the system stays failed
// without it). Deterministic; requires the snapshot to fail the system.
std::vector<int> minimal_failed_set(const Topology& topology,
                                    std::span<const FailedElementSnapshot> snapshot);

CombinationClass classify_combination(const Topology& topology,
                                      std::span<const FailedElementSnapshot> snapshot);

struct MttffEstimate {
    MeanEstimate time_to_failure;  // over failing histories only
    std::uint64_t failing = 0;
    std::uint64_t surviving = 0;
};

// Mean time to first system failure. Returns nullopt when no history failed.
std::optional<MttffEstimate> mttff(std::span<const HistoryResult> histories);

}  // namespace ccfsim

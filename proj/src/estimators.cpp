#include "ccfsim/estimators.hpp"

#include <cmath>
#include <string>

namespace ccfsim {

MeanEstimate mean_estimate(std::span<const double> values) {
    MeanEstimate est;
    est.n = values.size();
    if (est.n == 0) throw DomainError("mean over an empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    est.mean = sum / static_cast<double>(est.n);
    if (est.n > 1) {
        double ss = 0.0;
        for (double v : values) {
            const double d = v - est.mean;
            ss += d * d;
        }
        const double var = ss / static_cast<double>(est.n - 1);
        est.std_error = std::sqrt(var / static_cast<double>(est.n));
    }
    est.ci_low = est.mean - 1.96 * est.std_error;
    est.ci_high = est.mean + 1.96 * est.std_error;
    return est;
}

PfdEstimates estimate_pfd(std::span<const HistoryResult> histories) {
    if (histories.empty()) throw DomainError("PFD estimate needs at least one history");
    std::vector<double> ref, vis;
    ref.reserve(histories.size());
    vis.reserve(histories.size());
    for (const HistoryResult& h : histories) {
        if (!(h.mission_hours > 0.0)) throw DomainError("history has no mission length");
        ref.push_back(h.reference_downtime / h.mission_hours);
        vis.push_back(h.visible_downtime / h.mission_hours);
    }
    return {mean_estimate(ref), mean_estimate(vis)};
}

const char* to_string(CombinationClass c) {
    switch (c) {
        case CombinationClass::CcfAlone: return "ccf_alone";
        case CombinationClass::IndependentSaOnly: return "independent_sa";
        case CombinationClass::IndependentNsaOnly: return "independent_nsa";
        case CombinationClass::IndependentSaAndNsa: return "independent_sa_nsa";
        case CombinationClass::CcfPlusSa: return "ccf_plus_sa";
        case CombinationClass::CcfPlusNsa: return "ccf_plus_nsa";
    }
    return "?";
}

std::vector<int> minimal_failed_set(const Topology& topology,
                                    std::span<const FailedElementSnapshot> snapshot) {
    const int n = topology.element_count();
    std::vector<char> down(static_cast<std::size_t>(n), 0);
    for (const FailedElementSnapshot& s : snapshot) {
        if (s.element < 0 || s.element >= n)
            throw DomainError("snapshot element id out of range: " + std::to_string(s.element));
        down[static_cast<std::size_t>(s.element)] = 1;
    }
    if (!topology.evaluate(down).system_down)
        throw DomainError("combination classification requires a failed system state");
    for (int e = 0; e < n; ++e) {
        if (!down[static_cast<std::size_t>(e)]) continue;
        down[static_cast<std::size_t>(e)] = 0;
        if (!topology.evaluate(down).system_down) down[static_cast<std::size_t>(e)] = 1;
    }
    std::vector<int> kept;
    for (int e = 0; e < n; ++e)
        if (down[static_cast<std::size_t>(e)]) kept.push_back(e);
    return kept;
}

namespace {

CombinationClass classify_minimal(std::span<const FailedElementSnapshot> snapshot,
                                  const std::vector<int>& minimal) {
    bool ccf = false, sa = false, nsa = false;
    for (int e : minimal) {
        for (const FailedElementSnapshot& s : snapshot) {
            if (s.element != e) continue;
            switch (s.cause) {
                case FailureCause::CcfNonlethal:
                case FailureCause::CcfLethal: ccf = true; break;
                case FailureCause::IndependentSa: sa = true; break;
                case FailureCause::IndependentNsa: nsa = true; break;
            }
            break;
        }
    }
    if (ccf && nsa) return CombinationClass::CcfPlusNsa;
    if (ccf && sa) return CombinationClass::CcfPlusSa;
    if (ccf) return CombinationClass::CcfAlone;
    if (sa && nsa) return CombinationClass::IndependentSaAndNsa;
    if (sa) return CombinationClass::IndependentSaOnly;
    if (nsa) return CombinationClass::IndependentNsaOnly;
    throw DomainError("minimal failed set is empty");
}

}  // namespace

CombinationClass classify_combination(const Topology& topology,
                                      std::span<const FailedElementSnapshot> snapshot) {
    return classify_minimal(snapshot, minimal_failed_set(topology, snapshot));
}

std::optional<MttffEstimate> mttff(std::span<const HistoryResult> histories) {
    std::vector<double> times;
    std::uint64_t surviving = 0;
    for (const HistoryResult& h : histories) {
        if (h.first_system_failure)
            times.push_back(*h.first_system_failure);
        else
            ++surviving;
    }
    if (times.empty()) return std::nullopt;
    MttffEstimate est;
    est.time_to_failure = mean_estimate(times);
    est.failing = times.size();
    est.surviving = surviving;
    return est;
}

}  // namespace ccfsim

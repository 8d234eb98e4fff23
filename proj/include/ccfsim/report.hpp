#pragma once

#include <string>
#include <vector>

#include "ccfsim/campaign.hpp"
#include "ccfsim/config.hpp"

// Text output: CSV tables, a human summary, and the JSONL event log. Rendering is
// pure string building so identical inputs give identical bytes; file writes go
// through a temp file + rename so readers never see partial output.
namespace ccfsim {

// 6 significant digits, e notation; the common format for all rate/probability columns.
std::string sci(double v);

struct SimulateRow {
    std::string label;
    double rho = 0.0;
    double mu = 0.0;
    double omega = 0.0;
    PfdEstimates pfd;
    std::uint64_t histories = 0;
};

std::string render_simulate_csv(const std::vector<SimulateRow>& rows);

struct OrientationRow {
    std::string label;   // "uniform" or "pa=..,pb=.."
    double p_a = 1.0;    // 1.0 with label "uniform" marks the baseline row
    double p_b = 0.0;
    MttffEstimate ttf;
    double relative_mttf = 1.0;  // mean TTF / baseline mean TTF
    std::map<CombinationClass, std::uint64_t> combinations;
};

std::string render_orientation_csv(const std::vector<OrientationRow>& rows);

std::string render_params_report(const Topology& topology, const Config& config);

std::string render_simulate_summary(const Config& config, const std::vector<SimulateRow>& rows);
std::string render_orientation_summary(const Config& config,
                                       const std::vector<OrientationRow>& rows);

// One JSON object per line, records in (history, occurrence) order.
std::string render_rex_jsonl(const std::vector<HistoryResult>& histories);

void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace ccfsim

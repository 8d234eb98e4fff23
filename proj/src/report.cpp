#include "ccfsim/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ccfsim {

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

namespace {

std::string fixed2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::vector<CombinationClass> all_combination_classes() {
    std::vector<CombinationClass> all;
    for (int i = 0; i < kCombinationClassCount; ++i)
        all.push_back(static_cast<CombinationClass>(i));
    return all;
}

std::uint64_t combination_count(const std::map<CombinationClass, std::uint64_t>& counts,
                                CombinationClass c) {
    const auto it = counts.find(c);
    return it == counts.end() ? 0 : it->second;
}

}  // namespace

std::string render_simulate_csv(const std::vector<SimulateRow>& rows) {
    std::string out =
        "label,rho,mu,omega,histories,pfd_ref,pfd_ref_ci_low,pfd_ref_ci_high,"
        "pfd_vis,pfd_vis_ci_low,pfd_vis_ci_high\n";
    for (const SimulateRow& r : rows) {
        out += r.label + ',' + sci(r.rho) + ',' + sci(r.mu) + ',' + sci(r.omega) + ',' +
               std::to_string(r.histories) + ',' + sci(r.pfd.reference.mean) + ',' +
               sci(r.pfd.reference.ci_low) + ',' + sci(r.pfd.reference.ci_high) + ',' +
               sci(r.pfd.visible.mean) + ',' + sci(r.pfd.visible.ci_low) + ',' +
               sci(r.pfd.visible.ci_high) + '\n';
    }
    return out;
}

std::string render_orientation_csv(const std::vector<OrientationRow>& rows) {
    std::string out = "label,p_a,p_b,failing,surviving,mttf_hours,mttf_ci_low,mttf_ci_high,"
                      "relative_mttf";
    for (CombinationClass c : all_combination_classes()) out += std::string(",") + to_string(c);
    out += '\n';
    for (const OrientationRow& r : rows) {
        out += r.label + ',' + fixed4(r.p_a) + ',' + fixed4(r.p_b) + ',' +
               std::to_string(r.ttf.failing) + ',' + std::to_string(r.ttf.surviving) + ',' +
               sci(r.ttf.time_to_failure.mean) + ',' + sci(r.ttf.time_to_failure.ci_low) + ',' +
               sci(r.ttf.time_to_failure.ci_high) + ',' + fixed4(r.relative_mttf);
        for (CombinationClass c : all_combination_classes())
            out += ',' + std::to_string(combination_count(r.combinations, c));
        out += '\n';
    }
    return out;
}

std::string render_params_report(const Topology& topology, const Config& config) {
    const int n = topology.element_count();
    const ModelConfig& m = config.model;
    const ResolvedModel r = resolve_model(topology, m);
    const atwood::GammaBoth gamma = atwood::gamma_ratio_both(n, m.alpha, m.beta, m.rho);
    const atwood::Params p{m.lambda_ind, r.mu, r.omega, m.rho};

    std::ostringstream out;
    out << "elements: " << n << " (" << topology.division_count() << " divisions x "
        << topology.apus_per_division() << " APUs, vote " << to_string(config.architecture.vote)
        << ", GAPU " << config.architecture.gapu_vote_k << "oo" << topology.division_count()
        << ")\n";
    out << "lambda_ind: " << sci(m.lambda_ind) << " /h  coverage: " << fixed2(m.coverage)
        << "  rho: " << fixed4(m.rho) << '\n';
    out << "alpha: " << fixed4(m.alpha) << "  beta: " << fixed4(m.beta) << "  variant: "
        << (m.variant == atwood::SumVariant::CoefficientFree ? "coefficient_free" : "binomial")
        << '\n';
    out << (m.mu ? "rates: explicit\n" : "rates: solved from fractions\n");
    out << "mu: " << sci(r.mu) << " /h  omega: " << sci(r.omega) << " /h\n";
    out << "gamma (lambda_ind / lambda_total): coefficient_free " << sci(gamma.coefficient_free)
        << ", binomial " << sci(gamma.binomial) << '\n';
    out << "lambda_sa: " << sci(r.lambda_sa) << " /h  lambda_nsa: " << sci(r.lambda_nsa) << " /h\n";
    out << "element total failure rate: " << sci(atwood::q_total_element(n, p)) << " /h\n";
    out << "element common-cause share: " << fixed4(atwood::beta_factor_element(n, p)) << '\n';
    out << "group failure rates q_k (one specific group of k elements):\n";
    for (int k = 1; k <= n; ++k)
        out << "  k=" << k << ": " << sci(atwood::q_group(k, n, p)) << '\n';
    return out.str();
}

namespace {

std::string summary_header(const Config& config) {
    std::ostringstream out;
    out << "seed: " << config.run.master_seed << "  histories: " << config.run.histories
        << "  mission_hours: " << fixed2(config.run.mission_hours) << '\n';
    out << "repair: "
        << (config.run.repair.distribution == RepairDistribution::Fixed ? "fixed " : "exponential ")
        << fixed2(config.run.repair.hours) << " h, "
        << (config.run.repair.crews == RepairCrews::Unlimited ? "unlimited crews"
                                                              : "one crew per division")
        << '\n';
    if (config.run.tests.enabled)
        out << "periodic tests: every " << fixed2(config.run.tests.period_hours)
            << " h per division, staggered\n";
    else
        out << "periodic tests: disabled\n";
    return out.str();
}

}  // namespace

std::string render_simulate_summary(const Config& config, const std::vector<SimulateRow>& rows) {
    std::ostringstream out;
    out << "probability of failure on demand\n" << summary_header(config) << '\n';
    for (const SimulateRow& r : rows) {
        out << r.label << ": rho=" << fixed4(r.rho) << " mu=" << sci(r.mu)
            << " omega=" << sci(r.omega) << '\n';
        out << "  reference: " << sci(r.pfd.reference.mean) << "  [" << sci(r.pfd.reference.ci_low)
            << ", " << sci(r.pfd.reference.ci_high) << "]\n";
        out << "  visible:   " << sci(r.pfd.visible.mean) << "  [" << sci(r.pfd.visible.ci_low)
            << ", " << sci(r.pfd.visible.ci_high) << "]\n";
    }
    return out.str();
}

std::string render_orientation_summary(const Config& config,
                                       const std::vector<OrientationRow>& rows) {
    std::ostringstream out;
    out << "time to first system failure by shock orientation\n" << summary_header(config) << '\n';
    for (const OrientationRow& r : rows) {
        out << r.label << ": failing=" << r.ttf.failing << " surviving=" << r.ttf.surviving
            << '\n';
        out << "  mean ttf: " << sci(r.ttf.time_to_failure.mean) << " h  ["
            << sci(r.ttf.time_to_failure.ci_low) << ", " << sci(r.ttf.time_to_failure.ci_high)
            << "]  relative: " << fixed4(r.relative_mttf) << '\n';
        out << "  combinations:";
        for (CombinationClass c : all_combination_classes())
            out << ' ' << to_string(c) << '=' << combination_count(r.combinations, c);
        out << '\n';
    }
    return out.str();
}

std::string render_rex_jsonl(const std::vector<HistoryResult>& histories) {
    std::string out;
    for (const HistoryResult& h : histories) {
        for (const RexRecord& r : h.rex) {
            nlohmann::ordered_json j;
            j["history"] = r.history;
            j["time"] = r.time;
            j["event"] = to_string(r.kind);
            j["element"] = r.element;
            j["division"] = r.division;
            j["apu"] = r.apu;
            j["subsystem"] = to_string(r.subsystem);
            j["cause"] = to_string(r.cause);
            j["detected_online"] = r.detected_online;
            j["system_ref_down"] = r.system_ref_down;
            j["system_vis_down"] = r.system_vis_down;
            out += j.dump();
            out += '\n';
        }
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write file: " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw ConfigError("failed while writing: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot rename " + tmp.string() + " to " + path);
    }
}

}  // namespace ccfsim

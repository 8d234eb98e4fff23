#include "ccfsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace ccfsim {

namespace {

using toml::Document;
using toml::Value;

[[noreturn]] void bad_value(const std::string& key, const std::string& got,
                            const std::string& expected) {
    throw ConfigError("key '" + key + "': invalid value " + got + " (expected " + expected + ")");
}

double get_float(const Document& d, const std::string& key, double fallback) {
    const Value* v = d.find(key);
    return v == nullptr ? fallback : v->as_float(key);
}

std::int64_t get_int(const Document& d, const std::string& key, std::int64_t fallback) {
    const Value* v = d.find(key);
    return v == nullptr ? fallback : v->as_int(key);
}

bool get_bool(const Document& d, const std::string& key, bool fallback) {
    const Value* v = d.find(key);
    return v == nullptr ? fallback : v->as_bool(key);
}

std::string get_string(const Document& d, const std::string& key, const std::string& fallback) {
    const Value* v = d.find(key);
    return v == nullptr ? fallback : v->as_string(key);
}

void require_prob(double v, const std::string& key) {
    if (!(v >= 0.0 && v <= 1.0)) bad_value(key, std::to_string(v), "a probability in [0, 1]");
}

void require_nonneg(double v, const std::string& key) {
    if (!(v >= 0.0)) bad_value(key, std::to_string(v), ">= 0");
}

void require_pos(double v, const std::string& key) {
    if (!(v > 0.0)) bad_value(key, std::to_string(v), "> 0");
}

Subsystem parse_subsystem(const std::string& s, const std::string& key) {
    if (s == "A") return Subsystem::A;
    if (s == "B") return Subsystem::B;
    bad_value(key, "'" + s + "'", "\"A\" or \"B\"");
}

VoteConfig parse_vote(const std::string& s, const std::string& key) {
    if (s == "1oo2") return VoteConfig::OneOutOfTwo;
    if (s == "2oo2") return VoteConfig::TwoOutOfTwo;
    bad_value(key, "'" + s + "'", "\"1oo2\" or \"2oo2\"");
}

C2Granularity parse_granularity(const std::string& s, const std::string& key) {
    if (s == "series_block") return C2Granularity::SeriesBlock;
    if (s == "per_card") return C2Granularity::PerCard;
    bad_value(key, "'" + s + "'", "\"series_block\" or \"per_card\"");
}

atwood::SumVariant parse_variant(const std::string& s, const std::string& key) {
    if (s == "coefficient_free") return atwood::SumVariant::CoefficientFree;
    if (s == "binomial") return atwood::SumVariant::Binomial;
    bad_value(key, "'" + s + "'", "\"coefficient_free\" or \"binomial\"");
}

Rounding parse_rounding(const std::string& s, const std::string& key) {
    if (s == "continuous") return Rounding::Continuous;
    if (s == "paper") return Rounding::Paper;
    bad_value(key, "'" + s + "'", "\"continuous\" or \"paper\"");
}

DetectionGranularity parse_detection(const std::string& s, const std::string& key) {
    if (s == "per_shock") return DetectionGranularity::PerShock;
    if (s == "per_victim") return DetectionGranularity::PerVictim;
    bad_value(key, "'" + s + "'", "\"per_shock\" or \"per_victim\"");
}

IndependentSampling parse_sampling(const std::string& s, const std::string& key) {
    if (s == "competing_clocks") return IndependentSampling::CompetingClocks;
    if (s == "bernoulli_split") return IndependentSampling::BernoulliSplit;
    bad_value(key, "'" + s + "'", "\"competing_clocks\" or \"bernoulli_split\"");
}

StopMode parse_stop(const std::string& s, const std::string& key) {
    if (s == "full_mission") return StopMode::FullMission;
    if (s == "first_failure") return StopMode::FirstFailureCapped;
    if (s == "run_to_failure") return StopMode::FirstFailureUncapped;
    bad_value(key, "'" + s + "'", "\"full_mission\", \"first_failure\" or \"run_to_failure\"");
}

ShockTargeting parse_targeting(const std::string& s, const std::string& key) {
    if (s == "single_side") return ShockTargeting::SingleSide;
    if (s == "per_element") return ShockTargeting::PerElement;
    bad_value(key, "'" + s + "'", "\"single_side\" or \"per_element\"");
}

RepairDistribution parse_repair_dist(const std::string& s, const std::string& key) {
    if (s == "fixed") return RepairDistribution::Fixed;
    if (s == "exponential") return RepairDistribution::Exponential;
    bad_value(key, "'" + s + "'", "\"fixed\" or \"exponential\"");
}

RepairCrews parse_crews(const std::string& s, const std::string& key) {
    if (s == "unlimited") return RepairCrews::Unlimited;
    if (s == "one_per_division") return RepairCrews::OnePerDivision;
    bad_value(key, "'" + s + "'", "\"unlimited\" or \"one_per_division\"");
}

const std::set<std::string> kKnownKeys = {
    "architecture.divisions",
    "architecture.apus_per_division",
    "architecture.subsystem_of_apu",
    "architecture.gapu_vote_k",
    "architecture.vote",
    "architecture.c2_granularity",
    "architecture.c2_cards_per_apu",
    "model.lambda_ind",
    "model.coverage",
    "model.rho",
    "model.alpha",
    "model.beta",
    "model.mu",
    "model.omega",
    "model.variant",
    "model.rounding",
    "model.detection",
    "model.independent_sampling",
    "model.orientation.enabled",
    "model.orientation.subset",
    "model.orientation.p_a",
    "model.orientation.targeting",
    "run.histories",
    "run.mission_hours",
    "run.master_seed",
    "run.stop_mode",
    "run.jobs",
    "run.repair_distribution",
    "run.repair_hours",
    "run.repair_crews",
    "run.tests_enabled",
    "run.test_period_hours",
    "sweep.rho_values",
    "sweep.orientation_pairs",
    "output.directory",
    "output.rex_path",
};

}  // namespace

Config config_from_document(const Document& doc) {
    for (const std::string& key : doc.keys())
        if (kKnownKeys.find(key) == kKnownKeys.end())
            throw ConfigError(doc.source_name() + ": unknown key '" + key + "'");

    Config c;

    // [architecture]
    c.architecture.divisions = static_cast<int>(get_int(doc, "architecture.divisions", 4));
    c.architecture.apus_per_division =
        static_cast<int>(get_int(doc, "architecture.apus_per_division", 5));
    if (const Value* v = doc.find("architecture.subsystem_of_apu")) {
        c.architecture.subsystem_of_apu.clear();
        for (const Value& item : v->as_array("architecture.subsystem_of_apu"))
            c.architecture.subsystem_of_apu.push_back(
                parse_subsystem(item.as_string("architecture.subsystem_of_apu[]"),
                                "architecture.subsystem_of_apu"));
    }
    c.architecture.gapu_vote_k = static_cast<int>(get_int(doc, "architecture.gapu_vote_k", 3));
    c.architecture.vote =
        parse_vote(get_string(doc, "architecture.vote", "1oo2"), "architecture.vote");
    c.architecture.granularity = parse_granularity(
        get_string(doc, "architecture.c2_granularity", "series_block"), "architecture.c2_granularity");
    if (const Value* v = doc.find("architecture.c2_cards_per_apu")) {
        c.architecture.c2_cards_per_apu.clear();
        for (const Value& item : v->as_array("architecture.c2_cards_per_apu"))
            c.architecture.c2_cards_per_apu.push_back(
                static_cast<int>(item.as_int("architecture.c2_cards_per_apu[]")));
    }

    // [model]
    c.model.lambda_ind = get_float(doc, "model.lambda_ind", c.model.lambda_ind);
    require_nonneg(c.model.lambda_ind, "model.lambda_ind");
    c.model.coverage = get_float(doc, "model.coverage", c.model.coverage);
    require_prob(c.model.coverage, "model.coverage");
    c.model.rho = get_float(doc, "model.rho", c.model.rho);
    require_prob(c.model.rho, "model.rho");
    c.model.alpha = get_float(doc, "model.alpha", c.model.alpha);
    require_prob(c.model.alpha, "model.alpha");
    c.model.beta = get_float(doc, "model.beta", c.model.beta);
    require_prob(c.model.beta, "model.beta");
    if (c.model.alpha + c.model.beta > 1.0)
        throw ConfigError("model.alpha + model.beta must be <= 1, got " +
                          std::to_string(c.model.alpha + c.model.beta));
    if (const Value* v = doc.find("model.mu")) {
        c.model.mu = v->as_float("model.mu");
        require_nonneg(*c.model.mu, "model.mu");
    }
    if (const Value* v = doc.find("model.omega")) {
        c.model.omega = v->as_float("model.omega");
        require_nonneg(*c.model.omega, "model.omega");
    }
    if (c.model.mu.has_value() != c.model.omega.has_value())
        throw ConfigError("model.mu and model.omega must be given together or both left "
                          "to the analytic solve");
    c.model.variant =
        parse_variant(get_string(doc, "model.variant", "coefficient_free"), "model.variant");
    c.model.rounding =
        parse_rounding(get_string(doc, "model.rounding", "continuous"), "model.rounding");
    c.model.detection =
        parse_detection(get_string(doc, "model.detection", "per_shock"), "model.detection");
    c.model.independent_sampling = parse_sampling(
        get_string(doc, "model.independent_sampling", "competing_clocks"),
        "model.independent_sampling");

    // [model.orientation]
    c.model.orientation.enabled = get_bool(doc, "model.orientation.enabled", false);
    if (const Value* v = doc.find("model.orientation.subset")) {
        if (v->is_string()) {
            const std::string& s = v->as_string("model.orientation.subset");
            if (s == "SSA")
                c.model.orientation.subset = OrientationSubset::SubsystemA;
            else if (s == "SSB")
                c.model.orientation.subset = OrientationSubset::SubsystemB;
            else
                bad_value("model.orientation.subset", "'" + s + "'",
                          "\"SSA\", \"SSB\" or an array of element ids");
        } else {
            c.model.orientation.subset = OrientationSubset::Custom;
            for (const Value& item : v->as_array("model.orientation.subset"))
                c.model.orientation.custom_ids.push_back(
                    static_cast<int>(item.as_int("model.orientation.subset[]")));
            std::sort(c.model.orientation.custom_ids.begin(), c.model.orientation.custom_ids.end());
            if (std::adjacent_find(c.model.orientation.custom_ids.begin(),
                                   c.model.orientation.custom_ids.end()) !=
                c.model.orientation.custom_ids.end())
                throw ConfigError("model.orientation.subset contains duplicate element ids");
        }
    }
    c.model.orientation.p_a = get_float(doc, "model.orientation.p_a", c.model.orientation.p_a);
    require_prob(c.model.orientation.p_a, "model.orientation.p_a");
    c.model.orientation.targeting =
        parse_targeting(get_string(doc, "model.orientation.targeting", "single_side"),
                        "model.orientation.targeting");

    // [run]
    const std::int64_t histories = get_int(doc, "run.histories", 10000);
    if (histories < 1) bad_value("run.histories", std::to_string(histories), ">= 1");
    c.run.histories = static_cast<std::uint64_t>(histories);
    c.run.mission_hours = get_float(doc, "run.mission_hours", c.run.mission_hours);
    require_pos(c.run.mission_hours, "run.mission_hours");
    c.run.master_seed = static_cast<std::uint64_t>(get_int(doc, "run.master_seed", 1));
    c.run.stop = parse_stop(get_string(doc, "run.stop_mode", "full_mission"), "run.stop_mode");
    const std::int64_t jobs = get_int(doc, "run.jobs", 0);
    if (jobs < 0) bad_value("run.jobs", std::to_string(jobs), ">= 0");
    c.run.jobs = static_cast<int>(jobs);
    c.run.repair.distribution = parse_repair_dist(
        get_string(doc, "run.repair_distribution", "fixed"), "run.repair_distribution");
    c.run.repair.hours = get_float(doc, "run.repair_hours", c.run.repair.hours);
    require_nonneg(c.run.repair.hours, "run.repair_hours");
    if (c.run.repair.distribution == RepairDistribution::Exponential)
        require_pos(c.run.repair.hours, "run.repair_hours");
    c.run.repair.crews =
        parse_crews(get_string(doc, "run.repair_crews", "unlimited"), "run.repair_crews");
    c.run.tests.enabled = get_bool(doc, "run.tests_enabled", true);
    c.run.tests.period_hours = get_float(doc, "run.test_period_hours", c.run.tests.period_hours);
    if (c.run.tests.enabled) require_pos(c.run.tests.period_hours, "run.test_period_hours");

    // [sweep]
    if (const Value* v = doc.find("sweep.rho_values")) {
        c.sweep.rho_values.clear();
        for (const Value& item : v->as_array("sweep.rho_values")) {
            const double rho = item.as_float("sweep.rho_values[]");
            require_prob(rho, "sweep.rho_values[]");
            c.sweep.rho_values.push_back(rho);
        }
        if (c.sweep.rho_values.empty())
            throw ConfigError("sweep.rho_values must not be empty when given");
    }
    if (const Value* v = doc.find("sweep.orientation_pairs")) {
        c.sweep.orientation_pairs.clear();
        for (const Value& item : v->as_array("sweep.orientation_pairs")) {
            const auto& pair = item.as_array("sweep.orientation_pairs[]");
            if (pair.size() != 2)
                throw ConfigError("sweep.orientation_pairs entries must be [p_a, p_b] pairs");
            const double pa = pair[0].as_float("sweep.orientation_pairs[][0]");
            const double pb = pair[1].as_float("sweep.orientation_pairs[][1]");
            require_prob(pa, "sweep.orientation_pairs[][0]");
            require_prob(pb, "sweep.orientation_pairs[][1]");
            if (std::abs(pa + pb - 1.0) > 1e-12)
                throw ConfigError("orientation pair [" + std::to_string(pa) + ", " +
                                  std::to_string(pb) + "] does not sum to 1");
            c.sweep.orientation_pairs.push_back({pa, pb});
        }
        if (c.sweep.orientation_pairs.empty())
            throw ConfigError("sweep.orientation_pairs must not be empty when given");
    }

    // [output]
    c.output.directory = get_string(doc, "output.directory", c.output.directory);
    if (c.output.directory.empty()) bad_value("output.directory", "''", "a directory path");
    c.output.rex_path = get_string(doc, "output.rex_path", c.output.rex_path);

    // The topology constructor enforces the structural rules; surface its
    // complaints as config errors so the CLI exits with the config status.
    try {
        Topology probe(c.architecture);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("architecture: ") + e.what());
    }

    return c;
}

Config load_config_file(const std::string& path) {
    return config_from_document(Document::parse_file(path));
}

toml::Document document_from_config(const Config& c) {
    Document d;
    d.set("architecture.divisions", Value::integer(c.architecture.divisions));
    d.set("architecture.apus_per_division", Value::integer(c.architecture.apus_per_division));
    {
        std::vector<Value> arr;
        for (Subsystem s : c.architecture.subsystem_of_apu)
            arr.push_back(Value::string(to_string(s)));
        d.set("architecture.subsystem_of_apu", Value::array(std::move(arr)));
    }
    d.set("architecture.gapu_vote_k", Value::integer(c.architecture.gapu_vote_k));
    d.set("architecture.vote", Value::string(to_string(c.architecture.vote)));
    d.set("architecture.c2_granularity",
          Value::string(c.architecture.granularity == C2Granularity::SeriesBlock ? "series_block"
                                                                                 : "per_card"));
    {
        std::vector<Value> arr;
        for (int n : c.architecture.c2_cards_per_apu) arr.push_back(Value::integer(n));
        d.set("architecture.c2_cards_per_apu", Value::array(std::move(arr)));
    }

    d.set("model.lambda_ind", Value::real(c.model.lambda_ind));
    d.set("model.coverage", Value::real(c.model.coverage));
    d.set("model.rho", Value::real(c.model.rho));
    d.set("model.alpha", Value::real(c.model.alpha));
    d.set("model.beta", Value::real(c.model.beta));
    if (c.model.mu) d.set("model.mu", Value::real(*c.model.mu));
    if (c.model.omega) d.set("model.omega", Value::real(*c.model.omega));
    d.set("model.variant",
          Value::string(c.model.variant == atwood::SumVariant::CoefficientFree ? "coefficient_free"
                                                                               : "binomial"));
    d.set("model.rounding",
          Value::string(c.model.rounding == Rounding::Continuous ? "continuous" : "paper"));
    d.set("model.detection",
          Value::string(c.model.detection == DetectionGranularity::PerShock ? "per_shock"
                                                                            : "per_victim"));
    d.set("model.independent_sampling",
          Value::string(c.model.independent_sampling == IndependentSampling::CompetingClocks
                            ? "competing_clocks"
                            : "bernoulli_split"));

    d.set("model.orientation.enabled", Value::boolean(c.model.orientation.enabled));
    switch (c.model.orientation.subset) {
        case OrientationSubset::SubsystemA:
            d.set("model.orientation.subset", Value::string("SSA"));
            break;
        case OrientationSubset::SubsystemB:
            d.set("model.orientation.subset", Value::string("SSB"));
            break;
        case OrientationSubset::Custom: {
            std::vector<Value> arr;
            for (int id : c.model.orientation.custom_ids) arr.push_back(Value::integer(id));
            d.set("model.orientation.subset", Value::array(std::move(arr)));
            break;
        }
    }
    d.set("model.orientation.p_a", Value::real(c.model.orientation.p_a));
    d.set("model.orientation.targeting",
          Value::string(c.model.orientation.targeting == ShockTargeting::SingleSide
                            ? "single_side"
                            : "per_element"));

    d.set("run.histories", Value::integer(static_cast<std::int64_t>(c.run.histories)));
    d.set("run.mission_hours", Value::real(c.run.mission_hours));
    d.set("run.master_seed", Value::integer(static_cast<std::int64_t>(c.run.master_seed)));
    switch (c.run.stop) {
        case StopMode::FullMission: d.set("run.stop_mode", Value::string("full_mission")); break;
        case StopMode::FirstFailureCapped:
            d.set("run.stop_mode", Value::string("first_failure"));
            break;
        case StopMode::FirstFailureUncapped:
            d.set("run.stop_mode", Value::string("run_to_failure"));
            break;
    }
    d.set("run.jobs", Value::integer(c.run.jobs));
    d.set("run.repair_distribution",
          Value::string(c.run.repair.distribution == RepairDistribution::Fixed ? "fixed"
                                                                               : "exponential"));
    d.set("run.repair_hours", Value::real(c.run.repair.hours));
    d.set("run.repair_crews",
          Value::string(c.run.repair.crews == RepairCrews::Unlimited ? "unlimited"
                                                                     : "one_per_division"));
    d.set("run.tests_enabled", Value::boolean(c.run.tests.enabled));
    d.set("run.test_period_hours", Value::real(c.run.tests.period_hours));

    {
        std::vector<Value> arr;
        for (double rho : c.sweep.rho_values) arr.push_back(Value::real(rho));
        d.set("sweep.rho_values", Value::array(std::move(arr)));
    }
    {
        std::vector<Value> arr;
        for (const auto& pair : c.sweep.orientation_pairs) {
            std::vector<Value> inner;
            inner.push_back(Value::real(pair[0]));
            inner.push_back(Value::real(pair[1]));
            arr.push_back(Value::array(std::move(inner)));
        }
        d.set("sweep.orientation_pairs", Value::array(std::move(arr)));
    }

    d.set("output.directory", Value::string(c.output.directory));
    d.set("output.rex_path", Value::string(c.output.rex_path));
    return d;
}

std::string serialize_config(const Config& c) { return document_from_config(c).serialize(); }

ResolvedModel resolve_model(const Topology& topology, const ModelConfig& m) {
    const int n = topology.element_count();
    ResolvedModel r;
    r.gamma = atwood::gamma_ratio(n, m.alpha, m.beta, m.rho, m.variant);
    if (m.mu && m.omega) {
        r.mu = *m.mu;
        r.omega = *m.omega;
    } else {
        const atwood::SolvedRates solved =
            atwood::solve_rates(n, m.alpha, m.beta, m.rho, m.lambda_ind, m.variant);
        r.mu = solved.mu;
        r.omega = solved.omega;
    }
    const atwood::DetectionSplit split = atwood::split_detection(m.lambda_ind, m.coverage);
    r.lambda_sa = split.lambda_sa;
    r.lambda_nsa = split.lambda_nsa;

    if (!m.orientation.enabled) {
        r.victim_probs = VictimProbabilities::uniform(n, m.rho);
        return r;
    }
    std::vector<int> subset;
    switch (m.orientation.subset) {
        case OrientationSubset::SubsystemA: subset = topology.subsystem_elements(Subsystem::A); break;
        case OrientationSubset::SubsystemB: subset = topology.subsystem_elements(Subsystem::B); break;
        case OrientationSubset::Custom: subset = m.orientation.custom_ids; break;
    }
    if (!subset.empty() && (subset.front() < 0 || subset.back() >= n))
        throw ConfigError("model.orientation.subset: element ids must be in [0, " +
                          std::to_string(n) + ")");
    try {
        r.victim_probs = m.orientation.targeting == ShockTargeting::SingleSide
                             ? VictimProbabilities::directed_single_side(n, m.rho, subset,
                                                                         m.orientation.p_a)
                             : VictimProbabilities::directed(n, m.rho, subset, m.orientation.p_a);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("model.orientation: ") + e.what());
    }
    return r;
}

HistoryParams build_history_params(const Topology& topology, const Config& c) {
    const ResolvedModel r = resolve_model(topology, c.model);
    HistoryParams p;
    p.lambda_sa = r.lambda_sa;
    p.lambda_nsa = r.lambda_nsa;
    p.coverage = c.model.coverage;
    p.mu = r.mu;
    p.omega = r.omega;
    p.victim_probs = r.victim_probs;
    p.detection = c.model.detection;
    p.independent_sampling = c.model.independent_sampling;
    p.rounding = c.model.rounding;
    p.repair = c.run.repair;
    p.tests = c.run.tests;
    p.mission_hours = c.run.mission_hours;
    p.stop = c.run.stop;
    return p;
}

}  // namespace ccfsim

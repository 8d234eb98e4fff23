#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccfsim/atwood.hpp"
#include "ccfsim/engine.hpp"
#include "ccfsim/toml.hpp"
#include "ccfsim/topology.hpp"

// Run configuration: TOML file <-> validated structs <-> engine parameters.
// Unknown keys are rejected so typos fail loudly instead of silently running
// defaults.
namespace ccfsim {

enum class OrientationSubset : std::uint8_t { SubsystemA, SubsystemB, Custom };

struct OrientationConfig {
    bool enabled = false;
    OrientationSubset subset = OrientationSubset::SubsystemA;
    std::vector<int> custom_ids;  // sorted unique element ids when Custom
    double p_a = 0.6;             // fraction of expected shock victims steered into the subset
    ShockTargeting targeting = ShockTargeting::SingleSide;
};

struct ModelConfig {
    double lambda_ind = 2.35e-6;
    double coverage = 0.85;
    double rho = 0.2;
    double alpha = 0.405;  // non-lethal fraction of the total situation rate
    double beta = 5e-3;    // lethal fraction
    std::optional<double> mu;     // absent: solved from alpha/beta/rho
    std::optional<double> omega;  // absent: solved
    atwood::SumVariant variant = atwood::SumVariant::CoefficientFree;
    Rounding rounding = Rounding::Continuous;
    DetectionGranularity detection = DetectionGranularity::PerShock;
    IndependentSampling independent_sampling = IndependentSampling::CompetingClocks;
    OrientationConfig orientation;
};

struct RunConfig {
    std::uint64_t histories = 10000;
    double mission_hours = 87600.0;
    std::uint64_t master_seed = 1;
    StopMode stop = StopMode::FullMission;
    int jobs = 0;  // 0 = hardware concurrency
    RepairPolicy repair;
    TestPolicy tests;
};

struct SweepConfig {
    std::vector<double> rho_values = {0.2, 0.33, 0.5};
    // [p_a, p_b] per sweep point; entries must sum to 1.
    std::vector<std::array<double, 2>> orientation_pairs = {
        {0.1, 0.9}, {0.2, 0.8}, {0.3, 0.7}, {0.4, 0.6}};
};

struct OutputConfig {
    std::string directory = "out";
    std::string rex_path;  // empty: no event log
};

struct Config {
    TopologyConfig architecture;
    ModelConfig model;
    RunConfig run;
    SweepConfig sweep;
    OutputConfig output;
};

Config config_from_document(const toml::Document& doc);
Config load_config_file(const std::string& path);
toml::Document document_from_config(const Config& c);
std::string serialize_config(const Config& c);

// Model quantities derived for a concrete topology.
struct ResolvedModel {
    double mu = 0.0;
    double omega = 0.0;
    double gamma = 1.0;  // lambda_ind / lambda_total for the configured variant
    double lambda_sa = 0.0;
    double lambda_nsa = 0.0;
    VictimProbabilities victim_probs;
};

ResolvedModel resolve_model(const Topology& topology, const ModelConfig& m);

// Full engine parameter assembly for the configured run.
HistoryParams build_history_params(const Topology& topology, const Config& c);

}  // namespace ccfsim

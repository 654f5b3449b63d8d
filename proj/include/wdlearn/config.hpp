#pragma once

#include <string>

#include <json.hpp>

#include "wdlearn/bounds.hpp"
#include "wdlearn/experiments.hpp"

namespace wdl {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Versioned JSON config shared by the CLI subcommands; unknown keys are
// rejected so manifests stay exact.
struct AppConfig {
    ExperimentConfig experiment;
    DependenceParams dependence;
    double c0 = 1.0;
    double s = 0.0;                  // 0 = use the input dimension d
    double d_override = 0.0;         // 0 = q * (1 + d_x)
    double m_override = 0.0;         // 0 = from the loss/output bound
    double l_override = 0.0;
    std::string output_dir = "out";

    double input_dim() const {
        return d_override > 0
                   ? d_override
                   : static_cast<double>(experiment.q *
                                         (1 + experiment.covariate.dimension));
    }
    // Bound constants for one loss at a given output bound B_Y.
    BoundConstants bound_constants(LossKind kind, double output_bound) const;
};

AppConfig parse_config(const nlohmann::json& doc);
AppConfig load_config(const std::string& path);
nlohmann::json config_to_json(const AppConfig& config);

nlohmann::json fit_result_to_json(const FitResult& fit);
// Constants named as in the reports: C1, C2, C4, C5, Cn1/Cn2, Cpn/Cpn2,
// eps1/eps2, eps1p/eps2p.
nlohmann::json bound_report_to_json(const BoundReport& report);
nlohmann::json contraction_report_to_json(const ContractionReport& report);
nlohmann::json moment_report_to_json(const MomentCheckReport& report);

} // namespace wdl

#pragma once

#include <map>
#include <string>
#include <vector>

#include "wdlearn/acx.hpp"
#include "wdlearn/bounds.hpp"
#include "wdlearn/erm.hpp"
#include "wdlearn/hypothesis.hpp"

namespace wdl {

struct ExperimentConfig {
    AcxModelSpec model = AcxModelSpec::arx({0.25, -0.4}, 0.8);
    CovariateSpec covariate;
    InnovationSpec innovation = InnovationSpec::standardized_uniform_pm2();
    std::string model_label = "arx";

    int q = 1;                               // predictor lag order
    double box_half_width = 10.0;            // Theta = [-w, w]^d
    std::vector<LossKind> loss_kinds = {LossKind::Squared, LossKind::Absolute};
    double output_bound = 0.0;               // B_Y; 0 = estimate from reference sample

    std::size_t reference_size = 10000;      // m
    std::vector<std::size_t> n_grid;         // default 100..2000 step 20
    int replications = 500;
    std::uint64_t base_seed = 42;
    int parallel_workers = 1;
    int burn_in = 1000;
    std::size_t eval_size_override = 0;      // 0 = evaluation sample of length n

    LinearARPredictor predictor() const { return {q, covariate.dimension}; }
    ParamBox box() const {
        return ParamBox::cube(1 + q * (1 + covariate.dimension), box_half_width);
    }
    std::vector<std::size_t> effective_n_grid() const;
};

struct TargetFit {
    std::vector<double> theta;
    double risk = 0.0;                       // R~_1(theta~)
    double output_bound = 0.0;               // B_Y used for this loss
    bool box_active = false;
};

struct ReplicationRecord {
    LossKind loss = LossKind::Squared;
    std::size_t n = 0;
    int rep = 0;
    double eval_risk = 0.0;                  // R~_2(theta^)
    double abs_excess = 0.0;                 // |R~_2(theta^) - R~_1(theta~)|
    bool failed = false;
};

struct CurvePoint {
    LossKind loss = LossKind::Squared;
    std::size_t n = 0;
    double mean_excess = 0.0;                // |mean R~_2 - R~_1|
    double sd = 0.0;                         // sd of R~_2 across replications
    int reps = 0;
    double mean_abs_excess = 0.0;            // secondary: mean of per-rep |.|
};

struct ExperimentResult {
    std::map<LossKind, TargetFit> targets;
    std::vector<CurvePoint> curve;
    std::vector<ReplicationRecord> records;
    int failures = 0;
};

// Simulate one length-m reference trajectory and ERM-fit on it; the returned
// risk R~_1(theta~) estimates R(h_H).
TargetFit estimate_target(const ExperimentConfig& config, LossKind loss_kind);

// The full protocol: per (loss, n, replication) simulate an independent train
// trajectory, fit, simulate an independent evaluation trajectory, record
// R~_2(theta^); aggregate per (loss, n). Deterministic for a fixed base_seed
// regardless of worker count.
ExperimentResult run_excess_risk_curve(const ExperimentConfig& config);

struct OverlayRow {
    LossKind loss = LossKind::Squared;
    std::size_t n = 0;
    double empirical = 0.0;
    double slow_total = 0.0;                 // eps_1 + eps'_1
    double fast_total = 0.0;                 // eps_2 + eps'_2
    double min_n = 0.0;
    bool min_n_satisfied = false;
    bool dominated = true;                   // theoretical >= empirical where min-n holds
};

struct BoundOverlayInputs {
    double eta = 0.05;
    double c0 = 1.0;
    double s = 0.0;                          // 0 = use d (input dimension)
    DependenceParams dep;
};

std::vector<OverlayRow> overlay_bounds(const ExperimentResult& result,
                                       const ExperimentConfig& config,
                                       const BoundOverlayInputs& inputs);

// CSV: header `loss,n,mean_excess,sd,reps`.
void emit_csv(const std::vector<CurvePoint>& curve, const std::string& path);
std::vector<CurvePoint> read_curve_csv(const std::string& path);
// per-replication records: `loss,n,rep,eval_risk,abs_excess`
void emit_records_csv(const std::vector<ReplicationRecord>& records, const std::string& path);
// overlay table: `loss,n,empirical,slow_total,fast_total,min_n,min_n_ok,dominated`
void emit_overlay_csv(const std::vector<OverlayRow>& table, const std::string& path);

// Self-contained SVG line plot, one polyline series per loss.
void emit_svg_plot(const std::vector<CurvePoint>& curve, const std::string& path,
                   bool log_y = false);

const char* loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);

} // namespace wdl

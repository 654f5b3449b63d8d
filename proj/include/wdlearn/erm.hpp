#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wdlearn/acx.hpp"
#include "wdlearn/hypothesis.hpp"

namespace wdl {

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

enum class LossKind { Absolute, Squared };

struct LossSpec {
    LossKind kind = LossKind::Squared;
    double output_bound = 1.0;       // B_Y = sup |y|

    static LossSpec absolute(double b_y = 1.0) { return {LossKind::Absolute, b_y}; }
    static LossSpec squared(double b_y = 1.0) { return {LossKind::Squared, b_y}; }

    // K_l: 1 (absolute), 2 B_Y (squared); also the constant L (loss-composition).
    double lipschitz() const {
        return kind == LossKind::Absolute ? 1.0 : 2.0 * output_bound;
    }
    // M = sup loss: 2 B_Y (absolute), 4 B_Y^2 (squared).
    double sup_loss() const {
        return kind == LossKind::Absolute ? 2.0 * output_bound
                                          : 4.0 * output_bound * output_bound;
    }
};

double loss_eval(const LossSpec& loss, double y, double y_prime);

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

enum class FitMethod { ClosedFormLeastSquares, NelderMead, GridRefine };

struct FitConfig {
    FitMethod method = FitMethod::ClosedFormLeastSquares;
    double tolerance = 1e-10;        // parameter-step stop for iterative methods
    int max_iterations = 5000;
    int restarts = 20;               // extra Nelder-Mead starts from random box points
    double grid_step = 0.01;         // GridRefine only
    bool ridge_fallback = true;
    std::uint64_t seed = 0;          // restart-point stream
};

struct FitResult {
    std::vector<double> theta;
    double empirical_risk = 0.0;
    int iterations = 0;
    bool converged = true;
    bool box_active = false;         // some coordinate sits on the box boundary
    bool ridge_used = false;
};

// Mean loss over the dataset in fixed (chronological) summation order.
double empirical_risk(const LinearARPredictor& predictor, std::span<const double> theta,
                      const Dataset& data, const LossSpec& loss);

// ERM over the box. Squared loss: exact normal-equations solution (rank-
// revealing QR, ridge fallback), clamped into the box and polished by cyclic
// coordinate descent when clamping occurred. Absolute loss: Nelder-Mead from
// the least-squares start plus random restarts. GridRefine is the brute-force
// oracle mode.
FitResult erm_fit(const LinearARPredictor& predictor, const ParamBox& box,
                  const Dataset& data, const LossSpec& loss, const FitConfig& config);

// Same computation as empirical_risk on an independently generated dataset;
// kept separate so train/eval provenance stays explicit in results.
double risk_estimate(const LinearARPredictor& predictor, std::span<const double> theta,
                     const Dataset& eval_data, const LossSpec& loss);

} // namespace wdl

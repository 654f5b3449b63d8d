#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wdlearn/rng.hpp"

namespace wdl {

// ---------------------------------------------------------------------------
// Innovations: zero-mean, unit-variance draws.
// ---------------------------------------------------------------------------

enum class InnovationKind { StandardizedUniformPm2, StandardNormal, CustomBounded };

struct InnovationSpec {
    InnovationKind kind = InnovationKind::StandardizedUniformPm2;
    // CustomBounded only: uniform on [lower, upper], centered and rescaled to
    // unit variance, then multiplied by scale (scale 0 gives a degenerate
    // all-zero innovation).
    double lower = -1.0;
    double upper = 1.0;
    double scale = 1.0;

    static InnovationSpec standardized_uniform_pm2() { return {}; }
    static InnovationSpec standard_normal() {
        return {InnovationKind::StandardNormal, 0, 0, 1};
    }
    static InnovationSpec custom_bounded(double lo, double up, double sc) {
        return {InnovationKind::CustomBounded, lo, up, sc};
    }

    double draw(SplitMix64& rng) const;

    // L^r norm of one draw, ||xi||_r = E[|xi|^r]^(1/r).
    double lr_norm(double r) const;

    // sup |xi| (infinity for the normal kind).
    double sup_abs() const;

    bool bounded() const { return kind != InnovationKind::StandardNormal; }
};

// ---------------------------------------------------------------------------
// Covariate process: d_x independent copies of a stationary AR(1) with mean m,
//   chi_t = m + phi * (chi_{t-1} - m) + eta_t.
// ---------------------------------------------------------------------------

struct CovariateSpec {
    double phi = 0.5;
    double mean = 1.0;
    InnovationSpec innovation = InnovationSpec::standardized_uniform_pm2();
    int dimension = 1;

    void validate() const;

    // sup_t ||chi_t - mean|| for bounded innovations: sup|eta| / (1 - |phi|).
    double sup_deviation() const;
};

// ---------------------------------------------------------------------------
// Model specs: Y_t = f(Y_{t-1},...; chi) + xi_t with M = 1 in the shipped
// variants; GenericAffine admits a user M as well.
// ---------------------------------------------------------------------------

enum class CovariateTiming { Contemporaneous, Lagged };

struct ArxParams {
    std::vector<double> lag_coeffs;          // a_1..a_p on Y
    double covariate_coeff = 0.0;            // b, applied to chi (dim 1 use)
    CovariateTiming timing = CovariateTiming::Contemporaneous;
};

struct TarxParams {
    double pos_coeff = 0.0;                  // on max(Y_{t-1}, 0)
    double neg_coeff = 0.0;                  // on min(Y_{t-1}, 0)
    double covariate_coeff = 0.0;
    CovariateTiming timing = CovariateTiming::Contemporaneous;
};

struct LipschitzSeqs {
    std::vector<double> y;                   // alpha_{k,Y}, k = 1..p
    std::vector<double> chi;                 // alpha_{k,chi}, k = 1..p
};

struct GenericAffineParams {
    // f(y_lags, chi_lags): y_lags[k-1] = Y_{t-k}; chi_lags is row-major with
    // chi_lags[(k-1)*d_x + i] = chi_{t-k,i} (or t-k+1 under contemporaneous
    // timing, where slot k = 1 holds chi_t).
    std::function<double(std::span<const double>, std::span<const double>)> f;
    std::function<double(std::span<const double>, std::span<const double>)> scale_fn; // M; null => M = 1
    LipschitzSeqs f_lip;
    LipschitzSeqs scale_lip;                 // for M
    LipschitzSeqs squared_scale_lip;         // for H = M^2 (ARCH bookkeeping)
    CovariateTiming timing = CovariateTiming::Contemporaneous;
};

struct AcxModelSpec {
    std::variant<ArxParams, TarxParams, GenericAffineParams> params;
    int memory = 1;                          // p

    static AcxModelSpec arx(std::vector<double> coeffs, double b,
                            CovariateTiming t = CovariateTiming::Contemporaneous);
    static AcxModelSpec tarx(double a_pos, double a_neg, double b,
                             CovariateTiming t = CovariateTiming::Contemporaneous);

    // alpha_{k,Y}(f) for k = 1..memory; |a_k| for ARX, max(|a+|,|a-|) for TARX.
    std::vector<double> y_lipschitz() const;
    std::vector<double> y_lipschitz_scale() const;          // alpha_{k,Y}(M)
    std::vector<double> y_lipschitz_squared_scale() const;  // alpha_{k,Y}(H)
    double covariate_coeff_abs() const;
    CovariateTiming timing() const;
};

// ---------------------------------------------------------------------------
// Trajectories and supervised datasets.
// ---------------------------------------------------------------------------

struct TrajectoryMeta {
    std::uint64_t seed = 0;
    int burn_in = 0;
    std::string model_label;
};

struct Trajectory {
    std::vector<double> y;
    std::vector<double> chi;                 // row-major, length n * d_x
    int d_x = 1;
    TrajectoryMeta meta;

    std::size_t size() const { return y.size(); }
    std::span<const double> chi_row(std::size_t t) const {
        return {chi.data() + t * static_cast<std::size_t>(d_x),
                static_cast<std::size_t>(d_x)};
    }
};

// Supervised pairs (X_t, Y_t) with X_t = ((Y_{t-1},chi_{t-1}),...,(Y_{t-p},chi_{t-p})),
// newest lag first; each x row is flat: [Y_{t-1}, chi_{t-1}..., Y_{t-2}, ...].
struct Dataset {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    int p = 1;
    int d_x = 1;

    std::size_t size() const { return y.size(); }
};

class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& msg, long time_index)
        : std::runtime_error(msg), time_index(time_index) {}
    long time_index;
};

Trajectory simulate(const AcxModelSpec& model, const CovariateSpec& covariate,
                    const InnovationSpec& innovation, std::size_t n,
                    int burn_in, std::uint64_t seed);

Dataset supervised_pairs(const Trajectory& traj, int p);

// ---------------------------------------------------------------------------
// Contraction / weak dependence reporting.
// ---------------------------------------------------------------------------

struct ContractionReport {
    std::vector<double> alpha_k;             // per-k max terms
    double total = 0.0;
    bool satisfied = false;
};

// alpha_k = max{alpha_k(g), alpha_{k,Y}(f) + ||xi||_r alpha_{k,Y}(M)
//               + ||xi||_r^2 alpha_{k,Y}(H)}; alpha_1(g) = |phi| for AR(1).
ContractionReport contraction_report(const AcxModelSpec& model,
                                     const CovariateSpec& covariate,
                                     double xi_norm_r);

// Decay sequences. Dual use: as the Lipschitz sequence (alpha_k)_{k>=1} and as
// the weak-dependence sequence (eps_j)_{j>=0}.
//   geometric(a):  value(i) = scale * a^i
//   riemann(gamma): value(i) = scale * (i+1)^(-gamma)
//   explicit: value(i) = values[i] (0 past the end)
struct DecaySpec {
    enum class Kind { Geometric, Riemann, Explicit } kind = Kind::Geometric;
    double a = 0.5;                          // geometric ratio, in [0,1)
    double gamma = 2.0;                      // riemann exponent, > 1
    double scale = 1.0;
    std::vector<double> values;              // explicit kind, indexed from 0

    static DecaySpec geometric(double a, double scale = 1.0);
    static DecaySpec riemann(double gamma, double scale = 1.0);
    static DecaySpec explicit_values(std::vector<double> v);

    void validate() const;

    double eps(std::size_t j) const;         // eps_j, j >= 0
    double alpha(std::size_t k) const;       // alpha_k, k >= 1
    double alpha_total() const;              // sum_{k>=1} alpha_k
    // sum_{k >= iota+1} alpha_k; closed form for geometric, numeric partial
    // sum plus integral tail bound for riemann, exact for explicit.
    double alpha_tail(std::size_t iota, std::size_t truncation) const;
};

// Upper bound on the coupling coefficient tau(j):
//   inf_{1 <= iota <= j} { alpha^(j/iota) + sum_{k >= iota+1} alpha_k },
// requires alpha = sum alpha_k < 1.
double tau_upper_bound(const DecaySpec& decay, std::size_t j, std::size_t truncation);

// ---------------------------------------------------------------------------
// Empirical covariance decay check.
// ---------------------------------------------------------------------------

struct CovDecayPoint {
    std::size_t gap = 0;
    double abs_cov = 0.0;
    double std_error = 0.0;
};

// |Cov(f1(Y_t), f2(Y_{t+r}))| with batch-means standard errors.
std::vector<CovDecayPoint> empirical_cov_decay(
    const Trajectory& traj,
    const std::function<double(double)>& f1,
    const std::function<double(double)>& f2,
    const std::vector<std::size_t>& gaps,
    std::size_t n_batches = 50);

} // namespace wdl

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wdlearn/acx.hpp"
#include "wdlearn/erm.hpp"

namespace wdl {

// ---------------------------------------------------------------------------
// Weak-dependence parameters
// ---------------------------------------------------------------------------

enum class DependenceKind { Theta, Eta, Kappa, Lambda };

// Normalized Psi: 2v / (u+v) / uv / (u+v+uv)/2 for theta/eta/kappa/lambda.
double psi_value(DependenceKind kind, double u, double v);

struct DependenceParams {
    DependenceKind kind = DependenceKind::Theta;
    double mu = 0.0;
    double l1 = 1.0;
    double l2 = 1.0;
    DecaySpec decay;                 // the sequence (eps_j)
    double nu = 1.0;                 // fast-rate exponent, in (0,1]
    double fast_c = 1.0;             // C: fast-rate variance constant
    double c3 = 1.0;                 // asymptotic-bound constant

    double psi11() const { return psi_value(kind, 1.0, 1.0); }
};

// Primary constants of the generalization bounds.
struct BoundConstants {
    double sup_loss = 1.0;           // M
    double loss_lipschitz = 1.0;     // L
    double c0 = 1.0;                 // Holder covering constant
    double d = 1.0;                  // input dimension
    double s = 1.0;                  // Holder smoothness
};

// Derived constants. C1 = 4 M^2 Psi(1,1) L1; C2 = 2 M L2 max(2^(3+mu)/Psi(1,1), 1);
// C4 = 4C1 + 8 C2^(1/(mu+2)) M^((2mu+3)/(mu+2)); C5 = 4(C + M^nu/C).
double const_c1(const BoundConstants& bc, const DependenceParams& dep);
double const_c2(const BoundConstants& bc, const DependenceParams& dep);
double const_c4(const BoundConstants& bc, const DependenceParams& dep);
double const_c5(const BoundConstants& bc, const DependenceParams& dep);
// C_{n,1} = n^2 / (4 C1 n + 8 C2^(1/(mu+2)) (nM)^((2mu+3)/(mu+2)))
double const_cn1(double n, const BoundConstants& bc, const DependenceParams& dep);
// C'_n = n^2 / (C1 n + 2 C2^(1/(mu+2)) (2nM)^((2mu+3)/(mu+2)))
double const_cpn(double n, const BoundConstants& bc, const DependenceParams& dep);
// C_{n,2} = (n^2/4) / (nC + log n * n^(nu-1/4) M^nu / C)
double const_cn2(double n, const BoundConstants& bc, const DependenceParams& dep);
// C'_{n,2} = n^2 / (nC + log n * n^(nu-1/4) (2M)^nu / (2C))
double const_cpn2(double n, const BoundConstants& bc, const DependenceParams& dep);

// A_n = 2 n M^2 Psi(1,1) L1
double variance_bound_slow(double n, double sup_loss, DependenceKind kind, double l1);

// ---------------------------------------------------------------------------
// Moment-condition certificate: sum_{j>=0} (j+1)^k eps_j <= L1 L2^k (k!)^mu.
// ---------------------------------------------------------------------------

struct MomentCheckRow {
    int k = 0;
    double lhs = 0.0;                // truncated sum + rigorous tail bound
    double rhs = 0.0;
    bool satisfied = false;
    std::string note;                // e.g. divergence reason
};

struct MomentCheckReport {
    std::vector<MomentCheckRow> rows;
    bool all_satisfied = false;      // finite certificate for k <= k_max only
};

MomentCheckReport moment_condition_check(const DecaySpec& decay, double mu,
                                         double l1, double l2, int k_max,
                                         std::size_t truncation);

// ---------------------------------------------------------------------------
// Deviation bounds
// ---------------------------------------------------------------------------

struct ProbabilityBound {
    double raw = 0.0;                // pre-clamp value
    double clamped = 0.0;            // min(raw, 1)
};

// exp(log_covering - (n^2 eps^2/4) / (C1 n + 2 C2^(1/(mu+2)) (n eps/2)^((2mu+3)/(mu+2)))),
// doubled before clamping when two_sided.
ProbabilityBound deviation_bound_slow(double eps, double n, const BoundConstants& bc,
                                      const DependenceParams& dep, double log_covering,
                                      bool two_sided = false);

// C3 * exp(log_covering + log log n - (n^2 eps^2/4) / (A'_n + B'_n (n eps/2)^nu)),
// B'_n = n^(3/4) log n / A'_n.
ProbabilityBound deviation_bound_fast(double eps, double n, double a_n_prime,
                                      double c3, double nu, double log_covering);

// ---------------------------------------------------------------------------
// Root equations and rate bounds
// ---------------------------------------------------------------------------

struct RootResult {
    double eps = 0.0;
    double residual = 0.0;           // |F(eps)| of the defining polynomial
    double upper_bound = 0.0;        // the closed-form max{...} expression
    bool log_arg_valid = true;       // fast mode: C3 log n / eta > 1
};

// Unique positive root of
//   eps^(2+2d/s) - (log(1/eta)/C_{n,1}) eps^(2d/s) - C0 (4L)^(2d/s) / C_{n,1} = 0.
RootResult solve_eps1(double n, double eta, const BoundConstants& bc,
                      const DependenceParams& dep);

// eps'_1 = [log(1/eta)/C'_n]^(1/2) (the proof's formula); with as_stated,
// the statement's [log(1/eta)/C_{n,1}]^(mu+2) instead.
double eps1_prime(double n, double eta, const BoundConstants& bc,
                  const DependenceParams& dep, bool as_stated = false);

// Minimum-n condition of the slow bound (ceiling of the max of the two terms).
double min_n_slow(double eta, const BoundConstants& bc, const DependenceParams& dep);

// Fast-mode analogues; the root equation uses log(C3 log n / eta) and C_{n,2}.
RootResult solve_eps2(double n, double eta, const BoundConstants& bc,
                      const DependenceParams& dep);
double eps2_prime(double n, double eta, const BoundConstants& bc,
                  const DependenceParams& dep);
double min_n_fast(double eta, const BoundConstants& bc, const DependenceParams& dep);

// ---------------------------------------------------------------------------
// Empirical surrogate for the fast-rate variance constant C:
// max over block lengths of Var(sum of losses)/n across replications, +20%.
// ---------------------------------------------------------------------------

double variance_constant_estimate(
    const std::function<Dataset(std::uint64_t seed, std::size_t n)>& simulate_fn,
    const LinearARPredictor& predictor, std::span<const double> theta,
    const LossSpec& loss, const std::vector<std::size_t>& block_lengths,
    int replications, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Assembled report
// ---------------------------------------------------------------------------

enum class BoundMode { Slow, Fast };

struct BoundReport {
    BoundMode mode = BoundMode::Slow;
    double n = 0.0;
    double eta = 0.0;
    double nu = 1.0;
    double c1 = 0.0, c2 = 0.0, c4 = 0.0, c5 = 0.0;
    double cn = 0.0;                 // C_{n,1} (slow) or C_{n,2} (fast)
    double cpn = 0.0;                // C'_n (slow) or C'_{n,2} (fast)
    double eps = 0.0;
    double eps_prime = 0.0;
    double total = 0.0;              // eps + eps_prime
    double confidence = 0.0;         // 1 - 2 eta
    double min_n = 0.0;
    bool min_n_satisfied = false;
    double root_residual = 0.0;
    double cs_upper = 0.0;
    double log_covering = 0.0;       // log N(H, eps/4L) at the root
    bool small_n_caveat = false;     // n below the soft asymptotic threshold
    bool log_arg_warning = false;    // fast mode: C3 log n / eta <= 1
};

BoundReport generalization_report(double n, double eta, BoundMode mode,
                                  const BoundConstants& bc, const DependenceParams& dep,
                                  double small_n_threshold = 1e3);

} // namespace wdl

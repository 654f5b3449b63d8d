#include "wdlearn/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace wdl {

double psi_value(DependenceKind kind, double u, double v) {
    switch (kind) {
        case DependenceKind::Theta: return 2.0 * v;
        case DependenceKind::Eta: return u + v;
        case DependenceKind::Kappa: return u * v;
        case DependenceKind::Lambda: return (u + v + u * v) / 2.0;
    }
    return 0.0;
}

double const_c1(const BoundConstants& bc, const DependenceParams& dep) {
    return 4.0 * bc.sup_loss * bc.sup_loss * dep.psi11() * dep.l1;
}

double const_c2(const BoundConstants& bc, const DependenceParams& dep) {
    return 2.0 * bc.sup_loss * dep.l2 *
           std::max(std::pow(2.0, 3.0 + dep.mu) / dep.psi11(), 1.0);
}

double const_c4(const BoundConstants& bc, const DependenceParams& dep) {
    double m = bc.sup_loss;
    return 4.0 * const_c1(bc, dep) +
           8.0 * std::pow(const_c2(bc, dep), 1.0 / (dep.mu + 2.0)) *
               std::pow(m, (2.0 * dep.mu + 3.0) / (dep.mu + 2.0));
}

double const_c5(const BoundConstants& bc, const DependenceParams& dep) {
    return 4.0 * (dep.fast_c + std::pow(bc.sup_loss, dep.nu) / dep.fast_c);
}

double const_cn1(double n, const BoundConstants& bc, const DependenceParams& dep) {
    double expo = (2.0 * dep.mu + 3.0) / (dep.mu + 2.0);
    return n * n / (4.0 * const_c1(bc, dep) * n +
                    8.0 * std::pow(const_c2(bc, dep), 1.0 / (dep.mu + 2.0)) *
                        std::pow(n * bc.sup_loss, expo));
}

double const_cpn(double n, const BoundConstants& bc, const DependenceParams& dep) {
    double expo = (2.0 * dep.mu + 3.0) / (dep.mu + 2.0);
    return n * n / (const_c1(bc, dep) * n +
                    2.0 * std::pow(const_c2(bc, dep), 1.0 / (dep.mu + 2.0)) *
                        std::pow(2.0 * n * bc.sup_loss, expo));
}

double const_cn2(double n, const BoundConstants& bc, const DependenceParams& dep) {
    return (n * n / 4.0) /
           (n * dep.fast_c + std::log(n) * std::pow(n, dep.nu - 0.25) *
                                 std::pow(bc.sup_loss, dep.nu) / dep.fast_c);
}

double const_cpn2(double n, const BoundConstants& bc, const DependenceParams& dep) {
    return n * n /
           (n * dep.fast_c + std::log(n) * std::pow(n, dep.nu - 0.25) *
                                 std::pow(2.0 * bc.sup_loss, dep.nu) / (2.0 * dep.fast_c));
}

double variance_bound_slow(double n, double sup_loss, DependenceKind kind, double l1) {
    return 2.0 * n * sup_loss * sup_loss * psi_value(kind, 1.0, 1.0) * l1;
}

// ---------------------------------------------------------------------------
// Moment-condition certificate
// ---------------------------------------------------------------------------

MomentCheckReport moment_condition_check(const DecaySpec& decay, double mu,
                                         double l1, double l2, int k_max,
                                         std::size_t truncation) {
    decay.validate();
    MomentCheckReport report;
    report.all_satisfied = true;
    for (int k = 0; k <= k_max; ++k) {
        MomentCheckRow row;
        row.k = k;
        double rhs = l1 * std::pow(l2, k);
        double fact = 1.0;
        for (int i = 2; i <= k; ++i) fact *= i;
        rhs *= std::pow(fact, mu);
        row.rhs = rhs;

        if (decay.kind == DecaySpec::Kind::Riemann && decay.gamma <= k + 1.0) {
            row.lhs = std::numeric_limits<double>::infinity();
            row.satisfied = false;
            row.note = "divergent: sum (j+1)^(k-gamma) with gamma <= k+1";
        } else {
            double sum = 0.0;
            std::size_t j = 0;
            for (; j < truncation; ++j)
                sum += std::pow(static_cast<double>(j + 1), k) * decay.eps(j);
            // rigorous tail bound past J = truncation
            double tail = 0.0;
            switch (decay.kind) {
                case DecaySpec::Kind::Geometric: {
                    if (decay.a > 0.0) {
                        // term ratio <= a (1 + 1/(J+1))^k =: rho; geometric tail
                        double t0 = std::pow(static_cast<double>(j + 1), k) * decay.eps(j);
                        double rho = decay.a *
                                     std::pow(1.0 + 1.0 / static_cast<double>(j + 1), k);
                        tail = (rho < 1.0) ? t0 / (1.0 - rho)
                                           : std::numeric_limits<double>::infinity();
                    }
                    break;
                }
                case DecaySpec::Kind::Riemann:
                    // integral bound: sum_{j>=J} (j+1)^(k-gamma) <= J^(k-gamma+1)/(gamma-k-1)
                    tail = decay.scale *
                           std::pow(static_cast<double>(j), k - decay.gamma + 1.0) /
                           (decay.gamma - k - 1.0);
                    break;
                case DecaySpec::Kind::Explicit:
                    for (; j < decay.values.size(); ++j)
                        sum += std::pow(static_cast<double>(j + 1), k) * decay.eps(j);
                    break;
            }
            row.lhs = sum + tail;
            row.satisfied = row.lhs <= rhs;
            if (!std::isfinite(row.lhs)) {
                row.satisfied = false;
                row.note = "tail bound divergent at this truncation";
            }
        }
        report.all_satisfied = report.all_satisfied && row.satisfied;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Deviation bounds
// ---------------------------------------------------------------------------

ProbabilityBound deviation_bound_slow(double eps, double n, const BoundConstants& bc,
                                      const DependenceParams& dep, double log_covering,
                                      bool two_sided) {
    if (eps <= 0) throw std::invalid_argument("deviation_bound_slow: eps must be > 0");
    if (n < 1) throw std::invalid_argument("deviation_bound_slow: n must be >= 1");
    double expo = (2.0 * dep.mu + 3.0) / (dep.mu + 2.0);
    double denom = const_c1(bc, dep) * n +
                   2.0 * std::pow(const_c2(bc, dep), 1.0 / (dep.mu + 2.0)) *
                       std::pow(n * eps / 2.0, expo);
    double log_p = log_covering - (n * n * eps * eps / 4.0) / denom;
    if (two_sided) log_p += std::log(2.0);
    ProbabilityBound out;
    out.raw = std::exp(log_p);
    out.clamped = std::min(out.raw, 1.0);
    return out;
}

ProbabilityBound deviation_bound_fast(double eps, double n, double a_n_prime,
                                      double c3, double nu, double log_covering) {
    if (n < 3) throw std::invalid_argument("deviation_bound_fast: n must be >= 3");
    if (eps <= 0) throw std::invalid_argument("deviation_bound_fast: eps must be > 0");
    if (a_n_prime <= 0) throw std::invalid_argument("deviation_bound_fast: A'_n must be > 0");
    double b_n_prime = std::pow(n, 0.75) * std::log(n) / a_n_prime;
    double denom = a_n_prime + b_n_prime * std::pow(n * eps / 2.0, nu);
    double log_p = std::log(c3) + log_covering + std::log(std::log(n)) -
                   (n * n * eps * eps / 4.0) / denom;
    ProbabilityBound out;
    out.raw = std::exp(log_p);
    out.clamped = std::min(out.raw, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Root equations: F(eps) = eps^(2+2d/s) - B eps^(2d/s) - G, B, G >= 0.
// F is negative near 0 (when G > 0) and eventually positive; the unique
// positive root is bracketed by the closed-form upper expression.
// ---------------------------------------------------------------------------

namespace {

RootResult solve_root(double b_coef, double g_coef, double two_d_over_s) {
    auto f = [&](double eps) {
        return std::pow(eps, 2.0 + two_d_over_s) - b_coef * std::pow(eps, two_d_over_s) -
               g_coef;
    };
    double upper = std::max(std::sqrt(2.0 * b_coef),
                            std::pow(2.0 * g_coef, 1.0 / (2.0 + two_d_over_s)));
    RootResult out;
    out.upper_bound = upper;

    double lo = 1e-30;
    double hi = std::max(upper * 2.0, 1e-20);
    while (f(hi) < 0.0) hi *= 2.0;     // safety; the lemma bound makes this a no-op
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    out.eps = 0.5 * (lo + hi);
    out.residual = std::abs(f(out.eps));
    return out;
}

} // namespace

RootResult solve_eps1(double n, double eta, const BoundConstants& bc,
                      const DependenceParams& dep) {
    if (eta <= 0.0 || eta >= 1.0)
        throw std::invalid_argument("solve_eps1: eta must be in (0,1)");
    if (n < 1) throw std::invalid_argument("solve_eps1: n must be >= 1");
    double cn1 = const_cn1(n, bc, dep);
    double two_d_over_s = 2.0 * bc.d / bc.s;
    double b_coef = std::log(1.0 / eta) / cn1;
    double g_coef = bc.c0 * std::pow(4.0 * bc.loss_lipschitz, two_d_over_s) / cn1;
    auto out = solve_root(b_coef, g_coef, two_d_over_s);
    // the Cucker-Smale expression of the statement
    out.upper_bound =
        std::max(std::sqrt(2.0 * std::log(1.0 / eta) / cn1),
                 std::pow(2.0 * bc.c0 * std::pow(4.0 * bc.loss_lipschitz, two_d_over_s) / cn1,
                          bc.s / (2.0 * bc.s + 2.0 * bc.d)));
    return out;
}

double eps1_prime(double n, double eta, const BoundConstants& bc,
                  const DependenceParams& dep, bool as_stated) {
    if (eta <= 0.0 || eta >= 1.0)
        throw std::invalid_argument("eps1_prime: eta must be in (0,1)");
    if (as_stated)
        return std::pow(std::log(1.0 / eta) / const_cn1(n, bc, dep), dep.mu + 2.0);
    return std::sqrt(std::log(1.0 / eta) / const_cpn(n, bc, dep));
}

double min_n_slow(double eta, const BoundConstants& bc, const DependenceParams& dep) {
    if (eta <= 0.0 || eta >= 1.0)
        throw std::invalid_argument("min_n_slow: eta must be in (0,1)");
    double c4 = const_c4(bc, dep);
    double m = bc.sup_loss;
    double mu2 = dep.mu + 2.0;
    double term1 =
        std::pow(2.0 * c4 * std::log(1.0 / eta) / std::sqrt(2.0 * m), mu2);
    double term2 = std::pow(2.0 * bc.c0 * c4, mu2) *
                   std::pow(4.0 * bc.loss_lipschitz, 2.0 * mu2 * bc.d / bc.s) /
                   std::pow(2.0 * m, mu2 * (2.0 * bc.s + 2.0 * bc.d) / bc.s);
    return std::ceil(std::max(term1, term2));
}

RootResult solve_eps2(double n, double eta, const BoundConstants& bc,
                      const DependenceParams& dep) {
    if (eta <= 0.0 || eta >= 1.0)
        throw std::invalid_argument("solve_eps2: eta must be in (0,1)");
    if (n < 3) throw std::invalid_argument("solve_eps2: n must be >= 3");
    double log_arg = dep.c3 * std::log(n) / eta;
    double cn2 = const_cn2(n, bc, dep);
    double two_d_over_s = 2.0 * bc.d / bc.s;
    double b_coef = std::log(log_arg) / cn2;
    bool valid = log_arg > 1.0;
    if (!valid) b_coef = 0.0;        // log would be negative; flagged below
    double g_coef = bc.c0 * std::pow(4.0 * bc.loss_lipschitz, two_d_over_s) / cn2;
    auto out = solve_root(b_coef, g_coef, two_d_over_s);
    out.log_arg_valid = valid;
    out.upper_bound =
        std::max(std::sqrt(2.0 * std::max(std::log(log_arg), 0.0) / cn2),
                 std::pow(2.0 * bc.c0 * std::pow(4.0 * bc.loss_lipschitz, two_d_over_s) / cn2,
                          bc.s / (2.0 * bc.s + 2.0 * bc.d)));
    return out;
}

double eps2_prime(double n, double eta, const BoundConstants& bc,
                  const DependenceParams& dep) {
    if (eta <= 0.0 || eta >= 1.0)
        throw std::invalid_argument("eps2_prime: eta must be in (0,1)");
    if (n < 3) throw std::invalid_argument("eps2_prime: n must be >= 3");
    double log_arg = dep.c3 * std::log(n) / eta;
    double log_term = std::max(std::log(log_arg), 0.0);
    return std::sqrt(log_term / const_cpn2(n, bc, dep));
}

double min_n_fast(double eta, const BoundConstants& bc, const DependenceParams& dep) {
    if (eta <= 0.0 || eta >= 1.0)
        throw std::invalid_argument("min_n_fast: eta must be in (0,1)");
    double c5 = const_c5(bc, dep);
    double m = bc.sup_loss;
    double term1 = std::exp(eta / dep.c3);
    double term2 = std::pow(c5 * dep.c3 / eta, 2.0) / (4.0 * std::pow(m, 4.0));
    double term3 = 2.0 * c5 * bc.c0 *
                   std::pow(4.0 * bc.loss_lipschitz, 2.0 * bc.d / bc.s) /
                   std::pow(2.0 * m, (2.0 * bc.s + 2.0 * bc.d) / bc.s);
    return std::ceil(std::max({term1, term2, term3}));
}

// ---------------------------------------------------------------------------
// variance_constant_estimate
// ---------------------------------------------------------------------------

double variance_constant_estimate(
    const std::function<Dataset(std::uint64_t seed, std::size_t n)>& simulate_fn,
    const LinearARPredictor& predictor, std::span<const double> theta,
    const LossSpec& loss, const std::vector<std::size_t>& block_lengths,
    int replications, std::uint64_t seed) {
    double worst = 0.0;
    for (std::size_t n : block_lengths) {
        double mean = 0.0, m2 = 0.0;
        for (int rep = 0; rep < replications; ++rep) {
            Dataset data = simulate_fn(derive_seed(seed, "var-est", {n, static_cast<std::uint64_t>(rep)}), n);
            double sum = 0.0;
            for (std::size_t i = 0; i < data.size(); ++i)
                sum += loss_eval(loss, predictor.predict(theta, data.x[i]), data.y[i]);
            double delta = sum - mean;
            mean += delta / static_cast<double>(rep + 1);
            m2 += delta * (sum - mean);
        }
        double var = replications > 1 ? m2 / static_cast<double>(replications - 1) : 0.0;
        worst = std::max(worst, var / static_cast<double>(n));
    }
    return 1.2 * worst;
}

// ---------------------------------------------------------------------------
// generalization_report
// ---------------------------------------------------------------------------

BoundReport generalization_report(double n, double eta, BoundMode mode,
                                  const BoundConstants& bc, const DependenceParams& dep,
                                  double small_n_threshold) {
    BoundReport report;
    report.mode = mode;
    report.n = n;
    report.eta = eta;
    report.nu = dep.nu;
    report.c1 = const_c1(bc, dep);
    report.c2 = const_c2(bc, dep);
    report.c4 = const_c4(bc, dep);
    report.c5 = const_c5(bc, dep);
    report.confidence = 1.0 - 2.0 * eta;
    report.small_n_caveat = n < small_n_threshold;

    RootResult root;
    if (mode == BoundMode::Slow) {
        report.cn = const_cn1(n, bc, dep);
        report.cpn = const_cpn(n, bc, dep);
        root = solve_eps1(n, eta, bc, dep);
        report.eps_prime = eps1_prime(n, eta, bc, dep);
        report.min_n = min_n_slow(eta, bc, dep);
    } else {
        report.cn = const_cn2(n, bc, dep);
        report.cpn = const_cpn2(n, bc, dep);
        root = solve_eps2(n, eta, bc, dep);
        report.eps_prime = eps2_prime(n, eta, bc, dep);
        report.min_n = min_n_fast(eta, bc, dep);
        report.log_arg_warning = !root.log_arg_valid;
    }
    report.eps = root.eps;
    report.root_residual = root.residual;
    report.cs_upper = root.upper_bound;
    report.total = report.eps + report.eps_prime;
    report.min_n_satisfied = n >= report.min_n;
    report.log_covering =
        bc.c0 * std::pow(root.eps / (4.0 * bc.loss_lipschitz), -2.0 * bc.d / bc.s);
    return report;
}

} // namespace wdl

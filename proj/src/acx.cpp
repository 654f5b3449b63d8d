#include "wdlearn/acx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wdl {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kSqrt12 = 3.4641016151377545871;
}

// ---------------------------------------------------------------------------
// InnovationSpec
// ---------------------------------------------------------------------------

double InnovationSpec::draw(SplitMix64& rng) const {
    switch (kind) {
        case InnovationKind::StandardizedUniformPm2:
            // U[-2,2] rescaled by sqrt(3)/2 to unit variance: U[-sqrt3, sqrt3].
            return (2.0 * rng.uniform01() - 1.0) * kSqrt3;
        case InnovationKind::StandardNormal:
            return rng.normal();
        case InnovationKind::CustomBounded: {
            if (upper <= lower) return 0.0;
            // centered and rescaled to unit variance before applying scale
            return scale * (rng.uniform01() - 0.5) * kSqrt12;
        }
    }
    return 0.0;
}

double InnovationSpec::lr_norm(double r) const {
    if (r < 1.0) throw std::invalid_argument("lr_norm: r must be >= 1");
    switch (kind) {
        case InnovationKind::StandardizedUniformPm2:
            // E|X|^r = c^r/(r+1) for U[-c,c]
            return kSqrt3 * std::pow(r + 1.0, -1.0 / r);
        case InnovationKind::StandardNormal:
            // E|X|^r = 2^(r/2) Gamma((r+1)/2) / sqrt(pi)
            return std::pow(std::pow(2.0, r / 2.0) * std::tgamma((r + 1.0) / 2.0) /
                                std::sqrt(std::numbers::pi),
                            1.0 / r);
        case InnovationKind::CustomBounded:
            if (upper <= lower) return 0.0;
            return std::abs(scale) * kSqrt3 * std::pow(r + 1.0, -1.0 / r);
    }
    return 0.0;
}

double InnovationSpec::sup_abs() const {
    switch (kind) {
        case InnovationKind::StandardizedUniformPm2:
            return kSqrt3;
        case InnovationKind::StandardNormal:
            return std::numeric_limits<double>::infinity();
        case InnovationKind::CustomBounded:
            if (upper <= lower) return 0.0;
            return std::abs(scale) * kSqrt3;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// CovariateSpec
// ---------------------------------------------------------------------------

void CovariateSpec::validate() const {
    if (std::abs(phi) >= 1.0)
        throw std::invalid_argument("covariate AR(1) requires |phi| < 1");
    if (dimension < 1)
        throw std::invalid_argument("covariate dimension must be positive");
}

double CovariateSpec::sup_deviation() const {
    double s = innovation.sup_abs();
    if (!std::isfinite(s)) return s;
    return s / (1.0 - std::abs(phi));
}

// ---------------------------------------------------------------------------
// AcxModelSpec
// ---------------------------------------------------------------------------

AcxModelSpec AcxModelSpec::arx(std::vector<double> coeffs, double b, CovariateTiming t) {
    AcxModelSpec spec;
    int p = static_cast<int>(coeffs.size());
    spec.params = ArxParams{std::move(coeffs), b, t};
    spec.memory = std::max(p, 1);
    return spec;
}

AcxModelSpec AcxModelSpec::tarx(double a_pos, double a_neg, double b, CovariateTiming t) {
    AcxModelSpec spec;
    spec.params = TarxParams{a_pos, a_neg, b, t};
    spec.memory = 1;
    return spec;
}

std::vector<double> AcxModelSpec::y_lipschitz() const {
    if (const auto* arx = std::get_if<ArxParams>(&params)) {
        std::vector<double> out(arx->lag_coeffs.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(arx->lag_coeffs[i]);
        return out;
    }
    if (const auto* tarx = std::get_if<TarxParams>(&params)) {
        // max and min are 1-Lipschitz
        return {std::max(std::abs(tarx->pos_coeff), std::abs(tarx->neg_coeff))};
    }
    return std::get<GenericAffineParams>(params).f_lip.y;
}

std::vector<double> AcxModelSpec::y_lipschitz_scale() const {
    if (const auto* gen = std::get_if<GenericAffineParams>(&params))
        return gen->scale_lip.y;
    return {};
}

std::vector<double> AcxModelSpec::y_lipschitz_squared_scale() const {
    if (const auto* gen = std::get_if<GenericAffineParams>(&params))
        return gen->squared_scale_lip.y;
    return {};
}

double AcxModelSpec::covariate_coeff_abs() const {
    if (const auto* arx = std::get_if<ArxParams>(&params)) return std::abs(arx->covariate_coeff);
    if (const auto* tarx = std::get_if<TarxParams>(&params)) return std::abs(tarx->covariate_coeff);
    const auto& chi = std::get<GenericAffineParams>(params).f_lip.chi;
    double s = 0.0;
    for (double v : chi) s += v;
    return s;
}

CovariateTiming AcxModelSpec::timing() const {
    if (const auto* arx = std::get_if<ArxParams>(&params)) return arx->timing;
    if (const auto* tarx = std::get_if<TarxParams>(&params)) return tarx->timing;
    return std::get<GenericAffineParams>(params).timing;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

Trajectory simulate(const AcxModelSpec& model, const CovariateSpec& covariate,
                    const InnovationSpec& innovation, std::size_t n,
                    int burn_in, std::uint64_t seed) {
    covariate.validate();
    if (burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");

    const int p = model.memory;
    const int d_x = covariate.dimension;
    const std::size_t total = n + static_cast<std::size_t>(burn_in);
    const bool contemporaneous = model.timing() == CovariateTiming::Contemporaneous;

    SplitMix64 xi_rng(derive_seed(seed, "xi"));
    SplitMix64 eta_rng(derive_seed(seed, "eta"));

    // full histories over burn-in + n; initial state (indices < 0) is zero
    std::vector<double> y(total, 0.0);
    std::vector<double> chi(total * static_cast<std::size_t>(d_x), 0.0);

    std::vector<double> chi_state(static_cast<std::size_t>(d_x), 0.0);
    std::vector<double> y_lags(static_cast<std::size_t>(p), 0.0);
    std::vector<double> chi_lags(static_cast<std::size_t>(p) * d_x, 0.0);

    const auto* gen = std::get_if<GenericAffineParams>(&model.params);

    for (std::size_t t = 0; t < total; ++t) {
        for (int i = 0; i < d_x; ++i) {
            double prev = (t == 0) ? 0.0 : chi_state[i];
            chi_state[i] = covariate.mean + covariate.phi * (prev - covariate.mean) +
                           covariate.innovation.draw(eta_rng);
            chi[t * d_x + i] = chi_state[i];
        }

        // lag slot k holds (Y_{t-k}, chi_{t-k}); under contemporaneous timing
        // the chi slots shift so that slot 1 is chi_t
        for (int k = 1; k <= p; ++k) {
            long yi = static_cast<long>(t) - k;
            y_lags[k - 1] = (yi >= 0) ? y[yi] : 0.0;
            long ci = static_cast<long>(t) - k + (contemporaneous ? 1 : 0);
            for (int i = 0; i < d_x; ++i)
                chi_lags[(k - 1) * static_cast<std::size_t>(d_x) + i] =
                    (ci >= 0) ? chi[static_cast<std::size_t>(ci) * d_x + i] : 0.0;
        }

        double drift;
        double vol = 1.0;
        if (const auto* arx = std::get_if<ArxParams>(&model.params)) {
            drift = 0.0;
            for (std::size_t k = 0; k < arx->lag_coeffs.size(); ++k)
                drift += arx->lag_coeffs[k] * y_lags[k];
            drift += arx->covariate_coeff * chi_lags[0];
        } else if (const auto* tarx = std::get_if<TarxParams>(&model.params)) {
            drift = tarx->pos_coeff * std::max(y_lags[0], 0.0) +
                    tarx->neg_coeff * std::min(y_lags[0], 0.0) +
                    tarx->covariate_coeff * chi_lags[0];
        } else {
            drift = gen->f ? gen->f(y_lags, chi_lags) : 0.0;
            if (gen->scale_fn) vol = gen->scale_fn(y_lags, chi_lags);
        }

        double value = vol * innovation.draw(xi_rng) + drift;
        if (!std::isfinite(value))
            throw SimulationError("simulate: non-finite value at step " +
                                      std::to_string(static_cast<long>(t) - burn_in),
                                  static_cast<long>(t) - burn_in);
        y[t] = value;
    }

    Trajectory traj;
    traj.d_x = d_x;
    traj.y.assign(y.begin() + burn_in, y.end());
    traj.chi.assign(chi.begin() + static_cast<std::size_t>(burn_in) * d_x, chi.end());
    traj.meta = {seed, burn_in, ""};
    return traj;
}

// ---------------------------------------------------------------------------
// supervised_pairs
// ---------------------------------------------------------------------------

Dataset supervised_pairs(const Trajectory& traj, int p) {
    if (p < 1) throw std::invalid_argument("supervised_pairs: p must be positive");
    const std::size_t n = traj.size();
    if (static_cast<std::size_t>(p) >= n)
        throw std::invalid_argument("supervised_pairs: need p < trajectory length");

    Dataset ds;
    ds.p = p;
    ds.d_x = traj.d_x;
    const std::size_t row_len = static_cast<std::size_t>(p) * (1 + traj.d_x);
    ds.x.reserve(n - p);
    ds.y.reserve(n - p);
    for (std::size_t t = p; t < n; ++t) {
        std::vector<double> row;
        row.reserve(row_len);
        for (int k = 1; k <= p; ++k) {
            row.push_back(traj.y[t - k]);
            auto c = traj.chi_row(t - k);
            row.insert(row.end(), c.begin(), c.end());
        }
        ds.x.push_back(std::move(row));
        ds.y.push_back(traj.y[t]);
    }
    return ds;
}

// ---------------------------------------------------------------------------
// contraction_report
// ---------------------------------------------------------------------------

ContractionReport contraction_report(const AcxModelSpec& model,
                                     const CovariateSpec& covariate,
                                     double xi_norm_r) {
    covariate.validate();
    auto a_f = model.y_lipschitz();
    auto a_m = model.y_lipschitz_scale();
    auto a_h = model.y_lipschitz_squared_scale();

    std::size_t len = std::max({a_f.size(), a_m.size(), a_h.size(), std::size_t{1}});
    ContractionReport report;
    report.alpha_k.resize(len, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
        double g = (k == 0) ? std::abs(covariate.phi) : 0.0;   // AR(1): alpha_1(g) = |phi|
        double model_term = (k < a_f.size() ? a_f[k] : 0.0) +
                            xi_norm_r * (k < a_m.size() ? a_m[k] : 0.0) +
                            xi_norm_r * xi_norm_r * (k < a_h.size() ? a_h[k] : 0.0);
        report.alpha_k[k] = std::max(g, model_term);
        report.total += report.alpha_k[k];
    }
    report.satisfied = report.total < 1.0;
    return report;
}

// ---------------------------------------------------------------------------
// DecaySpec
// ---------------------------------------------------------------------------

DecaySpec DecaySpec::geometric(double a, double scale) {
    DecaySpec d;
    d.kind = Kind::Geometric;
    d.a = a;
    d.scale = scale;
    d.validate();
    return d;
}

DecaySpec DecaySpec::riemann(double gamma, double scale) {
    DecaySpec d;
    d.kind = Kind::Riemann;
    d.gamma = gamma;
    d.scale = scale;
    d.validate();
    return d;
}

DecaySpec DecaySpec::explicit_values(std::vector<double> v) {
    DecaySpec d;
    d.kind = Kind::Explicit;
    d.values = std::move(v);
    d.validate();
    return d;
}

void DecaySpec::validate() const {
    switch (kind) {
        case Kind::Geometric:
            if (a < 0.0 || a >= 1.0)
                throw std::invalid_argument("geometric decay requires a in [0,1)");
            break;
        case Kind::Riemann:
            if (gamma <= 1.0)
                throw std::invalid_argument("riemann decay requires gamma > 1");
            break;
        case Kind::Explicit:
            for (double v : values)
                if (v < 0.0) throw std::invalid_argument("explicit decay values must be nonnegative");
            break;
    }
    if (scale < 0.0) throw std::invalid_argument("decay scale must be nonnegative");
}

double DecaySpec::eps(std::size_t j) const {
    switch (kind) {
        case Kind::Geometric:
            return scale * std::pow(a, static_cast<double>(j));
        case Kind::Riemann:
            return scale * std::pow(static_cast<double>(j + 1), -gamma);
        case Kind::Explicit:
            return j < values.size() ? values[j] : 0.0;
    }
    return 0.0;
}

double DecaySpec::alpha(std::size_t k) const {
    if (k < 1) throw std::invalid_argument("alpha indexed from k = 1");
    switch (kind) {
        case Kind::Geometric:
            return scale * std::pow(a, static_cast<double>(k));
        case Kind::Riemann:
            return scale * std::pow(static_cast<double>(k), -gamma);
        case Kind::Explicit:
            return k - 1 < values.size() ? values[k - 1] : 0.0;
    }
    return 0.0;
}

double DecaySpec::alpha_total() const {
    switch (kind) {
        case Kind::Geometric:
            return scale * a / (1.0 - a);
        case Kind::Riemann: {
            // partial sum + integral tail bound
            double sum = 0.0;
            std::size_t k = 1;
            for (; k <= 1000000; ++k) {
                double term = std::pow(static_cast<double>(k), -gamma);
                sum += term;
                if (term < 1e-16 * sum) break;
            }
            double tail = std::pow(static_cast<double>(k), 1.0 - gamma) / (gamma - 1.0);
            return scale * (sum + tail);
        }
        case Kind::Explicit: {
            double sum = 0.0;
            for (double v : values) sum += v;
            return sum;
        }
    }
    return 0.0;
}

double DecaySpec::alpha_tail(std::size_t iota, std::size_t truncation) const {
    switch (kind) {
        case Kind::Geometric:
            return scale * std::pow(a, static_cast<double>(iota + 1)) / (1.0 - a);
        case Kind::Riemann: {
            double sum = 0.0;
            for (std::size_t k = iota + 1; k <= truncation; ++k)
                sum += std::pow(static_cast<double>(k), -gamma);
            double tail = std::pow(static_cast<double>(truncation + 1), 1.0 - gamma) /
                          (gamma - 1.0);
            return scale * (sum + tail);
        }
        case Kind::Explicit: {
            double sum = 0.0;
            for (std::size_t k = iota + 1; k <= truncation && k - 1 < values.size(); ++k)
                sum += values[k - 1];
            return sum;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// tau_upper_bound
// ---------------------------------------------------------------------------

double tau_upper_bound(const DecaySpec& decay, std::size_t j, std::size_t truncation) {
    if (j < 1) throw std::invalid_argument("tau_upper_bound: j must be positive");
    double alpha = decay.alpha_total();
    if (alpha >= 1.0)
        throw std::invalid_argument("tau_upper_bound: requires sum of alpha_k < 1, got " +
                                    std::to_string(alpha));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t iota = 1; iota <= j; ++iota) {
        double value = std::pow(alpha, static_cast<double>(j) / static_cast<double>(iota)) +
                       decay.alpha_tail(iota, truncation);
        best = std::min(best, value);
    }
    return best;
}

// ---------------------------------------------------------------------------
// empirical_cov_decay
// ---------------------------------------------------------------------------

std::vector<CovDecayPoint> empirical_cov_decay(
    const Trajectory& traj,
    const std::function<double(double)>& f1,
    const std::function<double(double)>& f2,
    const std::vector<std::size_t>& gaps,
    std::size_t n_batches) {
    const std::size_t n = traj.size();
    for (std::size_t r : gaps)
        if (r >= n / 2)
            throw std::invalid_argument("empirical_cov_decay: gap must be < n/2");
    if (n_batches < 2) n_batches = 2;

    std::vector<CovDecayPoint> out;
    out.reserve(gaps.size());
    for (std::size_t r : gaps) {
        const std::size_t m = n - r;
        auto cov_on = [&](std::size_t lo, std::size_t hi) {
            double s1 = 0, s2 = 0, s12 = 0;
            for (std::size_t t = lo; t < hi; ++t) {
                double a = f1(traj.y[t]);
                double b = f2(traj.y[t + r]);
                s1 += a;
                s2 += b;
                s12 += a * b;
            }
            double cnt = static_cast<double>(hi - lo);
            return s12 / cnt - (s1 / cnt) * (s2 / cnt);
        };
        double full = cov_on(0, m);

        std::size_t batches = std::min(n_batches, m / 2);
        double mean_b = 0, m2 = 0;
        std::size_t used = 0;
        for (std::size_t b = 0; b < batches; ++b) {
            std::size_t lo = b * m / batches;
            std::size_t hi = (b + 1) * m / batches;
            if (hi - lo < 2) continue;
            double c = cov_on(lo, hi);
            ++used;
            double delta = c - mean_b;
            mean_b += delta / static_cast<double>(used);
            m2 += delta * (c - mean_b);
        }
        double se = used > 1 ? std::sqrt(m2 / static_cast<double>(used - 1)) /
                                   std::sqrt(static_cast<double>(used))
                             : 0.0;
        out.push_back({r, std::abs(full), se});
    }
    return out;
}

} // namespace wdl

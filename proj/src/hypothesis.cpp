#include "wdlearn/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wdl {

// ---------------------------------------------------------------------------
// ParamBox
// ---------------------------------------------------------------------------

ParamBox::ParamBox(std::vector<double> lo, std::vector<double> up)
    : lower(std::move(lo)), upper(std::move(up)) {
    if (lower.size() != upper.size())
        throw std::invalid_argument("ParamBox: dimension mismatch");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] <= upper[i]))
            throw std::invalid_argument("ParamBox: lower must not exceed upper");
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw std::invalid_argument("ParamBox: bounds must be finite");
    }
}

ParamBox ParamBox::cube(int dim, double half_width) {
    return ParamBox(std::vector<double>(dim, -half_width),
                    std::vector<double>(dim, half_width));
}

double ParamBox::max_abs(int i) const {
    return std::max(std::abs(lower[i]), std::abs(upper[i]));
}

bool ParamBox::contains(std::span<const double> theta, double slack) const {
    if (static_cast<int>(theta.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (theta[i] < lower[i] - slack || theta[i] > upper[i] + slack) return false;
    return true;
}

std::vector<double> ParamBox::clamp(std::span<const double> theta) const {
    std::vector<double> out(theta.begin(), theta.end());
    for (int i = 0; i < dim(); ++i) out[i] = std::clamp(out[i], lower[i], upper[i]);
    return out;
}

std::vector<double> ParamBox::center() const {
    std::vector<double> c(lower.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
    return c;
}

// ---------------------------------------------------------------------------
// LinearARPredictor
// ---------------------------------------------------------------------------

double LinearARPredictor::predict(std::span<const double> theta,
                                  std::span<const double> x) const {
    if (static_cast<int>(theta.size()) != param_dim())
        throw std::invalid_argument("predict: theta dimension mismatch");
    if (static_cast<int>(x.size()) != input_dim())
        throw std::invalid_argument("predict: input dimension mismatch");
    double acc = theta[0];
    for (int i = 0; i < input_dim(); ++i) acc += theta[i + 1] * x[i];
    return acc;
}

std::vector<double> LinearARPredictor::features(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim())
        throw std::invalid_argument("features: input dimension mismatch");
    std::vector<double> f;
    f.reserve(param_dim());
    f.push_back(1.0);
    f.insert(f.end(), x.begin(), x.end());
    return f;
}

// ---------------------------------------------------------------------------
// FeatureBasisPredictor
// ---------------------------------------------------------------------------

double FeatureBasisPredictor::predict(std::span<const double> theta,
                                      std::span<const double> x) const {
    auto f = features(x);
    if (theta.size() != f.size())
        throw std::invalid_argument("predict: theta dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += theta[i] * f[i];
    return acc;
}

std::vector<double> FeatureBasisPredictor::features(std::span<const double> x) const {
    std::vector<double> out;
    for (const auto& phi : basis) {
        auto block = phi(x);
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

FeatureBasisPredictor FeatureBasisPredictor::identity_lag(int q, int d_x) {
    FeatureBasisPredictor p;
    p.basis.push_back([](std::span<const double>) { return std::vector<double>{1.0}; });
    p.basis.push_back([](std::span<const double> x) {
        return std::vector<double>(x.begin(), x.end());
    });
    p.param_dim_ = 1 + q * (1 + d_x);
    return p;
}

FeatureBasisPredictor FeatureBasisPredictor::polynomial(int input_dim, int degree) {
    FeatureBasisPredictor p;
    p.basis.push_back([](std::span<const double>) { return std::vector<double>{1.0}; });
    for (int deg = 1; deg <= degree; ++deg) {
        p.basis.push_back([deg](std::span<const double> x) {
            std::vector<double> out(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                out[i] = std::pow(x[i], deg);
            return out;
        });
    }
    p.param_dim_ = 1 + degree * input_dim;
    return p;
}

// ---------------------------------------------------------------------------
// Class constants
// ---------------------------------------------------------------------------

void HolderClassParams::validate() const {
    if (s <= 0 || d <= 0 || c0 <= 0 || loss_lipschitz <= 0)
        throw std::invalid_argument("HolderClassParams: all fields must be positive");
}

double class_lipschitz(const LinearARPredictor& predictor, const ParamBox& box) {
    if (box.dim() != predictor.param_dim())
        throw std::invalid_argument("class_lipschitz: box dimension mismatch");
    double best = 0.0;
    for (int i = 1; i < box.dim(); ++i) best = std::max(best, box.max_abs(i));
    return best;
}

double sup_norm_bound(const LinearARPredictor& predictor, const ParamBox& box,
                      const std::vector<std::pair<double, double>>& input_box) {
    if (box.dim() != predictor.param_dim())
        throw std::invalid_argument("sup_norm_bound: box dimension mismatch");
    if (static_cast<int>(input_box.size()) != predictor.input_dim())
        throw std::invalid_argument("sup_norm_bound: input box dimension mismatch");
    double bound = box.max_abs(0);
    for (int i = 0; i < predictor.input_dim(); ++i) {
        const auto& [lo, hi] = input_box[i];
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("sup_norm_bound: unbounded input box");
        bound += box.max_abs(i + 1) * std::max(std::abs(lo), std::abs(hi));
    }
    return bound;
}

double covering_bound_parametric(const ParamBox& box, double eps,
                                 std::span<const double> feature_sup_norms) {
    if (eps <= 0) throw std::invalid_argument("covering_bound_parametric: eps must be > 0");
    if (static_cast<int>(feature_sup_norms.size()) != box.dim())
        throw std::invalid_argument("covering_bound_parametric: feature norms dimension mismatch");
    const double d = static_cast<double>(box.dim());
    double log_count = 0.0;
    for (int i = 0; i < box.dim(); ++i) {
        double cells = std::ceil(box.width(i) * feature_sup_norms[i] * d / (2.0 * eps));
        log_count += std::log(std::max(cells, 1.0));
    }
    return log_count;
}

double covering_bound_holder(const HolderClassParams& params, double u) {
    params.validate();
    if (u <= 0) throw std::invalid_argument("covering_bound_holder: u must be > 0");
    return params.c0 * std::pow(u, -2.0 * params.d / params.s);
}

} // namespace wdl

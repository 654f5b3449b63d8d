#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace wdl {

// Compact parameter box Theta = prod_i [lower_i, upper_i].
struct ParamBox {
    std::vector<double> lower;
    std::vector<double> upper;

    ParamBox() = default;
    ParamBox(std::vector<double> lo, std::vector<double> up);
    static ParamBox cube(int dim, double half_width);

    int dim() const { return static_cast<int>(lower.size()); }
    double width(int i) const { return upper[i] - lower[i]; }
    double max_abs(int i) const;
    bool contains(std::span<const double> theta, double slack = 0.0) const;
    std::vector<double> clamp(std::span<const double> theta) const;
    std::vector<double> center() const;
};

// Linear autoregressive predictor
//   h_theta(X) = theta_{0,0} + sum_{j=1..q} (theta_{j,Y} Y_{t-j}
//                                            + theta_{j,chi} . chi_{t-j}),
// theta layout (theta_{0,0}, theta_{1,Y}, theta_{1,chi}, ..., theta_{q,Y},
// theta_{q,chi}); inputs X are flat rows [Y_{t-1}, chi_{t-1}..., Y_{t-2}, ...].
struct LinearARPredictor {
    int q = 1;
    int d_x = 1;

    int param_dim() const { return 1 + q * (1 + d_x); }
    int input_dim() const { return q * (1 + d_x); }

    // Affine evaluation, strict left-to-right accumulation.
    double predict(std::span<const double> theta, std::span<const double> x) const;

    // Feature row (1, x...) so that predict = theta . features.
    std::vector<double> features(std::span<const double> x) const;
};

// Predictor over a fixed feature basis: h_theta(X) = sum_j theta_j . phi_j(X);
// reduces to LinearARPredictor under the intercept + identity-lag basis.
struct FeatureBasisPredictor {
    std::vector<std::function<std::vector<double>(std::span<const double>)>> basis;
    int param_dim_ = 0;

    int param_dim() const { return param_dim_; }
    double predict(std::span<const double> theta, std::span<const double> x) const;
    std::vector<double> features(std::span<const double> x) const;

    static FeatureBasisPredictor identity_lag(int q, int d_x);
    // monomials of each input coordinate up to the given degree
    static FeatureBasisPredictor polynomial(int input_dim, int degree);
};

// Holder-class covering parameters of the generalization bounds: smoothness s,
// input dimension d, covering constant C0, loss-composition constant L.
struct HolderClassParams {
    double s = 1.0;
    double d = 1.0;
    double c0 = 1.0;
    double loss_lipschitz = 1.0;   // L

    void validate() const;
};

// K_H: Lipschitz constant of the class w.r.t. the summed component norm
// ||x|| = sum_k (|y_k| + sum_i |chi_{k,i}|). For the affine class this is the
// largest |coefficient bound| over non-intercept coordinates (sup attained at
// a box corner; the dual of the l1 component norm is the max norm).
double class_lipschitz(const LinearARPredictor& predictor, const ParamBox& box);

// Interval-arithmetic bound on sup_{theta, x} |h_theta(x)|; input_box gives
// per-coordinate bounds [lo_i, hi_i] on X.
double sup_norm_bound(const LinearARPredictor& predictor, const ParamBox& box,
                      const std::vector<std::pair<double, double>>& input_box);

// Grid-covering log-count for an affine class:
//   log prod_i ceil(width_i * G_i * d / (2 eps)),
// G_i the feature sup-norms; an upper bound on log N(H, eps).
double covering_bound_parametric(const ParamBox& box, double eps,
                                 std::span<const double> feature_sup_norms);

// Holder-ball log covering number at radius u: C0 * u^(-2d/s). The caller
// passes u = eps / (4L) to obtain log N(H, eps/4L).
double covering_bound_holder(const HolderClassParams& params, double u);

} // namespace wdl

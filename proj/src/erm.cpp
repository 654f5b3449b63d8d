#include "wdlearn/erm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wdl {

double loss_eval(const LossSpec& loss, double y, double y_prime) {
    double diff = y - y_prime;
    return loss.kind == LossKind::Absolute ? std::abs(diff) : diff * diff;
}

double empirical_risk(const LinearARPredictor& predictor, std::span<const double> theta,
                      const Dataset& data, const LossSpec& loss) {
    if (data.size() == 0) throw std::invalid_argument("empirical_risk: empty dataset");
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        acc += loss_eval(loss, predictor.predict(theta, data.x[i]), data.y[i]);
    return acc / static_cast<double>(data.size());
}

double risk_estimate(const LinearARPredictor& predictor, std::span<const double> theta,
                     const Dataset& eval_data, const LossSpec& loss) {
    return empirical_risk(predictor, theta, eval_data, loss);
}

namespace {

struct LeastSquares {
    std::vector<double> theta;
    bool ridge_used = false;
};

LeastSquares solve_least_squares(const LinearARPredictor& predictor, const Dataset& data,
                                 bool ridge_fallback) {
    const int d = predictor.param_dim();
    const Eigen::Index m = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd design(m, d);
    Eigen::VectorXd target(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        auto f = predictor.features(data.x[i]);
        for (int jj = 0; jj < d; ++jj) design(i, jj) = f[jj];
        target(i) = data.y[i];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    LeastSquares result;
    if (qr.rank() == d) {
        Eigen::VectorXd sol = qr.solve(target);
        result.theta.assign(sol.data(), sol.data() + d);
        return result;
    }
    if (!ridge_fallback)
        throw std::runtime_error("erm_fit: singular design matrix and ridge fallback disabled");
    Eigen::MatrixXd gram = design.transpose() * design;
    Eigen::VectorXd rhs = design.transpose() * target;
    double penalty = 1e-10 * gram.trace();
    if (penalty <= 0) penalty = 1e-10;
    gram.diagonal().array() += penalty;
    Eigen::VectorXd sol = gram.ldlt().solve(rhs);
    result.theta.assign(sol.data(), sol.data() + d);
    result.ridge_used = true;
    return result;
}

// Exact per-coordinate minimization of the box-constrained quadratic
// (1/m)||F theta - y||^2; A = F'F/m, b = F'y/m precomputed by the caller.
int coordinate_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                       const ParamBox& box, std::vector<double>& theta,
                       double tol, int max_iter) {
    const int d = static_cast<int>(theta.size());
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        double max_step = 0.0;
        for (int i = 0; i < d; ++i) {
            if (gram(i, i) <= 0) continue;
            double partial = rhs(i);
            for (int jj = 0; jj < d; ++jj)
                if (jj != i) partial -= gram(i, jj) * theta[jj];
            double next = std::clamp(partial / gram(i, i), box.lower[i], box.upper[i]);
            max_step = std::max(max_step, std::abs(next - theta[i]));
            theta[i] = next;
        }
        if (max_step < tol) break;
    }
    return iter;
}

struct NelderMeadResult {
    std::vector<double> theta;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

template <class F>
NelderMeadResult nelder_mead(F&& objective, const ParamBox& box,
                             std::vector<double> start, double tol, int max_iter) {
    const int d = static_cast<int>(start.size());
    start = box.clamp(start);

    std::vector<std::vector<double>> simplex;
    simplex.push_back(start);
    for (int i = 0; i < d; ++i) {
        auto v = start;
        double h = 0.05 * std::max(box.width(i), 1e-8);
        v[i] = (v[i] + h <= box.upper[i]) ? v[i] + h : v[i] - h;
        simplex.push_back(box.clamp(v));
    }
    std::vector<double> values(d + 1);
    for (int i = 0; i <= d; ++i) values[i] = objective(simplex[i]);

    NelderMeadResult result;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::vector<int> order(d + 1);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return values[a] < values[b]; });
        {
            std::vector<std::vector<double>> s2;
            std::vector<double> v2;
            for (int idx : order) {
                s2.push_back(simplex[idx]);
                v2.push_back(values[idx]);
            }
            simplex = std::move(s2);
            values = std::move(v2);
        }

        double diameter = 0.0;
        for (int i = 1; i <= d; ++i)
            for (int jj = 0; jj < d; ++jj)
                diameter = std::max(diameter, std::abs(simplex[i][jj] - simplex[0][jj]));
        if (diameter < tol) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int jj = 0; jj < d; ++jj) centroid[jj] += simplex[i][jj] / d;

        auto affine = [&](double coef) {
            std::vector<double> p(d);
            for (int jj = 0; jj < d; ++jj)
                p[jj] = centroid[jj] + coef * (centroid[jj] - simplex[d][jj]);
            return box.clamp(p);
        };

        auto reflected = affine(1.0);
        double fr = objective(reflected);
        if (fr < values[0]) {
            auto expanded = affine(2.0);
            double fe = objective(expanded);
            if (fe < fr) {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
        } else if (fr < values[d - 1]) {
            simplex[d] = reflected;
            values[d] = fr;
        } else {
            auto contracted = affine(fr < values[d] ? 0.5 : -0.5);
            double fc = objective(contracted);
            if (fc < std::min(fr, values[d])) {
                simplex[d] = contracted;
                values[d] = fc;
            } else {
                for (int i = 1; i <= d; ++i) {
                    for (int jj = 0; jj < d; ++jj)
                        simplex[i][jj] = simplex[0][jj] + 0.5 * (simplex[i][jj] - simplex[0][jj]);
                    values[i] = objective(simplex[i]);
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i <= d; ++i)
        if (values[i] < values[best]) best = i;
    result.theta = simplex[best];
    result.value = values[best];
    result.iterations = iter;
    return result;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool on_boundary(const ParamBox& box, std::span<const double> theta) {
    for (int i = 0; i < box.dim(); ++i)
        if (theta[i] == box.lower[i] || theta[i] == box.upper[i])
            if (box.width(i) > 0) return true;
    return false;
}

} // namespace

FitResult erm_fit(const LinearARPredictor& predictor, const ParamBox& box,
                  const Dataset& data, const LossSpec& loss, const FitConfig& config) {
    const int d = predictor.param_dim();
    if (box.dim() != d) throw std::invalid_argument("erm_fit: box dimension mismatch");
    if (data.size() == 0) throw std::invalid_argument("erm_fit: empty dataset");

    auto risk = [&](std::span<const double> theta) {
        return empirical_risk(predictor, theta, data, loss);
    };

    FitResult result;

    if (config.method == FitMethod::GridRefine) {
        // exhaustive grid over the box, step config.grid_step per coordinate
        std::vector<int> steps(d);
        for (int i = 0; i < d; ++i)
            steps[i] = std::max(0, static_cast<int>(std::round(box.width(i) / config.grid_step)));
        std::vector<int> idx(d, 0);
        std::vector<double> point(d), best_point;
        double best = std::numeric_limits<double>::infinity();
        long count = 0;
        while (true) {
            for (int i = 0; i < d; ++i)
                point[i] = std::min(box.lower[i] + idx[i] * config.grid_step, box.upper[i]);
            double value = risk(point);
            ++count;
            if (value < best ||
                (value == best && norm2(point) < norm2(best_point))) {
                best = value;
                best_point = point;
            }
            int pos = 0;
            while (pos < d && ++idx[pos] > steps[pos]) idx[pos++] = 0;
            if (pos == d) break;
        }
        result.theta = best_point;
        result.empirical_risk = best;
        result.iterations = static_cast<int>(std::min<long>(count, INT32_MAX));
        result.converged = true;
        result.box_active = on_boundary(box, result.theta);
        return result;
    }

    auto ls = solve_least_squares(predictor, data, config.ridge_fallback);
    result.ridge_used = ls.ridge_used;
    auto start = box.clamp(ls.theta);
    bool clamped = start != ls.theta;

    if (loss.kind == LossKind::Squared && config.method == FitMethod::ClosedFormLeastSquares) {
        result.theta = start;
        if (clamped) {
            const Eigen::Index m = static_cast<Eigen::Index>(data.size());
            Eigen::MatrixXd design(m, d);
            Eigen::VectorXd target(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                auto f = predictor.features(data.x[i]);
                for (int jj = 0; jj < d; ++jj) design(i, jj) = f[jj];
                target(i) = data.y[i];
            }
            Eigen::MatrixXd gram = design.transpose() * design;
            Eigen::VectorXd rhs = design.transpose() * target;
            result.iterations = coordinate_descent(gram, rhs, box, result.theta,
                                                   config.tolerance, config.max_iterations);
        }
        result.empirical_risk = risk(result.theta);
        result.box_active = on_boundary(box, result.theta);
        return result;
    }

    // Direct search: Nelder-Mead from the least-squares start, then random
    // restarts; keep the best (ties broken by smaller Euclidean norm).
    auto objective = [&](const std::vector<double>& theta) { return risk(theta); };
    auto best = nelder_mead(objective, box, start, config.tolerance, config.max_iterations);
    int total_iters = best.iterations;
    bool all_converged = best.converged;

    SplitMix64 restart_rng(derive_seed(config.seed, "erm-restart"));
    for (int r = 0; r < config.restarts; ++r) {
        std::vector<double> point(d);
        for (int i = 0; i < d; ++i)
            point[i] = box.lower[i] + restart_rng.uniform01() * box.width(i);
        auto run = nelder_mead(objective, box, point, config.tolerance, config.max_iterations);
        total_iters += run.iterations;
        all_converged = all_converged && run.converged;
        if (run.value < best.value ||
            (run.value == best.value && norm2(run.theta) < norm2(best.theta))) {
            best = run;
        }
    }

    // never worse than the least-squares initialization
    double start_risk = risk(start);
    if (start_risk < best.value) {
        best.theta = start;
        best.value = start_risk;
    }

    result.theta = best.theta;
    result.empirical_risk = best.value;
    result.iterations = total_iters;
    result.converged = all_converged;
    result.box_active = on_boundary(box, result.theta);
    return result;
}

} // namespace wdl

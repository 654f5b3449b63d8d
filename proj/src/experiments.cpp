#include "wdlearn/experiments.hpp"

#include "wdlearn/csv.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace wdl {

const char* loss_kind_name(LossKind kind) {
    return kind == LossKind::Squared ? "squared" : "absolute";
}

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "squared") return LossKind::Squared;
    if (name == "absolute") return LossKind::Absolute;
    throw std::invalid_argument("unknown loss kind: " + name);
}

std::vector<std::size_t> ExperimentConfig::effective_n_grid() const {
    if (!n_grid.empty()) return n_grid;
    std::vector<std::size_t> grid;
    for (std::size_t n = 100; n <= 2000; n += 20) grid.push_back(n);
    return grid;
}

namespace {

double estimate_output_bound(const ExperimentConfig& config, const Trajectory& reference) {
    if (config.output_bound > 0) return config.output_bound;
    double peak = 0.0;
    for (double y : reference.y) peak = std::max(peak, std::abs(y));
    return 1.05 * std::max(peak, 1e-12);
}

FitConfig fit_config_for(LossKind kind, std::uint64_t seed) {
    FitConfig fc;
    fc.method = (kind == LossKind::Squared) ? FitMethod::ClosedFormLeastSquares
                                            : FitMethod::NelderMead;
    fc.seed = seed;
    return fc;
}

std::uint64_t rep_stream(const ExperimentConfig& config, LossKind loss,
                         std::size_t n, int rep) {
    std::uint64_t h = derive_seed(config.base_seed, loss_kind_name(loss));
    h = hash_word(h, n);
    return hash_word(h, static_cast<std::uint64_t>(rep));
}

} // namespace

TargetFit estimate_target(const ExperimentConfig& config, LossKind loss_kind) {
    const auto predictor = config.predictor();
    Trajectory reference =
        simulate(config.model, config.covariate, config.innovation,
                 config.reference_size + config.q, config.burn_in,
                 derive_seed(config.base_seed, "reference"));
    double b_y = estimate_output_bound(config, reference);
    LossSpec loss{loss_kind, b_y};
    Dataset data = supervised_pairs(reference, config.q);
    auto fit = erm_fit(predictor, config.box(), data, loss,
                       fit_config_for(loss_kind, derive_seed(config.base_seed, "reference-fit")));
    return {fit.theta, fit.empirical_risk, b_y, fit.box_active};
}

ExperimentResult run_excess_risk_curve(const ExperimentConfig& config) {
    const auto predictor = config.predictor();
    const auto box = config.box();
    const auto grid = config.effective_n_grid();
    for (std::size_t n : grid)
        if (n < static_cast<std::size_t>(config.q) + 1)
            throw std::invalid_argument("n grid entries must exceed the predictor memory");

    ExperimentResult result;
    for (LossKind kind : config.loss_kinds)
        result.targets[kind] = estimate_target(config, kind);

    struct Task {
        LossKind loss;
        std::size_t n;
        int rep;
    };
    std::vector<Task> tasks;
    for (LossKind kind : config.loss_kinds)
        for (std::size_t n : grid)
            for (int rep = 0; rep < config.replications; ++rep)
                tasks.push_back({kind, n, rep});

    std::vector<ReplicationRecord> records(tasks.size());
    std::atomic<std::size_t> cursor{0};

    auto worker = [&]() {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            ReplicationRecord rec;
            rec.loss = task.loss;
            rec.n = task.n;
            rec.rep = task.rep;
            try {
                std::uint64_t h = rep_stream(config, task.loss, task.n, task.rep);
                const TargetFit& target = result.targets.at(task.loss);
                LossSpec loss{task.loss, target.output_bound};

                Trajectory train = simulate(config.model, config.covariate,
                                            config.innovation, task.n + config.q,
                                            config.burn_in, hash_tag(h, "train"));
                Dataset train_data = supervised_pairs(train, config.q);
                auto fit = erm_fit(predictor, box, train_data, loss,
                                   fit_config_for(task.loss, hash_tag(h, "fit")));

                std::size_t eval_n =
                    config.eval_size_override ? config.eval_size_override : task.n;
                Trajectory eval = simulate(config.model, config.covariate,
                                           config.innovation, eval_n + config.q,
                                           config.burn_in, hash_tag(h, "eval"));
                Dataset eval_data = supervised_pairs(eval, config.q);
                rec.eval_risk = risk_estimate(predictor, fit.theta, eval_data, loss);
                rec.abs_excess = std::abs(rec.eval_risk - target.risk);
            } catch (const std::exception&) {
                rec.failed = true;
            }
            records[i] = rec;
        }
    };

    int workers = std::max(config.parallel_workers, 1);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // deterministic reduction in task order
    for (const auto& rec : records)
        if (rec.failed) ++result.failures;
    if (result.failures * 100 > static_cast<int>(tasks.size()))
        throw std::runtime_error("run_excess_risk_curve: more than 1% of replications failed");

    std::size_t idx = 0;
    for (LossKind kind : config.loss_kinds) {
        const TargetFit& target = result.targets.at(kind);
        for (std::size_t n : grid) {
            CurvePoint point;
            point.loss = kind;
            point.n = n;
            double sum = 0.0, sum_sq = 0.0, sum_abs = 0.0;
            int count = 0;
            for (int rep = 0; rep < config.replications; ++rep, ++idx) {
                const auto& rec = records[idx];
                result.records.push_back(rec);
                if (rec.failed) continue;
                sum += rec.eval_risk;
                sum_sq += rec.eval_risk * rec.eval_risk;
                sum_abs += rec.abs_excess;
                ++count;
            }
            point.reps = count;
            if (count > 0) {
                double mean = sum / count;
                point.mean_excess = std::abs(mean - target.risk);
                point.mean_abs_excess = sum_abs / count;
                double var = count > 1 ? (sum_sq - count * mean * mean) / (count - 1) : 0.0;
                point.sd = std::sqrt(std::max(var, 0.0));
            }
            result.curve.push_back(point);
        }
    }
    return result;
}

std::vector<OverlayRow> overlay_bounds(const ExperimentResult& result,
                                       const ExperimentConfig& config,
                                       const BoundOverlayInputs& inputs) {
    std::vector<OverlayRow> table;
    double input_dim = static_cast<double>(config.q * (1 + config.covariate.dimension));
    for (const auto& point : result.curve) {
        const TargetFit& target = result.targets.at(point.loss);
        LossSpec loss{point.loss, target.output_bound};
        BoundConstants bc;
        bc.sup_loss = loss.sup_loss();
        bc.loss_lipschitz = loss.lipschitz();
        bc.c0 = inputs.c0;
        bc.d = input_dim;
        bc.s = inputs.s > 0 ? inputs.s : input_dim;

        double n = static_cast<double>(point.n);
        auto slow = generalization_report(n, inputs.eta, BoundMode::Slow, bc, inputs.dep);
        auto fast = generalization_report(n, inputs.eta, BoundMode::Fast, bc, inputs.dep);

        OverlayRow row;
        row.loss = point.loss;
        row.n = point.n;
        row.empirical = point.mean_excess;
        row.slow_total = slow.total;
        row.fast_total = fast.total;
        row.min_n = slow.min_n;
        row.min_n_satisfied = slow.min_n_satisfied;
        row.dominated = !row.min_n_satisfied || row.slow_total >= row.empirical;
        table.push_back(row);
    }
    return table;
}

// ---------------------------------------------------------------------------
// CSV / SVG emitters
// ---------------------------------------------------------------------------

void emit_csv(const std::vector<CurvePoint>& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "loss,n,mean_excess,sd,reps\n";
    for (const auto& p : curve)
        out << loss_kind_name(p.loss) << ',' << p.n << ',' << format_double(p.mean_excess)
            << ',' << format_double(p.sd) << ',' << p.reps << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<CurvePoint> read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "loss,n,mean_excess,sd,reps")
        throw std::runtime_error(path + ": bad curve CSV header");
    std::vector<CurvePoint> curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string loss, n, mean, sd, reps;
        std::getline(ss, loss, ',');
        std::getline(ss, n, ',');
        std::getline(ss, mean, ',');
        std::getline(ss, sd, ',');
        std::getline(ss, reps, ',');
        CurvePoint p;
        p.loss = loss_kind_from_name(loss);
        p.n = std::stoull(n);
        p.mean_excess = std::stod(mean);
        p.sd = std::stod(sd);
        p.reps = std::stoi(reps);
        curve.push_back(p);
    }
    return curve;
}

void emit_records_csv(const std::vector<ReplicationRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "loss,n,rep,eval_risk,abs_excess\n";
    for (const auto& r : records) {
        if (r.failed) continue;
        out << loss_kind_name(r.loss) << ',' << r.n << ',' << r.rep << ','
            << format_double(r.eval_risk) << ',' << format_double(r.abs_excess) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_overlay_csv(const std::vector<OverlayRow>& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "loss,n,empirical,slow_total,fast_total,min_n,min_n_ok,dominated\n";
    for (const auto& r : table)
        out << loss_kind_name(r.loss) << ',' << r.n << ',' << format_double(r.empirical)
            << ',' << format_double(r.slow_total) << ',' << format_double(r.fast_total)
            << ',' << format_double(r.min_n) << ',' << (r.min_n_satisfied ? 1 : 0) << ','
            << (r.dominated ? 1 : 0) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_svg_plot(const std::vector<CurvePoint>& curve, const std::string& path,
                   bool log_y) {
    const double width = 720, height = 440;
    const double ml = 70, mr = 20, mt = 20, mb = 50;

    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    auto y_of = [&](double v) { return log_y ? std::log10(std::max(v, 1e-12)) : v; };
    for (const auto& p : curve) {
        x_min = std::min(x_min, static_cast<double>(p.n));
        x_max = std::max(x_max, static_cast<double>(p.n));
        y_min = std::min(y_min, y_of(p.mean_excess));
        y_max = std::max(y_max, y_of(p.mean_excess));
    }
    if (curve.empty()) {
        x_min = 0; x_max = 1; y_min = 0; y_max = 1;
    }
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;

    auto px = [&](double n) { return ml + (n - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto py = [&](double v) {
        return height - mb - (y_of(v) - y_min) / (y_max - y_min) * (height - mt - mb);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (width / 2) << "\" y=\"" << (height - 12)
        << "\" text-anchor=\"middle\" font-size=\"13\">n</text>\n";
    out << "<text x=\"16\" y=\"" << (height / 2)
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (height / 2) << ")\">" << (log_y ? "log10 excess risk" : "excess risk")
        << "</text>\n";

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    int series = 0;
    for (LossKind kind : {LossKind::Squared, LossKind::Absolute}) {
        std::vector<const CurvePoint*> pts;
        for (const auto& p : curve)
            if (p.loss == kind) pts.push_back(&p);
        if (pts.empty()) continue;
        std::sort(pts.begin(), pts.end(),
                  [](const CurvePoint* a, const CurvePoint* b) { return a->n < b->n; });
        out << "<polyline fill=\"none\" stroke=\"" << colors[series % 4]
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto* p : pts)
            out << px(static_cast<double>(p->n)) << ',' << py(p->mean_excess) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << width - mr - 120 << "\" y=\"" << mt + 16 + 16 * series
            << "\" font-size=\"12\" fill=\"" << colors[series % 4] << "\">"
            << loss_kind_name(kind) << "</text>\n";
        ++series;
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace wdl

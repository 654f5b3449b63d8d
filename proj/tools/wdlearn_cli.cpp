#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdlearn/acx.hpp"
#include "wdlearn/bounds.hpp"
#include "wdlearn/config.hpp"
#include "wdlearn/csv.hpp"
#include "wdlearn/erm.hpp"
#include "wdlearn/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wdl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct CliOptions {
    std::string config_path;

    // simulate
    std::size_t n = 0;
    bool n_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;

    // fit
    std::string train_csv;
    std::string loss_name;
    std::string method_name = "auto";

    // bound
    double eta = 0.05;
    std::string mode_name = "slow";
    double output_bound = 1.0;

    // experiment
    bool desk = false;
    bool full = false;
    int workers = 0;
};

AppConfig load_or_default(const CliOptions& opt) {
    if (opt.config_path.empty()) return AppConfig{};
    return load_config(opt.config_path);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

void write_json(const std::string& path, const json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

int cmd_simulate(const CliOptions& opt) {
    AppConfig config = load_or_default(opt);
    auto& exp = config.experiment;
    std::size_t n = opt.n_set ? opt.n : exp.reference_size;
    std::uint64_t seed = opt.seed_set ? opt.seed : exp.base_seed;
    if (n == 0) throw ConfigError("--n must be positive");

    Trajectory traj = simulate(exp.model, exp.covariate, exp.innovation, n,
                               exp.burn_in, seed);
    if (opt.out.empty()) throw ConfigError("--out is required for simulate");
    write_trajectory_csv(traj, opt.out);
    std::cout << "rows\t" << traj.size() << "\n"
              << "out\t" << opt.out << "\n";
    return kExitOk;
}

FitMethod resolve_method(const std::string& name, LossKind loss) {
    if (name == "auto")
        return loss == LossKind::Squared ? FitMethod::ClosedFormLeastSquares
                                        : FitMethod::NelderMead;
    if (name == "least_squares") return FitMethod::ClosedFormLeastSquares;
    if (name == "nelder_mead") return FitMethod::NelderMead;
    if (name == "grid_refine") return FitMethod::GridRefine;
    throw ConfigError("unknown fit method: " + name);
}

int cmd_fit(const CliOptions& opt) {
    AppConfig config = load_or_default(opt);
    auto& exp = config.experiment;
    if (opt.train_csv.empty()) throw ConfigError("--train is required for fit");

    Trajectory traj = read_trajectory_csv(opt.train_csv);
    if (traj.d_x != exp.covariate.dimension)
        throw ConfigError("trajectory covariate dimension does not match config");
    Dataset data = supervised_pairs(traj, exp.q);

    LossKind loss_kind = opt.loss_name.empty() ? exp.loss_kinds.front()
                                               : loss_kind_from_name(opt.loss_name);
    double b_y = exp.output_bound;
    if (b_y <= 0) {
        double max_abs = 0;
        for (double y : traj.y) max_abs = std::max(max_abs, std::abs(y));
        b_y = 1.05 * max_abs;
    }
    LossSpec loss{loss_kind, b_y};

    FitConfig fit_config;
    fit_config.method = resolve_method(opt.method_name, loss_kind);
    fit_config.seed = opt.seed_set ? opt.seed : exp.base_seed;

    FitResult fit = erm_fit(exp.predictor(), exp.box(), data, loss, fit_config);

    json doc = fit_result_to_json(fit);
    doc["loss"] = loss_kind_name(loss_kind);
    doc["n_pairs"] = data.size();
    doc["output_bound"] = b_y;
    if (!opt.out.empty()) write_json(opt.out, doc);
    std::cout << "loss\t" << loss_kind_name(loss_kind) << "\n"
              << "empirical_risk\t" << format_double(fit.empirical_risk) << "\n"
              << "ridge_used\t" << (fit.ridge_used ? 1 : 0) << "\n"
              << "box_active\t" << (fit.box_active ? 1 : 0) << "\n";
    std::cout << "theta";
    for (double v : fit.theta) std::cout << "\t" << format_double(v);
    std::cout << "\n";
    return kExitOk;
}

int cmd_bound(const CliOptions& opt) {
    AppConfig config = load_or_default(opt);
    if (!(opt.eta > 0.0 && opt.eta < 1.0))
        throw ConfigError("--eta must lie in (0, 1)");
    if (!opt.n_set || opt.n == 0) throw ConfigError("--n must be positive");
    BoundMode mode;
    if (opt.mode_name == "slow") mode = BoundMode::Slow;
    else if (opt.mode_name == "fast") mode = BoundMode::Fast;
    else throw ConfigError("--mode must be slow or fast");

    LossKind loss_kind = opt.loss_name.empty() ? config.experiment.loss_kinds.front()
                                               : loss_kind_from_name(opt.loss_name);
    double b_y = config.experiment.output_bound > 0 ? config.experiment.output_bound
                                                    : opt.output_bound;
    BoundConstants bc = config.bound_constants(loss_kind, b_y);
    BoundReport report = generalization_report(static_cast<double>(opt.n), opt.eta,
                                               mode, bc, config.dependence);

    json doc = bound_report_to_json(report);
    if (!opt.out.empty()) write_json(opt.out, doc);

    auto row = [](const char* name, double value) {
        std::cout << name << "\t" << format_double(value) << "\n";
    };
    row("C1", report.c1);
    row("C2", report.c2);
    row("C4", report.c4);
    row("C5", report.c5);
    row(mode == BoundMode::Slow ? "Cn1" : "Cn2", report.cn);
    row(mode == BoundMode::Slow ? "Cpn" : "Cpn2", report.cpn);
    row(mode == BoundMode::Slow ? "eps1" : "eps2", report.eps);
    row(mode == BoundMode::Slow ? "eps1p" : "eps2p", report.eps_prime);
    row("total", report.total);
    row("confidence", report.confidence);
    row("min_n", report.min_n);
    std::cout << "min_n_satisfied\t" << (report.min_n_satisfied ? 1 : 0) << "\n";
    if (mode == BoundMode::Fast)
        std::cout << "log_arg_warning\t" << (report.log_arg_warning ? 1 : 0) << "\n";
    return kExitOk;
}

int cmd_experiment(const CliOptions& opt) {
    AppConfig config = load_or_default(opt);
    auto& exp = config.experiment;
    if (opt.desk && opt.full) throw ConfigError("--desk and --full are exclusive");
    if (opt.desk) {
        exp.replications = 100;
        exp.n_grid = {100, 400, 1600};
    } else if (opt.full) {
        exp.replications = 500;
        exp.n_grid.clear();          // default 100..2000 step 20
    }
    if (opt.workers > 0) exp.parallel_workers = opt.workers;
    if (opt.seed_set) exp.base_seed = opt.seed;

    fs::create_directories(config.output_dir);
    ExperimentResult result = run_excess_risk_curve(exp);

    std::string prefix = config.output_dir + "/" + exp.model_label;
    emit_csv(result.curve, prefix + "_curve.csv");
    emit_records_csv(result.records, prefix + "_records.csv");
    emit_svg_plot(result.curve, prefix + "_curve.svg");

    BoundOverlayInputs inputs;
    inputs.c0 = config.c0;
    inputs.s = config.s;
    inputs.dep = config.dependence;
    auto overlay = overlay_bounds(result, exp, inputs);
    emit_overlay_csv(overlay, prefix + "_overlay.csv");

    json manifest = {{"config", config_to_json(config)},
                     {"failures", result.failures},
                     {"targets", json::object()},
                     {"artifacts",
                      {prefix + "_curve.csv", prefix + "_records.csv",
                       prefix + "_curve.svg", prefix + "_overlay.csv"}}};
    for (const auto& [kind, target] : result.targets)
        manifest["targets"][loss_kind_name(kind)] = {
            {"theta", target.theta},
            {"risk", target.risk},
            {"output_bound", target.output_bound}};
    write_json(prefix + "_manifest.json", manifest);

    std::cout << "loss\tn\tmean_excess\tsd\treps\n";
    for (const auto& point : result.curve)
        std::cout << loss_kind_name(point.loss) << "\t" << point.n << "\t"
                  << format_double(point.mean_excess) << "\t"
                  << format_double(point.sd) << "\t" << point.reps << "\n";
    return kExitOk;
}

int cmd_check(const CliOptions& opt) {
    AppConfig config = load_or_default(opt);
    auto& exp = config.experiment;
    double xi_norm = exp.innovation.lr_norm(2.0);
    ContractionReport contraction = contraction_report(exp.model, exp.covariate, xi_norm);
    MomentCheckReport moment = moment_condition_check(
        config.dependence.decay, config.dependence.mu, config.dependence.l1,
        config.dependence.l2, 10, 100000);

    json doc = {{"contraction", contraction_report_to_json(contraction)},
                {"moment", moment_report_to_json(moment)}};
    if (!opt.out.empty()) write_json(opt.out, doc);

    std::cout << "contraction_total\t" << format_double(contraction.total) << "\n"
              << "contraction_satisfied\t" << (contraction.satisfied ? 1 : 0) << "\n";
    std::cout << "k\tlhs\trhs\tsatisfied\n";
    for (const auto& row : moment.rows)
        std::cout << row.k << "\t" << format_double(row.lhs) << "\t"
                  << format_double(row.rhs) << "\t" << (row.satisfied ? 1 : 0)
                  << "\n";
    std::cout << "moment_all_satisfied\t" << (moment.all_satisfied ? 1 : 0) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weakly dependent time-series simulation, ERM fitting, and "
                 "generalization-bound evaluation"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "JSON config file (flags override it)");

    auto* sim = app.add_subcommand("simulate", "Simulate a trajectory to CSV");
    sim->add_option("--n", opt.n, "Trajectory length");
    auto* sim_n = sim->get_option("--n");
    sim->add_option("--seed", opt.seed, "Base RNG seed");
    auto* sim_seed = sim->get_option("--seed");
    sim->add_option("--out", opt.out, "Output CSV path")->required();

    auto* fit = app.add_subcommand("fit", "Fit a predictor by ERM on a trajectory CSV");
    fit->add_option("--train", opt.train_csv, "Training trajectory CSV")->required();
    fit->add_option("--out", opt.out, "Output JSON path");
    fit->add_option("--loss", opt.loss_name, "Loss: squared or absolute");
    fit->add_option("--method", opt.method_name,
                    "Fit method: auto, least_squares, nelder_mead, grid_refine");
    fit->add_option("--seed", opt.seed, "Restart-stream seed");
    auto* fit_seed = fit->get_option("--seed");

    auto* bound = app.add_subcommand("bound", "Evaluate a generalization bound");
    bound->add_option("--n", opt.n, "Sample size")->required();
    auto* bound_n = bound->get_option("--n");
    bound->add_option("--eta", opt.eta, "Confidence level parameter, in (0,1)");
    bound->add_option("--mode", opt.mode_name, "Bound mode: slow or fast");
    bound->add_option("--loss", opt.loss_name, "Loss: squared or absolute");
    bound->add_option("--output-bound", opt.output_bound,
                      "Output bound B_Y when the config leaves it at 0");
    bound->add_option("--out", opt.out, "Output JSON path");

    auto* experiment = app.add_subcommand(
        "experiment", "Run the excess-risk replication experiment");
    experiment->add_flag("--desk", opt.desk,
                         "Desk scale: 100 replications, n in {100,400,1600}");
    experiment->add_flag("--full", opt.full,
                         "Full scale: 500 replications, n = 100..2000 step 20");
    experiment->add_option("--workers", opt.workers, "Worker thread count");
    experiment->add_option("--seed", opt.seed, "Base seed override");
    auto* exp_seed = experiment->get_option("--seed");

    auto* check = app.add_subcommand(
        "check", "Report the contraction and moment-condition certificates");
    check->add_option("--out", opt.out, "Output JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    opt.n_set = (sim_n && sim_n->count() > 0) || (bound_n && bound_n->count() > 0);
    opt.seed_set = (sim_seed && sim_seed->count() > 0) ||
                   (fit_seed && fit_seed->count() > 0) ||
                   (exp_seed && exp_seed->count() > 0);

    try {
        if (sim->parsed()) return cmd_simulate(opt);
        if (fit->parsed()) return cmd_fit(opt);
        if (bound->parsed()) return cmd_bound(opt);
        if (experiment->parsed()) return cmd_experiment(opt);
        if (check->parsed()) return cmd_check(opt);
        return kExitValidation;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

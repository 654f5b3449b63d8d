#include "wdlearn/config.hpp"

#include <fstream>
#include <set>

namespace wdl {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("section '" + section + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.contains(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in section '" + section + "'");
}

InnovationSpec parse_innovation(const json& obj, const std::string& section) {
    require_keys(obj, section, {"kind", "lower", "upper", "scale"});
    std::string kind = obj.value("kind", "standardized_uniform_pm2");
    if (kind == "standardized_uniform_pm2") return InnovationSpec::standardized_uniform_pm2();
    if (kind == "standard_normal") return InnovationSpec::standard_normal();
    if (kind == "custom_bounded")
        return InnovationSpec::custom_bounded(obj.value("lower", -1.0), obj.value("upper", 1.0),
                                              obj.value("scale", 1.0));
    throw ConfigError("unknown innovation kind: " + kind);
}

CovariateTiming parse_timing(const std::string& name) {
    if (name == "contemporaneous") return CovariateTiming::Contemporaneous;
    if (name == "lagged") return CovariateTiming::Lagged;
    throw ConfigError("unknown covariate_timing: " + name);
}

DecaySpec parse_decay(const json& obj) {
    require_keys(obj, "dependence.decay", {"kind", "a", "gamma", "scale", "values"});
    std::string kind = obj.value("kind", "geometric");
    try {
        if (kind == "geometric")
            return DecaySpec::geometric(obj.value("a", 0.5), obj.value("scale", 1.0));
        if (kind == "riemann")
            return DecaySpec::riemann(obj.value("gamma", 2.0), obj.value("scale", 1.0));
        if (kind == "explicit")
            return DecaySpec::explicit_values(obj.value("values", std::vector<double>{}));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown decay kind: " + kind);
}

DependenceKind parse_dependence_kind(const std::string& name) {
    if (name == "theta") return DependenceKind::Theta;
    if (name == "eta") return DependenceKind::Eta;
    if (name == "kappa") return DependenceKind::Kappa;
    if (name == "lambda") return DependenceKind::Lambda;
    throw ConfigError("unknown dependence kind: " + name);
}

} // namespace

BoundConstants AppConfig::bound_constants(LossKind kind, double output_bound) const {
    LossSpec loss{kind, output_bound};
    BoundConstants bc;
    bc.sup_loss = m_override > 0 ? m_override : loss.sup_loss();
    bc.loss_lipschitz = l_override > 0 ? l_override : loss.lipschitz();
    bc.c0 = c0;
    bc.d = input_dim();
    bc.s = s > 0 ? s : bc.d;
    return bc;
}

AppConfig parse_config(const json& doc) {
    require_keys(doc, "(top level)",
                 {"version", "model", "covariate", "innovation", "predictor", "loss",
                  "dependence", "bound_constants", "experiment", "output"});
    if (doc.value("version", 1) != 1) throw ConfigError("unsupported config version");

    AppConfig config;
    auto& exp = config.experiment;

    if (doc.contains("model")) {
        const auto& m = doc["model"];
        require_keys(m, "model",
                     {"variant", "lag_coeffs", "pos_coeff", "neg_coeff", "covariate_coeff",
                      "covariate_timing"});
        std::string variant = m.value("variant", "arx");
        auto timing = parse_timing(m.value("covariate_timing", "contemporaneous"));
        if (variant == "arx") {
            exp.model = AcxModelSpec::arx(
                m.value("lag_coeffs", std::vector<double>{0.25, -0.4}),
                m.value("covariate_coeff", 0.8), timing);
        } else if (variant == "tarx") {
            exp.model = AcxModelSpec::tarx(m.value("pos_coeff", 0.2), m.value("neg_coeff", -0.6),
                                           m.value("covariate_coeff", 1.5), timing);
        } else {
            throw ConfigError("unknown model variant: " + variant);
        }
        exp.model_label = variant;
    }

    if (doc.contains("covariate")) {
        const auto& c = doc["covariate"];
        require_keys(c, "covariate", {"phi", "mean", "dimension", "innovation"});
        exp.covariate.phi = c.value("phi", 0.5);
        exp.covariate.mean = c.value("mean", 1.0);
        exp.covariate.dimension = c.value("dimension", 1);
        if (c.contains("innovation"))
            exp.covariate.innovation = parse_innovation(c["innovation"], "covariate.innovation");
        try {
            exp.covariate.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }

    if (doc.contains("innovation"))
        exp.innovation = parse_innovation(doc["innovation"], "innovation");

    if (doc.contains("predictor")) {
        const auto& p = doc["predictor"];
        require_keys(p, "predictor", {"q", "box_half_width"});
        exp.q = p.value("q", 1);
        exp.box_half_width = p.value("box_half_width", 10.0);
        if (exp.q < 1) throw ConfigError("predictor.q must be positive");
        if (exp.box_half_width <= 0) throw ConfigError("predictor.box_half_width must be positive");
    }

    if (doc.contains("loss")) {
        const auto& l = doc["loss"];
        require_keys(l, "loss", {"kinds", "output_bound"});
        if (l.contains("kinds")) {
            exp.loss_kinds.clear();
            for (const auto& name : l["kinds"])
                exp.loss_kinds.push_back(loss_kind_from_name(name.get<std::string>()));
            if (exp.loss_kinds.empty()) throw ConfigError("loss.kinds must be nonempty");
        }
        exp.output_bound = l.value("output_bound", 0.0);
    }

    if (doc.contains("dependence")) {
        const auto& d = doc["dependence"];
        require_keys(d, "dependence", {"kind", "mu", "L1", "L2", "nu", "C", "C3", "decay"});
        config.dependence.kind = parse_dependence_kind(d.value("kind", "theta"));
        config.dependence.mu = d.value("mu", 0.0);
        config.dependence.l1 = d.value("L1", 1.0);
        config.dependence.l2 = d.value("L2", 1.0);
        config.dependence.nu = d.value("nu", 1.0);
        config.dependence.fast_c = d.value("C", 1.0);
        config.dependence.c3 = d.value("C3", 1.0);
        if (config.dependence.mu < 0) throw ConfigError("dependence.mu must be >= 0");
        if (config.dependence.nu <= 0 || config.dependence.nu > 1)
            throw ConfigError("dependence.nu must be in (0,1]");
        if (config.dependence.fast_c <= 0) throw ConfigError("dependence.C must be > 0");
        if (config.dependence.c3 <= 0) throw ConfigError("dependence.C3 must be > 0");
        if (d.contains("decay")) config.dependence.decay = parse_decay(d["decay"]);
    }

    if (doc.contains("bound_constants")) {
        const auto& b = doc["bound_constants"];
        require_keys(b, "bound_constants", {"C0", "s", "d", "M", "L"});
        config.c0 = b.value("C0", 1.0);
        config.s = b.value("s", 0.0);
        config.d_override = b.value("d", 0.0);
        config.m_override = b.value("M", 0.0);
        config.l_override = b.value("L", 0.0);
        if (config.c0 <= 0) throw ConfigError("bound_constants.C0 must be > 0");
    }

    if (doc.contains("experiment")) {
        const auto& e = doc["experiment"];
        require_keys(e, "experiment",
                     {"reference_size", "n_grid", "replications", "base_seed",
                      "parallel_workers", "burn_in", "eval_size_override"});
        exp.reference_size = e.value("reference_size", std::size_t{10000});
        if (e.contains("n_grid"))
            exp.n_grid = e["n_grid"].get<std::vector<std::size_t>>();
        exp.replications = e.value("replications", 500);
        exp.base_seed = e.value("base_seed", std::uint64_t{42});
        exp.parallel_workers = e.value("parallel_workers", 1);
        exp.burn_in = e.value("burn_in", 1000);
        exp.eval_size_override = e.value("eval_size_override", std::size_t{0});
        if (exp.replications < 1) throw ConfigError("experiment.replications must be positive");
        if (exp.reference_size < static_cast<std::size_t>(exp.q) + 1)
            throw ConfigError("experiment.reference_size too small for the predictor memory");
        if (exp.burn_in < 0) throw ConfigError("experiment.burn_in must be nonnegative");
    }

    if (doc.contains("output")) {
        const auto& o = doc["output"];
        require_keys(o, "output", {"dir"});
        config.output_dir = o.value("dir", "out");
    }

    return config;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const AppConfig& config) {
    const auto& exp = config.experiment;
    json model;
    if (const auto* arx = std::get_if<ArxParams>(&exp.model.params)) {
        model = {{"variant", "arx"},
                 {"lag_coeffs", arx->lag_coeffs},
                 {"covariate_coeff", arx->covariate_coeff},
                 {"covariate_timing", arx->timing == CovariateTiming::Contemporaneous
                                          ? "contemporaneous"
                                          : "lagged"}};
    } else if (const auto* tarx = std::get_if<TarxParams>(&exp.model.params)) {
        model = {{"variant", "tarx"},
                 {"pos_coeff", tarx->pos_coeff},
                 {"neg_coeff", tarx->neg_coeff},
                 {"covariate_coeff", tarx->covariate_coeff},
                 {"covariate_timing", tarx->timing == CovariateTiming::Contemporaneous
                                          ? "contemporaneous"
                                          : "lagged"}};
    } else {
        model = {{"variant", "generic"}};
    }

    auto innovation_json = [](const InnovationSpec& spec) -> json {
        switch (spec.kind) {
            case InnovationKind::StandardizedUniformPm2:
                return {{"kind", "standardized_uniform_pm2"}};
            case InnovationKind::StandardNormal:
                return {{"kind", "standard_normal"}};
            case InnovationKind::CustomBounded:
                return {{"kind", "custom_bounded"},
                        {"lower", spec.lower},
                        {"upper", spec.upper},
                        {"scale", spec.scale}};
        }
        return {};
    };

    std::vector<std::string> kinds;
    for (LossKind kind : exp.loss_kinds) kinds.emplace_back(loss_kind_name(kind));

    const char* dep_names[] = {"theta", "eta", "kappa", "lambda"};
    json decay;
    switch (config.dependence.decay.kind) {
        case DecaySpec::Kind::Geometric:
            decay = {{"kind", "geometric"}, {"a", config.dependence.decay.a},
                     {"scale", config.dependence.decay.scale}};
            break;
        case DecaySpec::Kind::Riemann:
            decay = {{"kind", "riemann"}, {"gamma", config.dependence.decay.gamma},
                     {"scale", config.dependence.decay.scale}};
            break;
        case DecaySpec::Kind::Explicit:
            decay = {{"kind", "explicit"}, {"values", config.dependence.decay.values}};
            break;
    }

    return {
        {"version", 1},
        {"model", model},
        {"covariate",
         {{"phi", exp.covariate.phi},
          {"mean", exp.covariate.mean},
          {"dimension", exp.covariate.dimension},
          {"innovation", innovation_json(exp.covariate.innovation)}}},
        {"innovation", innovation_json(exp.innovation)},
        {"predictor", {{"q", exp.q}, {"box_half_width", exp.box_half_width}}},
        {"loss", {{"kinds", kinds}, {"output_bound", exp.output_bound}}},
        {"dependence",
         {{"kind", dep_names[static_cast<int>(config.dependence.kind)]},
          {"mu", config.dependence.mu},
          {"L1", config.dependence.l1},
          {"L2", config.dependence.l2},
          {"nu", config.dependence.nu},
          {"C", config.dependence.fast_c},
          {"C3", config.dependence.c3},
          {"decay", decay}}},
        {"bound_constants",
         {{"C0", config.c0},
          {"s", config.s},
          {"d", config.d_override},
          {"M", config.m_override},
          {"L", config.l_override}}},
        {"experiment",
         {{"reference_size", exp.reference_size},
          {"n_grid", exp.effective_n_grid()},
          {"replications", exp.replications},
          {"base_seed", exp.base_seed},
          {"parallel_workers", exp.parallel_workers},
          {"burn_in", exp.burn_in},
          {"eval_size_override", exp.eval_size_override}}},
        {"output", {{"dir", config.output_dir}}},
    };
}

json fit_result_to_json(const FitResult& fit) {
    return {{"theta", fit.theta},
            {"empirical_risk", fit.empirical_risk},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"box_active", fit.box_active},
            {"ridge_used", fit.ridge_used}};
}

json bound_report_to_json(const BoundReport& report) {
    json out = {{"mode", report.mode == BoundMode::Slow ? "slow" : "fast"},
                {"n", report.n},
                {"eta", report.eta},
                {"confidence", report.confidence},
                {"C1", report.c1},
                {"C2", report.c2},
                {"C4", report.c4},
                {"C5", report.c5},
                {"total", report.total},
                {"min_n", report.min_n},
                {"min_n_satisfied", report.min_n_satisfied},
                {"root_residual", report.root_residual},
                {"cs_upper", report.cs_upper},
                {"log_covering", report.log_covering},
                {"small_n_caveat", report.small_n_caveat}};
    if (report.mode == BoundMode::Slow) {
        out["Cn1"] = report.cn;
        out["Cpn"] = report.cpn;
        out["eps1"] = report.eps;
        out["eps1p"] = report.eps_prime;
    } else {
        out["Cn2"] = report.cn;
        out["Cpn2"] = report.cpn;
        out["eps2"] = report.eps;
        out["eps2p"] = report.eps_prime;
        out["nu"] = report.nu;
        out["log_arg_warning"] = report.log_arg_warning;
    }
    return out;
}

json contraction_report_to_json(const ContractionReport& report) {
    return {{"alpha_k", report.alpha_k},
            {"total", report.total},
            {"satisfied", report.satisfied}};
}

json moment_report_to_json(const MomentCheckReport& report) {
    json rows = json::array();
    for (const auto& row : report.rows)
        rows.push_back({{"k", row.k},
                        {"lhs", row.lhs},
                        {"rhs", row.rhs},
                        {"satisfied", row.satisfied},
                        {"note", row.note}});
    return {{"rows", rows}, {"all_satisfied", report.all_satisfied}};
}

} // namespace wdl

#include "pexstab/harness/run.hpp"

#include <cmath>
#include <sstream>

#include "pexstab/error.hpp"
#include "pexstab/harness/io.hpp"

namespace pexstab {
namespace {

using nlohmann::json;

double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw Error(ErrorKind::Config, std::string(key) + " must be a number");
    return j[key].get<double>();
}

std::string preset_name(Preset p) {
    switch (p) {
        case Preset::General: return "general";
        case Preset::Cauchy: return "cauchy";
        case Preset::Sigma: return "sigma";
        case Preset::None: break;
    }
    return "none";
}

json status_json(int code, const std::string& error, const std::string& message) {
    return {{"exit_code", code}, {"error", error.empty() ? json(nullptr) : json(error)}, {"message", message}};
}

json coefficient_diffs(const FuncRep& a, const FuncRep& b) {
    if (a.is_dense()) return nullptr;
    const auto& ta = a.poly_table();
    const auto& tb = b.poly_table();
    double quad = 0.0;
    for (std::size_t i = 0; i < ta.quadratic.size(); ++i)
        quad = std::max(quad, (ta.quadratic[i] - tb.quadratic[i]).cwiseAbs().maxCoeff());
    return {{"constant", (ta.constant - tb.constant).cwiseAbs().maxCoeff()},
            {"linear", (ta.linear - tb.linear).cwiseAbs().maxCoeff()},
            {"quadratic", quad},
            {"noise_entries", ta.noise.size()}};
}

}  // namespace

Preset preset_from_string(const std::string& s) {
    if (s == "general") return Preset::General;
    if (s == "cauchy") return Preset::Cauchy;
    if (s == "sigma") return Preset::Sigma;
    if (s == "none" || s.empty()) return Preset::None;
    throw Error(ErrorKind::Config, "unknown preset '" + s + "'");
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kConfigVersion)
        throw Error(ErrorKind::Config, "config version must be " + std::to_string(kConfigVersion));

    ExperimentConfig cfg;
    cfg.source = j;
    if (j.contains("preset")) cfg.preset = preset_from_string(j["preset"].get<std::string>());
    if (!j.contains("carrier")) throw Error(ErrorKind::Config, "carrier is required");
    cfg.carrier = io::carrier_from_json(j["carrier"]);
    const int d = cfg.carrier.dim();

    if (j.contains("generators")) {
        if (!j["generators"].is_array()) throw Error(ErrorKind::Config, "generators must be an array");
        for (const auto& g : j["generators"]) cfg.generators.push_back(io::automorphism_from_json(g, d));
    }
    if (cfg.preset == Preset::Cauchy) {
        if (!cfg.generators.empty()) throw Error(ErrorKind::Config, "the cauchy preset fixes K = {I}; drop generators");
    } else if (cfg.preset == Preset::Sigma) {
        if (!cfg.generators.empty()) throw Error(ErrorKind::Config, "the sigma preset takes its involution from 'sigma'");
        const Automorphism sigma =
            j.contains("sigma") ? io::automorphism_from_json(j["sigma"], d) : Automorphism::negation(d);
        if (compose(sigma, sigma, cfg.carrier) != normalize(Automorphism::identity(d), cfg.carrier))
            throw Error(ErrorKind::Config, "sigma must be an involution");
        cfg.generators = {sigma};
    }

    if (j.contains("r")) {
        if (!j["r"].is_number_integer() || j["r"].get<int>() < 1) throw Error(ErrorKind::Config, "r must be >= 1");
        cfg.r = j["r"].get<int>();
    }
    cfg.beta = number_or(j, "beta", 1.0);
    BetaParam{cfg.beta};
    if (!j.contains("control")) throw Error(ErrorKind::Config, "control is required");
    cfg.control = j["control"];
    if (j.contains("lipschitz")) cfg.lipschitz = number_or(j, "lipschitz", 0.0);
    if (j.contains("strategy")) {
        const auto s = j["strategy"].get<std::string>();
        if (s == "lambda")
            cfg.strategy = JensenStrategy::Lambda;
        else if (s == "paper_t")
            cfg.strategy = JensenStrategy::PaperT;
        else
            throw Error(ErrorKind::Config, "strategy must be 'lambda' or 'paper_t'");
    }
    cfg.tol = number_or(j, "tol", kDefaultTol);
    if (!(cfg.tol > 0.0)) throw Error(ErrorKind::Config, "tol must be > 0");
    cfg.nmax = static_cast<int>(number_or(j, "nmax", kDefaultMaxIterations));
    if (cfg.nmax < 1) throw Error(ErrorKind::Config, "nmax must be >= 1");
    cfg.probe_steps = static_cast<int>(number_or(j, "probe_steps", 10));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw Error(ErrorKind::Config, "seed must be a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    cfg.delta = number_or(j, "delta", 0.0);
    if (!(cfg.delta >= 0.0)) throw Error(ErrorKind::Config, "delta must be >= 0");
    cfg.support_radius = number_or(j, "support_radius", 0.0);
    if (j.contains("noise_targets")) {
        cfg.noise_targets = {false, false, false};
        for (const auto& t : j["noise_targets"]) {
            const auto s = t.get<std::string>();
            if (s == "f")
                cfg.noise_targets.f = true;
            else if (s == "g")
                cfg.noise_targets.g = true;
            else if (s == "h")
                cfg.noise_targets.h = true;
            else
                throw Error(ErrorKind::Config, "noise targets must be among f, g, h");
        }
    }
    if (j.contains("noise_zero_at_origin")) cfg.noise_zero_at_origin = j["noise_zero_at_origin"].get<bool>();
    if (j.contains("truth")) cfg.truth = j["truth"];
    if (j.contains("triple")) cfg.triple = j["triple"];
    if (cfg.truth.is_null() == cfg.triple.is_null())
        throw Error(ErrorKind::Config, "exactly one of 'truth' and 'triple' is required");
    return cfg;
}

json coefficients_report(double theta, double p, double beta, int group_order, Preset preset) {
    if (preset == Preset::Sigma && group_order != 2)
        throw Error(ErrorKind::ConstraintViolation, "the sigma preset has |K| = 2");
    if (preset == Preset::Cauchy && group_order != 1)
        throw Error(ErrorKind::ConstraintViolation, "the cauchy preset has |K| = 1");
    const auto c = corollary_coefficients(theta, p, beta, group_order);
    return {{"theta", theta}, {"p", p},         {"beta", beta},         {"K", group_order},
            {"f", c.f},       {"g", c.g},       {"h", c.h},             {"alpha", c.alpha},
            {"lipschitz", c.lipschitz}};
}

RunReport run(const json& config) {
    RunReport out;
    json& rep = out.report;
    rep["version"] = kConfigVersion;
    rep["config"] = config;

    const auto fail = [&](const Error& e) {
        out.exit_code = exit_code(e.kind());
        rep["status"] = status_json(out.exit_code, std::string(to_string(e.kind())), e.what());
        return out;
    };

    try {
        const ExperimentConfig cfg = parse_config(config);
        const BetaParam beta(cfg.beta);
        const GroupK group = build_group(cfg.generators, cfg.carrier);
        const Carrier& c = cfg.carrier;
        rep["preset"] = preset_name(cfg.preset);
        json elements = json::array();
        for (const auto& k : group.elements()) elements.push_back(io::to_json(k));
        rep["group"] = {{"order", group.order()}, {"elements", elements}};

        // Corollary constraints are fatal under a preset, informational otherwise.
        const bool certified = cfg.control.value("kind", "") == "certified";
        const bool power_shape =
            cfg.control.value("kind", "") == "power" || (certified && cfg.control.value("shape", "") == "power");
        if (power_shape) {
            const auto dbl = check_doubling(c, group);
            rep["doubling"] = {{"holds", dbl.holds}, {"max_ratio", dbl.max_ratio}, {"worst_x", io::to_json(dbl.worst_x)}};
            try {
                const double theta = certified ? 1.0 : cfg.control.value("theta", 1.0);
                rep["corollary"] = coefficients_report(theta, cfg.control.value("p", 0.0), cfg.beta,
                                                       static_cast<int>(group.order()), cfg.preset);
            } catch (const Error& e) {
                if (cfg.preset != Preset::None) throw;
                rep["corollary"] = {{"error", e.what()}};
            }
        }

        std::optional<PexiderTriple> base;
        std::optional<FuncRep> q_truth, j_truth;
        if (!cfg.truth.is_null()) {
            const auto& t = cfg.truth;
            q_truth = t.contains("q") ? io::funcrep_from_json(t["q"], c, cfg.r) : FuncRep::zero(c, cfg.r);
            j_truth = t.contains("j") ? io::funcrep_from_json(t["j"], c, cfg.r) : FuncRep::zero(c, cfg.r);
            const Value a = t.contains("a") ? io::value_from_json(t["a"], cfg.r) : Value::Zero(cfg.r);
            const Value b = t.contains("b") ? io::value_from_json(t["b"], cfg.r) : Value::Zero(cfg.r);
            base = make_exact_triple(*q_truth, *j_truth, a, b, group, beta);
        } else {
            const auto& t = cfg.triple;
            if (!t.contains("f") || !t.contains("g") || !t.contains("h"))
                throw Error(ErrorKind::Config, "triple needs f, g and h");
            base = PexiderTriple(io::funcrep_from_json(t["f"], c, cfg.r), io::funcrep_from_json(t["g"], c, cfg.r),
                                 io::funcrep_from_json(t["h"], c, cfg.r));
        }

        PerturbOptions popt;
        popt.delta = cfg.delta;
        popt.seed = cfg.seed;
        popt.support_radius = cfg.support_radius;
        popt.targets = cfg.noise_targets;
        popt.zero_at_origin = cfg.noise_zero_at_origin;
        if (certified && cfg.control.value("shape", "constant") == "power") popt.power = cfg.control.value("p", 0.0);
        const Perturbed perturbed = perturb(*base, group, beta, popt);
        rep["perturbation"] = {{"delta", cfg.delta},
                               {"theta_star", perturbed.theta_star},
                               {"degenerate", perturbed.degenerate},
                               {"seed", cfg.seed}};

        std::optional<ControlFn> phi;
        if (certified) {
            if (perturbed.degenerate)
                throw Error(ErrorKind::Config, "certified control is identically zero; a positive control is required");
            phi = perturbed.certificate;
        } else {
            phi = io::control_from_json(cfg.control, c);
        }

        try {
            const auto cert = measure_lipschitz(*phi, group, beta);
            rep["lipschitz_certificate"] = {{"L", cert.L},
                                            {"worst_x", io::to_json(cert.worst_x)},
                                            {"worst_y", io::to_json(cert.worst_y)},
                                            {"ratio", cert.ratio}};
        } catch (const Error&) {
            // stabilize reports the same failure below
        }

        StabilizeOptions sopt;
        sopt.strategy = cfg.strategy;
        sopt.tol = cfg.tol;
        sopt.nmax = cfg.nmax;
        sopt.lipschitz = cfg.lipschitz;
        sopt.probe_steps = cfg.probe_steps;
        const auto [decomp, report] = stabilize(perturbed.triple, *phi, group, beta, sopt);
        rep["stability"] = io::to_json(report);
        rep["decomposition"] = io::to_json(decomp);

        if (q_truth) {
            rep["oracle_comparison"] = {{"q_error", sup_distance(decomp.q, *q_truth, beta)},
                                        {"j_error", sup_distance(decomp.j, *j_truth, beta)},
                                        {"q_coefficients", coefficient_diffs(decomp.q, *q_truth)},
                                        {"j_coefficients", coefficient_diffs(decomp.j, *j_truth)}};
        }
        rep["status"] = status_json(0, "", "");
        return out;
    } catch (const Error& e) {
        return fail(e);
    } catch (const nlohmann::json::exception& e) {
        return fail(Error(ErrorKind::Config, e.what()));
    }
}

json oracle_report(const json& config) {
    const ExperimentConfig cfg = parse_config(config);
    const GroupK group = build_group(cfg.generators, cfg.carrier);
    const auto describe = [&](const SolutionBasis& b) {
        json elems = json::array();
        for (const auto& e : b.elements) elems.push_back(io::to_json(e));
        return json{{"dimension", b.dimension()}, {"max_residual", b.max_residual}, {"basis", elems}};
    };
    return {{"version", kConfigVersion},
            {"carrier", io::to_json(cfg.carrier)},
            {"group_order", group.order()},
            {"quadratic", describe(quadratic_solution_space(group))},
            {"jensen_with_side_condition", describe(jensen_solution_space(group, true))},
            {"jensen_without_side_condition", describe(jensen_solution_space(group, false))}};
}

}  // namespace pexstab

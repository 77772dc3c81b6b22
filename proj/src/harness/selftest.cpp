#include "pexstab/harness/selftest.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <json.hpp>

#include "pexstab/control.hpp"
#include "pexstab/error.hpp"
#include "pexstab/fixpoint.hpp"
#include "pexstab/harness/run.hpp"
#include "pexstab/oracle.hpp"

namespace pexstab::selftest {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

template <class F>
Check timed(const std::string& id, F&& body) {
    Check c{id, false, "", 0.0};
    const auto t0 = Clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.passed = false;
        c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = seconds_since(t0);
    return c;
}

double uniform(SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

Value random_value(SplitMix64& rng, int r) {
    Value v(r);
    for (int i = 0; i < r; ++i) v[i] = uniform(rng, -1.0, 1.0);
    return v;
}

FuncRep random_dense(SplitMix64& rng, const Carrier& c, int r) {
    std::vector<Value> vals;
    for (std::size_t i = 0; i < c.size(); ++i) vals.push_back(random_value(rng, r));
    return FuncRep::dense(c, std::move(vals));
}

FuncRep random_poly(SplitMix64& rng, const Carrier& c, int r, int noise_points) {
    const int d = c.dim();
    PolyPlusTable t;
    t.constant = random_value(rng, r);
    t.linear = Eigen::MatrixXd::Zero(r, d);
    for (int i = 0; i < r; ++i)
        for (int k = 0; k < d; ++k) t.linear(i, k) = uniform(rng, -1.0, 1.0);
    for (int i = 0; i < r; ++i) {
        Eigen::MatrixXd a(d, d);
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) a(p, q) = uniform(rng, -1.0, 1.0);
        t.quadratic.push_back(a);
    }
    const auto& pts = c.points();
    for (int n = 0; n < noise_points; ++n) t.noise[pts[rng.next() % pts.size()]] = random_value(rng, r);
    return FuncRep::poly(c, std::move(t));
}

GroupK plus_minus(const Carrier& c) { return build_group({Automorphism::negation(c.dim())}, c); }

// ---- acceptance instances -------------------------------------------------

json truth_2x2_3x() {
    return {{"q", {{"quadratic", {{{2}}}}}}, {"j", {{"linear", {{3}}}}}, {"a", 0.5}, {"b", 0.5}};
}

json exact_config(const std::string& strategy) {
    return {{"version", kConfigVersion},
            {"carrier", {{"kind", "lattice"}, {"dim", 1}, {"radius", 32}}},
            {"generators", {{-1}}},
            {"beta", 0.5},
            {"control", {{"kind", "power"}, {"theta", 1e-6}, {"p", 0.25}}},
            {"strategy", strategy},
            {"truth", truth_2x2_3x()}};
}

json noisy_config(std::uint64_t seed) {
    return {{"version", kConfigVersion},
            {"carrier", {{"kind", "lattice"}, {"dim", 1}, {"radius", 32}}},
            {"generators", {{-1}}},
            {"beta", 1.0},
            {"control", {{"kind", "constant"}, {"theta", 1e-3}}},
            {"strategy", "lambda"},
            {"delta", 1e-3},
            {"seed", seed},
            {"support_radius", 8},
            {"noise_targets", {"f"}},
            {"noise_zero_at_origin", true},
            {"truth", truth_2x2_3x()}};
}

double num_or_inf(const json& j) { return j.is_null() ? INFINITY : j.get<double>(); }

bool margins_nonnegative(const json& bounds, std::string& detail) {
    bool ok = true;
    for (const char* k : {"f", "g", "h"}) {
        const double m = num_or_inf(bounds[k]["min_margin"]);
        detail += std::string(k) + "-margin " + fmt(m) + " ";
        ok = ok && m >= 0.0;
    }
    return ok;
}

// Verdict of the noisy bound scenario, shared by the acceptance check and the
// seed-independence invariant.
bool noisy_verdict(const json& rep, std::string& detail) {
    if (rep["status"]["exit_code"] != 0) {
        detail = rep["status"]["message"].get<std::string>();
        return false;
    }
    const auto& f = rep["stability"]["bounds"]["f"];
    double measured = 0.0;
    for (const auto& v : f["measured"]) measured = std::max(measured, num_or_inf(v));
    detail = "sup|f-q-j-g0-h0| " + fmt(measured) + " <= 0.015; ";
    const bool ok = measured <= 15e-3 + 1e-15;
    return margins_nonnegative(rep["stability"]["bounds"], detail) && ok;
}

struct ScenarioCache {
    std::optional<RunReport> exact, noisy, paper_t;
    const RunReport& get_exact() { return exact ? *exact : *(exact = run(exact_config("lambda"))); }
    const RunReport& get_noisy() { return noisy ? *noisy : *(noisy = run(noisy_config(7))); }
    const RunReport& get_paper_t() { return paper_t ? *paper_t : *(paper_t = run(exact_config("paper_t"))); }
};

struct TraceScan {
    double excess = -INFINITY;  // max over steps of ratio - L
    double margin = INFINITY;   // min Banach margin
    int traces = 0;
    std::string offenders;
};

void check_traces(const json& rep, const std::string& label, TraceScan& scan) {
    if (rep["status"]["exit_code"] != 0) throw std::runtime_error(label + " did not converge");
    const auto& st = rep["stability"];
    std::vector<std::pair<std::string, const json*>> traces = {{label + ".q", &st["traces"]["q"]},
                                                               {label + ".j", &st["traces"]["j"]}};
    for (const auto& [name, t] : traces) {
        const double L = (*t)["lipschitz"].get<double>();
        double worst = -INFINITY;
        for (const auto& s : (*t)["steps"])
            if (!s["ratio"].is_null()) worst = std::max(worst, s["ratio"].get<double>() - L);
        if (worst > 1e-9) scan.offenders += " " + name + " (ratio " + fmt(worst + L) + " vs L " + fmt(L) + ")";
        scan.excess = std::max(scan.excess, worst);
        ++scan.traces;
    }
    for (const char* which : {"q", "j"}) scan.margin = std::min(scan.margin, num_or_inf(st["banach_margins"][which]));
}

// Independent evaluation of the corollary coefficients in 50-digit decimal.
struct HighPrecisionCoefficients {
    double f, g, h;
};

HighPrecisionCoefficients reference_coefficients(double theta_d, double p_d, double beta_d, int k_d) {
    using boost::multiprecision::cpp_dec_float_50;
    using boost::multiprecision::pow;
    const cpp_dec_float_50 theta(theta_d), p(p_d), beta(beta_d), k(k_d), two(2), three(3);
    const cpp_dec_float_50 denom = pow(two * k, beta);
    const cpp_dec_float_50 a = theta / pow(two, beta) * denom / (denom - pow(two, p) * k);
    const cpp_dec_float_50 kb = pow(k, cpp_dec_float_50(1) - beta);
    const cpp_dec_float_50 f = a * (kb * (6 + 6 * pow(three, p)) + 8);
    const cpp_dec_float_50 h = a * (kb * (2 + 2 * pow(three, p))) + theta;
    return {static_cast<double>(f), static_cast<double>(f + theta), static_cast<double>(h)};
}

}  // namespace

bool Summary::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

bool beta_triangle_counterexample(double beta_value, unsigned seed) {
    const auto beta = BetaParam::unchecked(beta_value);
    SplitMix64 rng(seed);
    for (int n = 0; n < 2000; ++n) {
        const int r = 1 + static_cast<int>(rng.next() % 4);
        const Value u = random_value(rng, r), v = random_value(rng, r);
        const double lhs = beta_norm(u + v, beta), rhs = beta_norm(u, beta) + beta_norm(v, beta);
        if (lhs > rhs * (1.0 + 1e-12) + 1e-15) return true;
    }
    return false;
}

Check beta_norm_axioms(double beta_value, const std::string& id) {
    return timed(id, [&](Check& c) {
        const auto beta = BetaParam::unchecked(beta_value);
        SplitMix64 rng(11);
        double worst_homog = 0.0;
        bool positive = beta_norm(Value::Zero(3), beta) == 0.0;
        for (int n = 0; n < 2000; ++n) {
            const Value u = random_value(rng, 3);
            const double lam = uniform(rng, -3.0, 3.0);
            const double nu = beta_norm(u, beta);
            positive = positive && (nu > 0.0 || u.isZero());
            worst_homog = std::max(worst_homog,
                                   std::abs(beta_norm(lam * u, beta) - std::pow(std::abs(lam), beta_value) * nu) /
                                       std::max(1.0, nu));
        }
        const bool triangle = !beta_triangle_counterexample(beta_value);
        c.passed = positive && worst_homog <= 1e-12 && triangle;
        c.detail = "beta=" + fmt(beta_value) + " positivity " + (positive ? "ok" : "broken") + ", homogeneity dev " +
                   fmt(worst_homog) + ", triangle " + (triangle ? "ok" : "violated");
    });
}

std::vector<Check> invariant_checks() {
    std::vector<Check> out;
    for (double b : {0.25, 0.5, 0.9, 1.0}) out.push_back(beta_norm_axioms(b, "beta_norm_axioms[" + fmt(b) + "]"));

    // A beta outside (0, 1] must be caught by the same axiom test.
    out.push_back(timed("beta_norm_rejects_1.5", [](Check& c) {
        const Check injected = beta_norm_axioms(1.5, "injected");
        c.passed = !injected.passed;
        c.detail = "axiom test at beta=1.5: " + injected.detail;
    }));

    out.push_back(timed("metric_axioms", [](Check& c) {
        const Carrier car = Carrier::modular(5, 2);
        SplitMix64 rng(21);
        double worst = 0.0;
        for (double bv : {0.5, 1.0}) {
            const BetaParam beta(bv);
            for (int n = 0; n < 20; ++n) {
                const FuncRep f = random_dense(rng, car, 2), g = random_dense(rng, car, 2), h = random_dense(rng, car, 2);
                worst = std::max(worst, sup_distance(f, f, beta));
                worst = std::max(worst, std::abs(sup_distance(f, g, beta) - sup_distance(g, f, beta)));
                worst = std::max(worst, sup_distance(f, h, beta) - sup_distance(f, g, beta) - sup_distance(g, h, beta));
                if (!(sup_distance(f, g, beta) > 0.0)) worst = INFINITY;
            }
        }
        c.passed = worst <= 1e-12;
        c.detail = "worst identity/symmetry/triangle defect " + fmt(worst);
    }));

    out.push_back(timed("contraction_laws", [](Check& c) {
        const Carrier car = Carrier::modular(7, 1);
        const GroupK group = plus_minus(car);
        SplitMix64 rng(31);
        double worst = -INFINITY;
        for (double bv : {0.8, 1.0}) {
            const BetaParam beta(bv);
            const ControlFn phi(car, ConstantControl{1.0});
            const double L = minimal_lipschitz(phi, group, beta).L;
            const WeightFn psi = diagonal(derive_psi(phi, group, beta));
            const AveragingOp half{OpKind::Half, group};
            for (int n = 0; n < 20; ++n) {
                const FuncRep f = random_dense(rng, car, 2), g = random_dense(rng, car, 2);
                const double before = sup_weighted_distance(f, g, psi, beta).value;
                const double after = sup_weighted_distance(apply_op(half, f), apply_op(half, g), psi, beta).value;
                worst = std::max(worst, after - L * before);
            }
        }
        c.passed = worst <= 1e-12;
        c.detail = "max d(Jf,Jg) - L d(f,g) = " + fmt(worst);
    }));

    out.push_back(timed("power_formula_n<=3", [](Check& c) {
        SplitMix64 rng(41);
        double worst = 0.0;
        for (const Carrier& car : {Carrier::modular(7, 1), Carrier::modular(3, 2)}) {
            const GroupK group = plus_minus(car);
            for (int n = 1; n <= 3; ++n)
                for (int t = 0; t < 3; ++t)
                    worst = std::max(worst, power_formula_check(random_dense(rng, car, 1), group, n, BetaParam(1.0)));
        }
        c.passed = worst <= 1e-12;
        c.detail = "max deviation " + fmt(worst);
    }));

    out.push_back(timed("oracle_fixed_points", [](Check& c) {
        const BetaParam beta(1.0);
        double worst = 0.0;
        int count = 0;
        const Carrier lat = Carrier::lattice(2, 3);
        const GroupK gl = plus_minus(lat);
        const Carrier mod = Carrier::modular(5, 1);
        const GroupK gm = plus_minus(mod);
        for (const auto& q : quadratic_solution_space(gl).elements) {
            worst = std::max(worst, sup_distance(apply_op({OpKind::Half, gl}, q), q, beta));
            ++count;
        }
        for (const auto& [g, side] : {std::pair{&gl, true}, std::pair{&gm, false}})
            for (const auto& j : jensen_solution_space(*g, side).elements) {
                worst = std::max(worst, sup_distance(apply_op({OpKind::Full, *g}, j), j, beta));
                ++count;
            }
        c.passed = worst <= 1e-9 && count == 6;
        c.detail = std::to_string(count) + " basis elements, max |op(u) - u| " + fmt(worst);
    }));

    out.push_back(timed("operator_linearity", [](Check& c) {
        SplitMix64 rng(51);
        const BetaParam beta(1.0);
        double worst = 0.0;
        const Carrier mod = Carrier::modular(5, 2), lat = Carrier::lattice(2, 4);
        for (const Carrier& car : {mod, lat}) {
            const GroupK group = plus_minus(car);
            for (OpKind kind : {OpKind::Half, OpKind::Full}) {
                const AveragingOp op{kind, group};
                for (int n = 0; n < 5; ++n) {
                    const FuncRep f = car.is_modular() ? random_dense(rng, car, 2) : random_poly(rng, car, 2, 6);
                    const FuncRep g = car.is_modular() ? random_dense(rng, car, 2) : random_poly(rng, car, 2, 6);
                    const double a = uniform(rng, -2, 2), b = uniform(rng, -2, 2);
                    const FuncRep lhs = apply_op(op, a * f + b * g);
                    const FuncRep rhs = a * apply_op(op, f) + b * apply_op(op, g);
                    worst = std::max(worst, sup_distance(lhs, rhs, beta));
                }
            }
        }
        c.passed = worst <= 1e-12;
        c.detail = "max |op(af+bg) - (a op f + b op g)| " + fmt(worst);
    }));

    out.push_back(timed("seed_independence", [](Check& c) {
        std::string verdicts;
        bool all = true, any = false;
        for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
            std::string d;
            const bool v = noisy_verdict(run(noisy_config(seed)).report, d);
            verdicts += v ? "P" : "F";
            all = all && v;
            any = any || v;
        }
        c.passed = all == any;
        c.detail = "verdicts across seeds " + verdicts;
    }));

    out.push_back(timed("uniqueness_decay_all_noisy", [](Check& c) {
        json cfg = noisy_config(13);
        cfg["noise_targets"] = {"f", "g", "h"};
        cfg["control"] = {{"kind", "certified"}, {"shape", "constant"}};
        const json rep = run(cfg).report;
        if (rep["status"]["exit_code"] != 0) throw std::runtime_error(rep["status"]["message"].get<std::string>());
        const auto& u = rep["stability"]["uniqueness"];
        const double rate = u["a_rate"].get<double>();
        const double a0 = num_or_inf(u["a"][0]);
        double worst = -INFINITY;
        for (std::size_t n = 0; n < u["a"].size(); ++n)
            worst = std::max(worst, num_or_inf(u["a"][n]) - std::pow(rate, static_cast<double>(n)) * a0);
        c.passed = a0 > 0.0 && std::isfinite(a0) && worst <= 1e-9;
        c.detail = "a_0 " + fmt(a0) + ", max a_n - L^n a_0 " + fmt(worst);
    }));

    out.push_back(timed("report_determinism", [](Check& c) {
        const std::string a = run(noisy_config(5)).report.dump(), b = run(noisy_config(5)).report.dump();
        c.passed = a == b;
        c.detail = c.passed ? "identical reports" : "reports differ";
    }));
    return out;
}

std::vector<Check> acceptance_checks() {
    std::vector<Check> out;
    ScenarioCache cache;

    out.push_back(timed("1 exact recovery", [&](Check& c) {
        const auto t0 = Clock::now();
        const json& rep = cache.get_exact().report;
        const double secs = seconds_since(t0);
        if (rep["status"]["exit_code"] != 0) throw std::runtime_error(rep["status"]["message"].get<std::string>());
        const auto& oc = rep["oracle_comparison"];
        double coeff = 0.0;
        for (const char* part : {"q_coefficients", "j_coefficients"})
            for (const char* k : {"constant", "linear", "quadratic"}) coeff = std::max(coeff, oc[part][k].get<double>());
        const auto& dec = rep["decomposition"];
        coeff = std::max(coeff, std::abs(dec["g0"][0].get<double>() - 0.5));
        coeff = std::max(coeff, std::abs(dec["h0"][0].get<double>() - 0.5));
        const bool clean = oc["q_coefficients"]["noise_entries"] == 0 && oc["j_coefficients"]["noise_entries"] == 0;
        c.detail = "coefficient error " + fmt(coeff) + ", ";
        const bool margins = margins_nonnegative(rep["stability"]["bounds"], c.detail);
        c.detail += "run " + fmt(secs) + "s";
        c.passed = coeff <= 1e-8 && clean && margins && secs < 5.0;
    }));

    out.push_back(timed("2 noisy bound", [&](Check& c) {
        const auto t0 = Clock::now();
        const json& rep = cache.get_noisy().report;
        const double secs = seconds_since(t0);
        c.passed = noisy_verdict(rep, c.detail) && secs < 10.0;
        c.detail += "run " + fmt(secs) + "s";
    }));

    out.push_back(timed("3 contraction and banach", [&](Check& c) {
        TraceScan scan;
        check_traces(cache.get_exact().report, "exact", scan);
        check_traces(cache.get_noisy().report, "noisy", scan);
        check_traces(cache.get_paper_t().report, "paper_t", scan);
        c.passed = scan.excess <= 1e-9 && scan.margin >= -1e-9;
        c.detail = std::to_string(scan.traces) + " traces, max ratio - L " + fmt(scan.excess) + ", min Banach margin " +
                   fmt(scan.margin) + (scan.offenders.empty() ? "" : "; over L:" + scan.offenders);
    }));

    out.push_back(timed("4 power formula", [](Check& c) {
        const Carrier car = Carrier::modular(5, 1);
        const GroupK group = plus_minus(car);
        SplitMix64 rng(2024);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const FuncRep h = random_dense(rng, car, 1);
            for (int n : {2, 3}) worst = std::max(worst, power_formula_check(h, group, n, BetaParam(1.0)));
        }
        c.passed = worst <= 1e-12;
        c.detail = "20 tables, n in {2,3}, max deviation " + fmt(worst);
    }));

    out.push_back(timed("5 oracle dimensions", [](Check& c) {
        const Carrier mod = Carrier::modular(5, 1), lat = Carrier::lattice(2, 3);
        const GroupK gm = plus_minus(mod), gl = plus_minus(lat);
        const SolutionBasis bases[] = {quadratic_solution_space(gm), jensen_solution_space(gm, true),
                                       jensen_solution_space(gm, false), quadratic_solution_space(gl),
                                       jensen_solution_space(gl, true)};
        const int expected[] = {0, 0, 1, 3, 2};
        bool ok = true;
        double resid = 0.0;
        std::string dims;
        for (int i = 0; i < 5; ++i) {
            ok = ok && bases[i].dimension() == expected[i];
            resid = std::max(resid, bases[i].max_residual);
            dims += std::to_string(bases[i].dimension()) + (i < 4 ? "," : "");
        }
        c.passed = ok && resid <= 1e-9;
        c.detail = "dims (" + dims + ") expected (0,0,1,3,2), max residual " + fmt(resid);
    }));

    out.push_back(timed("6 law residuals", [&](Check& c) {
        double worst = 0.0, jensen = 0.0;
        for (const json* rep : {&cache.get_exact().report, &cache.get_noisy().report}) {
            const auto& laws = (*rep)["stability"]["laws"];
            for (const char* k : {"quadratic", "jensen", "side_condition"}) worst = std::max(worst, num_or_inf(laws[k]));
            jensen = std::max(jensen, num_or_inf(laws["jensen"]));
        }
        c.passed = worst <= 1e-6 && jensen <= 1e-9;
        c.detail = "max law residual " + fmt(worst) + ", Lambda Jensen residual " + fmt(jensen);
    }));

    out.push_back(timed("7 uniqueness decay", [&](Check& c) {
        const auto& a = cache.get_noisy().report["stability"]["uniqueness"]["a"];
        const double a0 = num_or_inf(a[0]);
        double worst = -INFINITY;
        for (std::size_t n = 0; n < a.size() && n <= 10; ++n)
            worst = std::max(worst, num_or_inf(a[n]) - std::pow(0.5, static_cast<double>(n)) * a0);
        c.passed = std::isfinite(a0) && a.size() >= 11 && worst <= 1e-9;
        c.detail = "a_0 " + fmt(a0) + ", max a_n - 0.5^n a_0 " + fmt(worst);
    }));

    out.push_back(timed("8 corollary calculator", [](Check& c) {
        const json got = coefficients_report(1.0, 0.5, 0.9, 2, Preset::Sigma);
        const auto ref = reference_coefficients(1.0, 0.5, 0.9, 2);
        double rel = 0.0;
        for (const auto& [key, want] : {std::pair{"f", ref.f}, std::pair{"g", ref.g}, std::pair{"h", ref.h}})
            rel = std::max(rel, std::abs(got[key].get<double>() - want) / std::abs(want));
        int rejected = 0;
        const std::pair<double, double> bad[] = {{0.9, 0.9}, {0.5, 0.7}, {0.0, 0.9}, {-0.1, 0.9}, {0.3, 0.6}};
        for (const auto& [p, beta] : bad) {
            try {
                coefficients_report(1.0, p, beta, 2, Preset::Sigma);
            } catch (const Error& e) {
                rejected += e.kind() == ErrorKind::ConstraintViolation ? 1 : 0;
            }
        }
        c.passed = rel <= 1e-10 && rejected == 5;
        c.detail = "f=" + fmt(got["f"].get<double>()) + " max rel error " + fmt(rel) + ", rejected " +
                   std::to_string(rejected) + "/5 invalid (p, beta)";
    }));

    out.push_back(timed("9 discrepancy probe", [&](Check& c) {
        const json& rep = cache.get_paper_t().report;
        if (rep["status"]["exit_code"] != 0) throw std::runtime_error(rep["status"]["message"].get<std::string>());
        const auto& d = rep["stability"]["discrepancy"];
        const bool violates = d["t_limit_violates_jensen"].get<bool>();
        const bool lambda_ok = d["lambda_limit_satisfies_jensen"].get<bool>();
        c.passed = violates && lambda_ok;
        c.detail = "T-limit Jensen residual " + fmt(num_or_inf(d["paper_t"]["jensen_residual"])) +
                   (violates ? " (violates)" : " (satisfies)") + ", Lambda-limit " +
                   (lambda_ok ? "satisfies" : "violates") + ", flagged=" + (d["flagged"].get<bool>() ? "yes" : "no") +
                   ": " + d["note"].get<std::string>();
    }));
    return out;
}

Summary run_selftest(const Options& options) {
    Summary s;
    const auto t0 = Clock::now();
    const auto add = [&](std::vector<Check> checks) {
        for (auto& c : checks) {
            if (options.on_check) options.on_check(c);
            s.checks.push_back(std::move(c));
        }
    };
    if (options.invariants) add(invariant_checks());
    if (options.acceptance) add(acceptance_checks());
    s.seconds = seconds_since(t0);
    Check total{"selftest runtime", s.seconds < 120.0, "total " + fmt(s.seconds) + "s, limit 120s", s.seconds};
    if (options.on_check) options.on_check(total);
    s.checks.push_back(total);
    return s;
}

}  // namespace pexstab::selftest

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pexstab/error.hpp"
#include "pexstab/harness/run.hpp"
#include "pexstab/harness/selftest.hpp"
#include "pexstab/parallel.hpp"

using nlohmann::json;

namespace {

constexpr int kConfigExit = 4;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pexstab::Error(pexstab::ErrorKind::Config, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw pexstab::Error(pexstab::ErrorKind::Config, path + ": " + e.what());
    }
}

int cmd_stabilize(const std::string& config_path, const std::string& out_path) {
    pexstab::RunReport rr;
    try {
        rr = pexstab::run(load_json(config_path));
    } catch (const pexstab::Error& e) {
        std::cerr << e.what() << "\n";
        return pexstab::exit_code(e.kind());
    }
    const std::string text = rr.report.dump(2) + "\n";
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return kConfigExit;
        }
        out << text;
    }
    if (rr.exit_code != 0) std::cerr << rr.report["status"]["message"].get<std::string>() << "\n";
    return rr.exit_code;
}

int cmd_oracle(const std::string& config_path) {
    try {
        std::cout << pexstab::oracle_report(load_json(config_path)).dump(2) << "\n";
        return 0;
    } catch (const pexstab::Error& e) {
        std::cerr << e.what() << "\n";
        return pexstab::exit_code(e.kind());
    } catch (const json::exception& e) {
        std::cerr << e.what() << "\n";
        return kConfigExit;
    }
}

int cmd_coeffs(double theta, double p, double beta, int k, const std::string& preset) {
    try {
        std::cout << pexstab::coefficients_report(theta, p, beta, k, pexstab::preset_from_string(preset)).dump(2)
                  << "\n";
        return 0;
    } catch (const pexstab::Error& e) {
        std::cerr << e.what() << "\n";
        return pexstab::exit_code(e.kind());
    }
}

int cmd_selftest(bool invariants_only) {
    pexstab::selftest::Options opt;
    opt.acceptance = !invariants_only;
    opt.on_check = [](const pexstab::selftest::Check& c) {
        std::printf("%-4s %-28s %7.2fs  %s\n", c.passed ? "PASS" : "FAIL", c.id.c_str(), c.seconds, c.detail.c_str());
        std::fflush(stdout);
    };
    const auto summary = pexstab::selftest::run_selftest(opt);
    std::size_t failed = 0;
    for (const auto& c : summary.checks) failed += c.passed ? 0 : 1;
    std::printf("%zu checks, %zu failed, %.2fs\n", summary.checks.size(), failed, summary.seconds);
    return summary.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stabilization of Pexider equations by averaging operators"};
    app.require_subcommand(1);
    std::size_t threads = 1;
    app.add_option("--threads", threads, "Worker threads for scans (capped by PEXSTAB_THREADS)")
        ->check(CLI::PositiveNumber);

    std::string config_path, out_path;
    auto* stab = app.add_subcommand("stabilize", "Run an experiment config and write the JSON report");
    stab->add_option("--config", config_path, "Experiment config (JSON)")->required();
    stab->add_option("--out", out_path, "Report path ('-' for stdout)")->required();

    auto* orc = app.add_subcommand("oracle", "Print solution-space bases for a config's carrier and group");
    orc->add_option("--config", config_path, "Experiment config (JSON)")->required();

    bool invariants_only = false;
    auto* st = app.add_subcommand("selftest", "Run invariant checks and acceptance scenarios");
    st->add_flag("--invariants-only", invariants_only, "Skip the acceptance scenarios");

    double theta = 1.0, p = 0.0, beta = 1.0;
    int k = 1;
    std::string preset = "none";
    auto* co = app.add_subcommand("coeffs", "Print the power-control bound coefficients");
    co->add_option("--theta", theta)->required();
    co->add_option("--p", p)->required();
    co->add_option("--beta", beta)->required();
    co->add_option("--K", k, "Group order")->required()->check(CLI::PositiveNumber);
    co->add_option("--preset", preset, "none, general, cauchy or sigma");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigExit;
    }
    pexstab::set_scan_threads(threads);

    if (*stab) return cmd_stabilize(config_path, out_path);
    if (*orc) return cmd_oracle(config_path);
    if (*st) return cmd_selftest(invariants_only);
    return cmd_coeffs(theta, p, beta, k, preset);
}

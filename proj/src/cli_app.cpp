#include "ssg/cli_app.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ssg/constraints.hpp"
#include "ssg/convergence.hpp"
#include "ssg/errors.hpp"
#include "ssg/geometry.hpp"
#include "ssg/measures.hpp"
#include "ssg/monte_carlo.hpp"
#include "ssg/quadrature.hpp"

namespace ssg {

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << text;
}

nlohmann::json mc_to_json(const MCEstimate& mc) {
    return {{"value", mc.value},
            {"stderr", mc.stderror},
            {"n_samples", mc.n_samples},
            {"seed", mc.seed}};
}

int cmd_slice(const std::string& config_path, std::int64_t n_mc, std::uint64_t seed,
              const std::string& out_path) {
    const nlohmann::json cfg = load_json(config_path);
    const auto L = AffineConstraintSet::from_json(cfg.at("subspace"));
    const auto N = cfg.at("N").get<std::int64_t>();
    const auto phi = TestFunction::from_json(cfg.at("phi"));

    const MCEstimate mc = estimate_slice_mean(L, N, phi, n_mc, seed);
    const double quad = integrate_muN(slice_density(L, N), phi, 1e-9);
    const GaussianLimit G = gaussian_limit(L);
    const auto closed = gaussian_expectation(G, phi);
    const double gauss = closed ? *closed : integrate_muInf(G, phi, 1e-9);

    nlohmann::json out = {
        {"mc", mc_to_json(mc)}, {"quadrature", quad}, {"gaussian", gauss}};
    write_text(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_converge(const std::string& config_path, const std::vector<std::int64_t>& n_list_flag,
                 const std::string& out_path) {
    const nlohmann::json cfg = load_json(config_path);
    const auto L = AffineConstraintSet::from_json(cfg.at("subspace"));
    const auto phi = TestFunction::from_json(cfg.at("phi"));

    std::vector<std::int64_t> n_list = n_list_flag;
    if (n_list.empty() && cfg.contains("n_list"))
        n_list = cfg.at("n_list").get<std::vector<std::int64_t>>();
    if (n_list.empty()) throw std::invalid_argument("converge: no N list given");

    const auto n_mc = cfg.value("n_mc", std::int64_t{20'000});
    const auto seed = cfg.value("seed", std::uint64_t{1});
    const auto tol = cfg.value("tol", 5e-3);

    const ConvergenceReport report = run_convergence(L, phi, n_list, n_mc, seed, tol);
    write_text(out_path, report.to_csv());
    std::cerr << (report.pass ? "PASS" : "FAIL") << ": " << report.criterion << "\n";
    return report.pass ? 0 : 1;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out_path) {
    const SuiteResult result = verify_suite(suite, seed);
    std::string table;
    for (const auto& check : result.checks) {
        table += std::string(check.pass ? "[PASS] " : "[FAIL] ") + check.name + "\n";
        for (const auto& line : check.lines) table += "    " + line + "\n";
    }
    table += std::string("suite ") + result.suite + ": " + (result.pass ? "PASS" : "FAIL") + "\n";
    std::cout << table;
    if (!out_path.empty()) write_text(out_path, result.to_json().dump(2) + "\n");
    return result.pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"slice means of high-dimensional spheres and their Gaussian limits"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::int64_t n_mc = 100'000;
    std::uint64_t seed = 1;
    std::string n_list_csv;
    std::string suite = "all";

    auto* slice = app.add_subcommand("slice", "cross-checked slice mean at one N");
    slice->add_option("config", config_path, "JSON config: subspace, N, phi")->required();
    slice->add_option("--n-mc", n_mc, "Monte Carlo sample count");
    slice->add_option("--seed", seed, "Monte Carlo seed");
    slice->add_option("--out", out_path, "output JSON path (default stdout)");

    auto* converge = app.add_subcommand("converge", "convergence table over an N list");
    converge->add_option("config", config_path, "JSON config: subspace, phi, n_mc, seed, tol")
        ->required();
    converge->add_option("--n-list", n_list_csv, "comma-separated N values");
    converge->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite, "disintegration|limits|onsets|all");
    verify->add_option("--seed", seed, "suite seed");
    verify->add_option("--out", out_path, "also write the JSON verdict tree here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (slice->parsed()) return cmd_slice(config_path, n_mc, seed, out_path);
        if (converge->parsed()) {
            std::vector<std::int64_t> n_list;
            if (!n_list_csv.empty()) {
                std::size_t pos = 0;
                while (pos < n_list_csv.size()) {
                    const auto comma = n_list_csv.find(',', pos);
                    const auto tok = n_list_csv.substr(
                        pos, comma == std::string::npos ? std::string::npos : comma - pos);
                    n_list.push_back(std::stoll(tok));
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
            }
            return cmd_converge(config_path, n_list, out_path);
        }
        if (verify->parsed()) return cmd_verify(suite, seed, out_path);
    } catch (const InvalidConstraintSet& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "ConfigError: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ConfigError: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "Error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace ssg

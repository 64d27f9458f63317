// fracstep: solvers and experiment harness for time-space fractional
// advection-diffusion problems.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracstep/cli.hpp"

namespace {

using fracstep::cli::RunConfig;

void load_json_config(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    if (j.contains("example")) cfg.example = j["example"].get<int>();
    if (j.contains("theta")) cfg.theta = j["theta"].get<double>();
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
    if (j.contains("solver")) cfg.solver = j["solver"].get<std::string>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("outer_tol")) cfg.outer_tol = j["outer_tol"].get<double>();
    if (j.contains("m")) cfg.gp_m = j["m"].get<std::size_t>();
    if (j.contains("ell")) cfg.gp_ell = j["ell"].get<std::size_t>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("which")) cfg.which = j["which"].get<std::string>();
    if (j.contains("level")) cfg.level = j["level"].get<std::size_t>();
    if (j.contains("grids")) {
        if (j["grids"].is_string()) {
            cfg.grids = fracstep::cli::parse_grids(j["grids"].get<std::string>());
        } else {
            cfg.grids.clear();
            for (const auto& pair : j["grids"])
                cfg.grids.emplace_back(pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>());
        }
    }
}

int emit(const fracstep::cli::CommandResult& result, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << result.output;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot open output file " << out_path << "\n";
            return 2;
        }
        out << result.output;
    }
    return result.ok ? 0 : 1;
}

// Attach the options shared by the solve-style subcommands.
void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path,
                        std::string& grids_text) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
    cmd->add_option("--example", cfg.example, "built-in problem: 1 linear, 2 nonlinear");
    cmd->add_option("--theta", cfg.theta, "temporal fractional order in (0,1]");
    cmd->add_option("--alpha", cfg.alpha, "advection fractional order in (0,1]");
    cmd->add_option("--beta", cfg.beta, "diffusion fractional order in (1,2]");
    cmd->add_option("--grids", grids_text, "grid ladder as N:M,N:M,...");
    cmd->add_option("--solver", cfg.solver, "lu | pbicgstab | pgpbicor");
    cmd->add_option("--tol", cfg.tol, "Krylov relative-residual tolerance");
    cmd->add_option("--outer-tol", cfg.outer_tol, "nonlinear sweep tolerance");
    cmd->add_option("--m", cfg.gp_m, "gpbicor m parameter");
    cmd->add_option("--ell", cfg.gp_ell, "gpbicor ell parameter");
    cmd->add_option("--out", cfg.out, "output CSV path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracstep: fast implicit solvers for fractional advection-diffusion problems"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string grids_text;

    auto* weights = app.add_subcommand("weights", "dump weight or temporal coefficient tables as CSV");
    double w_order = 0.5;
    std::size_t w_kmax = 32;
    double w_theta = 0.0;
    std::size_t w_steps = 8;
    std::size_t w_level = 0;
    std::string w_out;
    weights->add_option("--gamma", w_order, "spatial order in (0,2]: emit k,g,omega rows");
    weights->add_option("--kmax", w_kmax, "largest weight index");
    weights->add_option("--theta", w_theta, "temporal order in (0,1]: emit s,c rows instead");
    weights->add_option("--steps", w_steps, "time steps for the temporal table");
    weights->add_option("--level", w_level, "time level of the coefficient array");
    weights->add_option("--out", w_out, "output CSV path (default: stdout)");

    auto* converge = app.add_subcommand("converge", "grid-refinement error/order study");
    add_common_options(converge, cfg, config_path, grids_text);

    auto* solve = app.add_subcommand("solve", "solve on one grid and export the field as CSV");
    add_common_options(solve, cfg, config_path, grids_text);

    auto* bench = app.add_subcommand("bench", "time the dense LU baseline against a Krylov solver");
    add_common_options(bench, cfg, config_path, grids_text);

    auto* exportm = app.add_subcommand("export-matrix", "materialize a per-level matrix as CSV");
    add_common_options(exportm, cfg, config_path, grids_text);
    exportm->add_option("--which", cfg.which, "M | B | P | PinvM");
    exportm->add_option("--level", cfg.level, "time level index");

    CLI11_PARSE(app, argc, argv);

    try {
        if (weights->parsed()) {
            if (weights->count("--theta") > 0)
                return emit(fracstep::cli::cmd_weights_temporal(w_theta, w_steps, w_level), w_out);
            if (weights->count("--gamma") == 0) {
                std::cerr << "error: weights needs --gamma or --theta\n";
                return 2;
            }
            return emit(fracstep::cli::cmd_weights(w_order, w_kmax), w_out);
        }

        CLI::App* active = app.get_subcommands().front();
        auto flag_given = [&](const std::string& name) {
            const CLI::Option* opt = active->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        // JSON config first, then re-apply any explicitly passed flags on top.
        if (!config_path.empty()) {
            RunConfig from_file = cfg;
            load_json_config(config_path, from_file);
            auto keep_flag = [&](const std::string& name, auto member) {
                if (flag_given(name)) from_file.*member = cfg.*member;
            };
            keep_flag("--example", &RunConfig::example);
            keep_flag("--theta", &RunConfig::theta);
            keep_flag("--alpha", &RunConfig::alpha);
            keep_flag("--beta", &RunConfig::beta);
            keep_flag("--solver", &RunConfig::solver);
            keep_flag("--tol", &RunConfig::tol);
            keep_flag("--outer-tol", &RunConfig::outer_tol);
            keep_flag("--m", &RunConfig::gp_m);
            keep_flag("--ell", &RunConfig::gp_ell);
            keep_flag("--out", &RunConfig::out);
            keep_flag("--which", &RunConfig::which);
            keep_flag("--level", &RunConfig::level);
            if (flag_given("--grids")) from_file.grids = fracstep::cli::parse_grids(grids_text);
            cfg = from_file;
        } else if (!grids_text.empty()) {
            cfg.grids = fracstep::cli::parse_grids(grids_text);
        }

        fracstep::cli::CommandResult result;
        if (converge->parsed())
            result = fracstep::cli::cmd_converge(cfg);
        else if (solve->parsed())
            result = fracstep::cli::cmd_solve(cfg);
        else if (bench->parsed())
            result = fracstep::cli::cmd_bench(cfg);
        else if (exportm->parsed())
            result = fracstep::cli::cmd_export_matrix(cfg);
        else
            return 2;
        return emit(result, cfg.out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

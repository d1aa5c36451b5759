// Command-line front end: simulate | validate | nonuniform.
//
// Exit codes: 0 success, 2 configuration error, 3 solver guard tripped
// (blowup, CFL, inversion failure), 4 property violation, 5 io failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsq/errors.hpp"
#include "bsq/experiment.hpp"
#include "bsq/field_ops.hpp"
#include "bsq/io.hpp"
#include "bsq/lagrangian.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw bsq::ConfigError("cannot open config " + path);
    try {
        json j;
        is >> j;
        return j;
    } catch (const json::exception& e) {
        throw bsq::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw bsq::ConfigError("config field '" + key + "': " + e.what());
    }
}

bsq::Grid2D grid_from(const json& cfg) {
    json g = cfg.value("grid", json::object());
    return {get_or(g, "n", 256), get_or(g, "box_length", 32.0)};
}

bsq::SolverParams solver_from(const json& section, double sobolev_s,
                              const bsq::SolverParams& base = {}) {
    bsq::SolverParams p = base;
    p.sobolev_s = sobolev_s;
    p.dt = get_or(section, "dt", p.dt);
    p.t_end = get_or(section, "t_end", p.t_end);
    p.save_stride = get_or(section, "save_stride", p.save_stride);
    p.guard_stride = get_or(section, "guard_stride", p.guard_stride);
    p.invert_tol = get_or(section, "invert_tol", p.invert_tol);
    p.invert_max_iter = get_or(section, "invert_max_iter", p.invert_max_iter);
    p.cfl_fraction = get_or(section, "cfl_fraction", p.cfl_fraction);
    p.blowup_grad = get_or(section, "blowup_grad", p.blowup_grad);
    p.max_initial_div = get_or(section, "max_initial_div", p.max_initial_div);
    p.enforce_initial_div =
        get_or(section, "enforce_initial_div", p.enforce_initial_div);
    p.comp.upsample = get_or(section, "upsample", p.comp.upsample);
    p.comp.order = get_or(section, "order", p.comp.order);
    return p;
}

json solver_to_json(const bsq::SolverParams& p) {
    json s;
    s["dt"] = p.dt;
    s["t_end"] = p.t_end;
    s["save_stride"] = p.save_stride;
    s["guard_stride"] = p.guard_stride;
    s["invert_tol"] = p.invert_tol;
    s["invert_max_iter"] = p.invert_max_iter;
    s["cfl_fraction"] = p.cfl_fraction;
    s["blowup_grad"] = p.blowup_grad;
    s["max_initial_div"] = p.max_initial_div;
    s["enforce_initial_div"] = p.enforce_initial_div;
    s["upsample"] = p.comp.upsample;
    s["order"] = p.comp.order;
    return s;
}

void write_manifest(const fs::path& dir, json manifest,
                    const std::vector<std::string>& outputs) {
    manifest["outputs"] = outputs;
    std::ofstream os(dir / "manifest.json");
    if (!os) throw bsq::IoError("cannot open manifest.json");
    os << manifest.dump(2) << '\n';
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string preset; // empty: take from config
    int threads = 1;
};

int run_simulate(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    bsq::Grid2D g = grid_from(cfg);
    const double s = get_or(cfg, "sobolev_s", 3.0);
    const std::string preset =
        args.preset.empty() ? get_or<std::string>(cfg, "preset", "bump_theta")
                            : args.preset;
    bsq::SolverParams p = solver_from(cfg.value("solver", json::object()), s);
    p.store_snapshots = false;

    bsq::InitialData data = bsq::initial_data_preset(preset, g);
    bsq::Trajectory traj = bsq::solve(data.u0, data.theta0, p);
    bsq::Observables obs = bsq::observe(traj.final_state(), data.theta0, p);

    fs::create_directories(args.out_dir);
    fs::path dir(args.out_dir);
    bsq::write_trajectory_csv(dir / "trajectory.csv", traj);
    bsq::dump_field(dir / "u_final.f64", obs.u);
    bsq::dump_field(dir / "theta_final.f64", obs.theta);
    bsq::dump_field(dir / "phi_final.f64",
                    traj.final_state().phi.displacement(), "diffeo");

    json manifest;
    manifest["command"] = "simulate";
    manifest["preset"] = preset;
    manifest["grid"] = {{"n", g.n}, {"box_length", g.box_length}};
    manifest["sobolev_s"] = s;
    manifest["solver"] = solver_to_json(p);
    write_manifest(dir, manifest,
                   {"trajectory.csv", "u_final.f64", "theta_final.f64",
                    "phi_final.f64", "manifest.json"});

    const bsq::TrajectorySample& last = traj.samples.back();
    std::printf("simulate: preset=%s n=%d t_end=%g steps=%lld\n", preset.c_str(),
                g.n, p.t_end, std::llround(p.t_end / p.dt));
    std::printf("final: |u|_L2=%.6e |u|_Hs=%.6e |theta|_Hs=%.6e div=%.3e min_det=%.6f\n",
                last.u_l2, last.u_hs, last.theta_hs, last.div_u_l2, last.min_det);
    return 0;
}

int run_validate(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    bsq::Grid2D g = grid_from(cfg);
    const double s = get_or(cfg, "sobolev_s", 3.0);
    const std::string preset =
        args.preset.empty() ? get_or<std::string>(cfg, "preset", "bump_theta")
                            : args.preset;
    bsq::SolverParams p = solver_from(cfg.value("solver", json::object()), s);
    p.store_snapshots = false;

    json vt = cfg.value("validate", json::object());
    const double split_tol = get_or(vt, "split_tol", 1e-12);
    const double scaling_tol = get_or(vt, "scaling_tol", 1e-10);
    const double route_tol = get_or(vt, "route_tol", 1e-8);
    const double div_tol = get_or(vt, "div_ratio_tol", 1e-6);

    bsq::InitialData data = bsq::initial_data_preset(preset, g);
    json report;
    bool ok = true;
    auto check = [&](const char* name, double value, double tol) {
        const bool pass = value <= tol;
        ok = ok && pass;
        report[name] = {{"value", value}, {"tolerance", tol}, {"pass", pass}};
        std::printf("%-22s %s   (%.3e <= %.3e)\n", name,
                    pass ? "PASS" : "FAIL", value, tol);
    };

    // Pressure split agrees with the unsplit form on divergence-free data.
    {
        bsq::VectorField2 a = bsq::compute_grad_B(data.u0);
        bsq::VectorField2 b = bsq::compute_grad_B_unsplit(data.u0);
        a -= b;
        double scale = std::max(1.0, b.max_norm());
        check("pressure_split", a.max_norm() / scale, split_tol);
    }

    // Time-scaling conjugacy at matched step counts.
    {
        auto residuals = bsq::check_scaling(data.u0, data.theta0, {0.5, 2.0}, p);
        double worst = 0.0;
        for (const auto& r : residuals) worst = std::max(worst, r.residual);
        check("scaling_conjugacy", worst, scaling_tol);
    }

    // Direct horizon-T map against the time-one rescaling route.
    check("rescaled_route",
          bsq::scaled_map_residual(data.u0, data.theta0, 0.5, p), route_tol);

    // Relative divergence of u(t) along the trajectory.
    {
        bsq::Trajectory traj = bsq::solve(data.u0, data.theta0, p);
        double worst = 0.0;
        for (const auto& smp : traj.samples)
            if (smp.u_l2 > 1e-14)
                worst = std::max(worst, smp.div_u_l2 / smp.u_l2);
        check("divergence_ratio", worst, div_tol);
    }

    fs::create_directories(args.out_dir);
    fs::path dir(args.out_dir);
    {
        std::ofstream os(dir / "validate.json");
        if (!os) throw bsq::IoError("cannot open validate.json");
        os << report.dump(2) << '\n';
    }
    json manifest;
    manifest["command"] = "validate";
    manifest["preset"] = preset;
    manifest["grid"] = {{"n", g.n}, {"box_length", g.box_length}};
    manifest["sobolev_s"] = s;
    manifest["solver"] = solver_to_json(p);
    write_manifest(dir, manifest, {"validate.json", "manifest.json"});
    if (!ok) {
        std::printf("validate: FAIL\n");
        return 4;
    }
    std::printf("validate: PASS\n");
    return 0;
}

int run_nonuniform(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    bsq::Grid2D g = grid_from(cfg);
    const double s = get_or(cfg, "sobolev_s", 3.0);
    const std::string preset =
        args.preset.empty() ? get_or<std::string>(cfg, "preset", "rest")
                            : args.preset;
    json ex = cfg.value("experiment", json::object());

    bsq::ExperimentConfig ec;
    ec.sobolev_s = s;
    ec.ball_radius = get_or(ex, "ball_radius", 0.1);
    ec.n_values = get_or(ex, "n_values", std::vector<int>{2, 4, 8, 16});
    ec.probe_x1 = get_or(ex, "probe_x1", 0.5 * g.box_length);
    ec.probe_x2 = get_or(ex, "probe_x2", 0.5 * g.box_length);
    ec.fd_eps = get_or(ex, "fd_eps", 1e-4);
    const std::string rule = get_or<std::string>(ex, "radius_rule", "grid");
    if (rule == "grid")
        ec.radius_rule = bsq::RadiusRule::grid_limited;
    else if (rule == "derivative")
        ec.radius_rule = bsq::RadiusRule::derivative_bound;
    else
        throw bsq::ConfigError("radius_rule must be 'grid' or 'derivative'");
    ec.radius_scale = get_or(ex, "radius_scale", 6.0);
    ec.lipschitz_safety = get_or(ex, "lipschitz_safety", 1.1);
    ec.boundary_samples = get_or(ex, "boundary_samples", 128);
    ec.threads = args.threads > 0 ? args.threads : 1;

    bsq::SolverParams sp;
    sp.dt = 2.5e-3;
    sp.comp = {2, 5};
    ec.solver = solver_from(ex.value("solver", json::object()), s, sp);
    ec.solver.t_end = 1.0; // the construction lives at time one
    ec.solver.store_snapshots = false;
    bsq::SolverParams sm;
    sm.dt = 5e-3;
    ec.smooth_solver = solver_from(ex.value("smooth_solver", json::object()), s, sm);
    ec.smooth_solver.t_end = 1.0;
    ec.smooth_solver.store_snapshots = false;

    bsq::InitialData data = bsq::initial_data_preset(preset, g);

    // Probe direction: velocity of a Gaussian stream offset from the marker,
    // normalized to H^s size R/2.
    const double sigma = get_or(ex, "probe_sigma", 1.5);
    bsq::ScalarField stream =
        bsq::gaussian(g, ec.probe_x1, ec.probe_x2 + sigma, sigma, 1.0);
    bsq::VectorField2 u_star = bsq::normalize_hs(
        bsq::velocity_from_stream(stream), s, 0.5 * ec.ball_radius);

    bsq::ExperimentResult res =
        bsq::run_nonuniform(data.u0, data.theta0, u_star, ec);

    fs::create_directories(args.out_dir);
    fs::path dir(args.out_dir);
    bsq::write_experiment_csv(dir / "records.csv", res.records);
    bsq::write_experiment_summary(dir / "summary.json", res.summary);

    json manifest;
    manifest["command"] = "nonuniform";
    manifest["preset"] = preset;
    manifest["grid"] = {{"n", g.n}, {"box_length", g.box_length}};
    manifest["sobolev_s"] = s;
    manifest["experiment"] = {
        {"ball_radius", ec.ball_radius},
        {"n_values", ec.n_values},
        {"probe_x1", ec.probe_x1},
        {"probe_x2", ec.probe_x2},
        {"probe_sigma", sigma},
        {"fd_eps", ec.fd_eps},
        {"radius_rule", rule},
        {"radius_scale", ec.radius_scale},
        {"lipschitz_safety", ec.lipschitz_safety},
        {"boundary_samples", ec.boundary_samples},
        {"solver", solver_to_json(ec.solver)},
        {"smooth_solver", solver_to_json(ec.smooth_solver)},
    };
    write_manifest(dir, manifest, {"records.csv", "summary.json", "manifest.json"});

    std::printf("nonuniform: m=%.4e L=%.4e slope=%.4f retention=%.4f\n",
                res.summary.m, res.summary.lipschitz, res.summary.slope_input,
                res.summary.gap_retention);
    for (const auto& r : res.records)
        std::printf("  n=%-3d r=%.4f input_gap=%.4e output_gap=%.4e sep=%.4e disjoint=%d %s\n",
                    r.n, r.r_n, r.input_gap, r.output_gap, r.separation,
                    r.images_disjoint ? 1 : 0, r.status.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lagrangian pseudo-spectral solver for the inviscid 2D "
                 "Boussinesq system"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub, bool with_preset) {
        sub->add_option("--config", args.config_path, "JSON configuration file");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--threads", args.threads, "worker threads");
        if (with_preset)
            sub->add_option("--preset", args.preset,
                            "initial data preset (rest, taylor_green, bump_theta)");
    };
    CLI::App* sim = app.add_subcommand("simulate", "integrate one trajectory");
    add_common(sim, true);
    CLI::App* val = app.add_subcommand("validate", "run structural invariant checks");
    add_common(val, true);
    CLI::App* non = app.add_subcommand("nonuniform", "non-uniform-dependence experiment");
    add_common(non, true);

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return run_simulate(args);
        if (val->parsed()) return run_validate(args);
        if (non->parsed()) return run_nonuniform(args);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const bsq::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const bsq::ZeroField& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const bsq::UnresolvableBump& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const bsq::BlowupDetected& e) {
        std::fprintf(stderr, "blowup guard: %s\n", e.what());
        return 3;
    } catch (const bsq::CflViolation& e) {
        std::fprintf(stderr, "cfl guard: %s\n", e.what());
        return 3;
    } catch (const bsq::NoConvergence& e) {
        std::fprintf(stderr, "inversion failure: %s\n", e.what());
        return 3;
    } catch (const bsq::DegenerateDiffeo& e) {
        std::fprintf(stderr, "degenerate flow map: %s\n", e.what());
        return 3;
    } catch (const bsq::SymmetryViolation& e) {
        std::fprintf(stderr, "property violation: %s\n", e.what());
        return 4;
    } catch (const bsq::DegenerateDirection& e) {
        std::fprintf(stderr, "property violation: %s\n", e.what());
        return 4;
    } catch (const bsq::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

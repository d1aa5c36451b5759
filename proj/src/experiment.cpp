#include "bsq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "bsq/errors.hpp"
#include "bsq/field_ops.hpp"
#include "bsq/interp.hpp"
#include "bsq/spectral.hpp"

namespace bsq {

namespace {

std::array<double, 2> displacement_at(const VectorField2& d, double x, double y) {
    return {eval_at(d.x1, x, y, 5), eval_at(d.x2, x, y, 5)};
}

double slope_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t k = xs.size();
    if (k < 2) return std::nan("");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= k;
    my /= k;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double dx = std::log(xs[i]) - mx;
        num += dx * (std::log(ys[i]) - my);
        den += dx * dx;
    }
    return num / den;
}

} // namespace

VectorField2 flow_derivative_field(const VectorField2& u0, const ScalarField& theta0,
                                   const VectorField2& du, const ScalarField& dth,
                                   double eps, const SolverParams& p) {
    if (eps <= 0.0) throw ConfigError("derivative step must be positive");
    VectorField2 up = u0, um = u0;
    up += eps * du;
    um -= eps * du;
    ScalarField tp = theta0, tm = theta0;
    tp += eps * dth;
    tm -= eps * dth;
    SolutionMapOutput plus = solution_map(up, tp, p);
    SolutionMapOutput minus = solution_map(um, tm, p);
    VectorField2 D = plus.state.phi.displacement();
    D -= minus.state.phi.displacement();
    D *= 1.0 / (2.0 * eps);
    return D;
}

double estimate_m(const VectorField2& derivative_field, double x1, double x2,
                  double direction_norm) {
    if (direction_norm <= 0.0)
        throw ConfigError("direction norm must be positive");
    const auto d = displacement_at(derivative_field, x1, x2);
    const double m = 0.5 * std::hypot(d[0], d[1]) / direction_norm;
    if (m < 1e-8)
        throw DegenerateDirection("flow derivative vanishes at the marker point");
    return m;
}

double estimate_lipschitz(const std::vector<const Diffeo*>& family, double safety) {
    if (family.empty()) throw ConfigError("empty flow family");
    double worst = 0.0;
    for (const Diffeo* phi : family)
        worst = std::max(worst, max_operator_norm(jacobian(*phi)));
    return safety * worst;
}

std::vector<SequenceMember> build_sequences(const Grid2D& g,
                                            const ExperimentConfig& cfg,
                                            double derivative_radius_scale) {
    const double h = g.box_length / g.n;
    std::vector<SequenceMember> out;
    out.reserve(cfg.n_values.size());
    for (int n : cfg.n_values) {
        if (n < 1) throw ConfigError("sequence index must be >= 1");
        SequenceMember mbr;
        mbr.n = n;
        mbr.r_n = (cfg.radius_rule == RadiusRule::grid_limited
                       ? cfg.radius_scale
                       : derivative_radius_scale) /
                  n;
        // resolvable: at least two cells across the radius, and small enough
        // that the periodic bump does not wrap onto itself
        mbr.resolvable = mbr.r_n >= 2.0 * h && mbr.r_n <= 0.25 * g.box_length;
        if (mbr.resolvable) {
            try {
                mbr.theta_n =
                    normalize_hs(bump(g, cfg.probe_x1, cfg.probe_x2, mbr.r_n),
                                 cfg.sobolev_s, 0.5 * cfg.ball_radius);
            } catch (const UnresolvableBump&) {
                mbr.resolvable = false;
            }
        }
        out.push_back(std::move(mbr));
    }
    return out;
}

double composition_norm_ratio(const ScalarField& theta, const Diffeo& psi,
                              double s, const CompositionScheme& cs) {
    const double denom = sobolev_norm(theta, s);
    if (denom < 1e-14) throw ZeroField("norm ratio of a zero field");
    return sobolev_norm(compose(theta, psi, cs), s) / denom;
}

ExperimentResult run_nonuniform(const VectorField2& u0, const ScalarField& theta0,
                                const VectorField2& u_star,
                                const ExperimentConfig& cfg) {
    const Grid2D& g = theta0.grid;
    if (cfg.n_values.empty()) throw ConfigError("empty sequence list");

    const double s = cfg.sobolev_s;
    const double probe_norm = sobolev_norm(u_star, s);
    if (probe_norm < 1e-14) throw ZeroField("probe direction is zero");

    ExperimentResult res;
    res.summary.probe_norm = probe_norm;

    // Derivative constant at the base point, from the +/- eps probe flows.
    VectorField2 up = u0, um = u0;
    up += cfg.fd_eps * u_star;
    um -= cfg.fd_eps * u_star;
    SolutionMapOutput probe_plus = solution_map(up, theta0, cfg.smooth_solver);
    SolutionMapOutput probe_minus = solution_map(um, theta0, cfg.smooth_solver);
    VectorField2 D = probe_plus.state.phi.displacement();
    D -= probe_minus.state.phi.displacement();
    D *= 1.0 / (2.0 * cfg.fd_eps);
    const double m = estimate_m(D, cfg.probe_x1, cfg.probe_x2, probe_norm);
    res.summary.m = m;

    // Base flow, used for the Lipschitz family and the norm-equivalence band.
    SolutionMapOutput base = solution_map(u0, theta0, cfg.solver);

    const double lipschitz_probe = estimate_lipschitz(
        {&base.state.phi, &probe_plus.state.phi, &probe_minus.state.phi},
        cfg.lipschitz_safety);

    auto members = build_sequences(
        g, cfg, m * probe_norm / (8.0 * lipschitz_probe));

    struct MemberOutput {
        ExperimentRecord rec;
        double opnorm = 0.0;       // max over phi, phi~ jacobian operator norms
        bool ran = false;
    };
    std::vector<MemberOutput> outs(members.size());
    std::vector<std::exception_ptr> errs(members.size());

    auto run_member = [&](std::size_t idx) {
        const SequenceMember& mbr = members[idx];
        MemberOutput& mo = outs[idx];
        mo.rec.n = mbr.n;
        mo.rec.r_n = mbr.r_n;
        VectorField2 du = (1.0 / mbr.n) * u_star;
        mo.rec.input_gap = sobolev_norm(du, s);
        if (!mbr.resolvable) {
            mo.rec.status = "unresolvable";
            return;
        }
        ScalarField th = theta0;
        th += mbr.theta_n;
        VectorField2 ub = u0;
        ub += du;
        SolutionMapOutput A, B;
        try {
            A = solution_map(u0, th, cfg.solver);
            B = solution_map(ub, th, cfg.solver);
        } catch (const BlowupDetected&) {
            mo.rec.status = "blowup";
            return;
        } catch (const CflViolation&) {
            mo.rec.status = "blowup";
            return;
        }
        mo.ran = true;

        VectorField2 du_out = B.u;
        du_out -= A.u;
        ScalarField dth_out = B.theta;
        dth_out -= A.theta;
        mo.rec.output_gap = pair_norm(du_out, dth_out, s);

        const VectorField2& dA = A.state.phi.displacement();
        const VectorField2& dB = B.state.phi.displacement();
        const auto a = displacement_at(dA, cfg.probe_x1, cfg.probe_x2);
        const auto b = displacement_at(dB, cfg.probe_x1, cfg.probe_x2);
        mo.rec.separation = std::hypot(b[0] - a[0], b[1] - a[1]);
        mo.rec.lower_bound_separation = m * probe_norm / (2.0 * mbr.n);

        // Image of supp theta_n under each flow: bound by the image of the
        // boundary circle relative to the image of the center.
        auto containment = [&](const VectorField2& d) {
            double worst = 0.0;
            const auto c = displacement_at(d, cfg.probe_x1, cfg.probe_x2);
            const double cx = cfg.probe_x1 + c[0], cy = cfg.probe_x2 + c[1];
            for (int j = 0; j < cfg.boundary_samples; ++j) {
                const double al = 2.0 * M_PI * j / cfg.boundary_samples;
                const double px = cfg.probe_x1 + mbr.r_n * std::cos(al);
                const double py = cfg.probe_x2 + mbr.r_n * std::sin(al);
                const auto e = displacement_at(d, px, py);
                worst = std::max(
                    worst, g.periodic_distance(px + e[0], py + e[1], cx, cy));
            }
            return worst;
        };
        mo.rec.containment_radius = containment(dA);
        mo.rec.containment_radius_tilde = containment(dB);
        mo.rec.images_disjoint =
            mo.rec.separation >
            mo.rec.containment_radius + mo.rec.containment_radius_tilde;

        Diffeo psiA = invert(A.state.phi);
        Diffeo psiB = invert(B.state.phi);
        mo.rec.ratio = composition_norm_ratio(mbr.theta_n, psiA, s, cfg.solver.comp);
        mo.rec.ratio_tilde =
            composition_norm_ratio(mbr.theta_n, psiB, s, cfg.solver.comp);

        mo.opnorm = std::max(max_operator_norm(jacobian(A.state.phi)),
                             max_operator_norm(jacobian(B.state.phi)));
        mo.rec.status = "ok";
    };

    const int workers =
        std::max(1, std::min<int>(cfg.threads, static_cast<int>(members.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            run_member(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < members.size();
                     i = next.fetch_add(1)) {
                    try {
                        run_member(i);
                    } catch (...) {
                        errs[i] = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    // Assemble records in n order and reduce the summary.
    double lip_worst = lipschitz_probe / cfg.lipschitz_safety;
    std::vector<double> ns, gaps;
    double band_min = 0.0, band_max = 0.0;
    bool band_init = false;
    double retention = std::nan("");
    double first_gap = std::nan(""), first_input = std::nan(""), last_input = std::nan("");
    const ScalarField* ref_theta = nullptr;
    for (std::size_t i = 0; i < members.size(); ++i) {
        MemberOutput& mo = outs[i];
        if (mo.ran) {
            res.summary.resolvable.push_back(mo.rec.n);
            if (!ref_theta) ref_theta = &members[i].theta_n;
            ns.push_back(mo.rec.n);
            gaps.push_back(mo.rec.input_gap);
            lip_worst = std::max(lip_worst, mo.opnorm);
            for (double r : {mo.rec.ratio, mo.rec.ratio_tilde}) {
                if (!band_init) {
                    band_min = band_max = r;
                    band_init = true;
                } else {
                    band_min = std::min(band_min, r);
                    band_max = std::max(band_max, r);
                }
            }
            if (std::isnan(first_gap)) {
                first_gap = mo.rec.output_gap;
                first_input = mo.rec.input_gap;
                retention = 1.0;
            } else {
                retention = std::min(retention, mo.rec.output_gap / first_gap);
            }
            last_input = mo.rec.input_gap;
        }
        res.records.push_back(std::move(mo.rec));
    }

    res.summary.lipschitz = cfg.lipschitz_safety * lip_worst;
    res.summary.slope_input = slope_loglog(ns, gaps);
    res.summary.gap_retention = retention;
    res.summary.input_fall =
        (std::isnan(first_input) || std::isnan(last_input)) ? std::nan("")
                                                            : first_input / last_input;

    if (ref_theta) {
        Diffeo base_psi = invert(base.state.phi);
        res.summary.base_ratio =
            composition_norm_ratio(*ref_theta, base_psi, s, cfg.solver.comp);
        if (!band_init) {
            band_min = band_max = res.summary.base_ratio;
        } else {
            band_min = std::min(band_min, res.summary.base_ratio);
            band_max = std::max(band_max, res.summary.base_ratio);
        }
    } else {
        res.summary.base_ratio = std::nan("");
        band_min = band_max = std::nan("");
    }
    res.summary.c1_band_min = band_min;
    res.summary.c1_band_max = band_max;
    return res;
}

std::vector<ScalingResidual> check_scaling(const VectorField2& u0,
                                           const ScalarField& theta0,
                                           const std::vector<double>& lambdas,
                                           const SolverParams& p) {
    std::vector<ScalingResidual> out;
    out.reserve(lambdas.size());
    for (double lam : lambdas) {
        if (lam <= 0.0) throw ConfigError("scaling factor must be positive");
        SolverParams pa = p;
        pa.t_end = lam;
        pa.dt = lam * p.dt;
        pa.store_snapshots = false;
        SolverParams pb = p;
        pb.t_end = 1.0;
        pb.store_snapshots = false;

        Trajectory ta = solve(u0, theta0, pa);
        VectorField2 su = u0;
        su *= lam;
        ScalarField sth = theta0;
        sth *= lam * lam;
        Trajectory tb = solve(su, sth, pb);

        const LagrangianState& A = ta.final_state();
        const LagrangianState& B = tb.final_state();
        VectorField2 dphi = B.phi.displacement();
        dphi -= A.phi.displacement();
        VectorField2 dv = B.v;
        VectorField2 scaled_va = A.v;
        scaled_va *= lam;
        dv -= scaled_va;
        const double r =
            std::max(dphi.max_norm(), dv.max_norm() / lam);
        out.push_back({lam, r});
    }
    return out;
}

double scaled_map_residual(const VectorField2& u0, const ScalarField& theta0,
                           double T, const SolverParams& p) {
    SolverParams pd = p;
    pd.t_end = T;
    pd.store_snapshots = false;
    SolutionMapOutput direct = solution_map(u0, theta0, pd);
    SolutionMapOutput scaled = scaled_solution_map(u0, theta0, T, p);
    VectorField2 du = scaled.u;
    du -= direct.u;
    ScalarField dth = scaled.theta;
    dth -= direct.theta;
    return std::max(du.max_norm(), dth.max_abs());
}

} // namespace bsq

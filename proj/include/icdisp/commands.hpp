#pragma once

// Implementations of the CLI subcommands. Each command reads a RunConfig,
// writes its artifacts under an output directory, and returns the process
// exit code (0 ok, 1 verification failure, 2 config error, 3 precondition).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "analytic_bounds.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "densities.hpp"
#include "emit.hpp"
#include "fbl.hpp"
#include "mvn.hpp"
#include "region.hpp"

namespace icdisp {

namespace detail {

inline void ensure_outdir(const std::string& outdir) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec || !std::filesystem::is_directory(outdir))
        throw ConfigError("config: output directory '" + outdir + "' is not writable");
}

inline std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("config: cannot write '" + path + "'");
    f << text;
}

inline Json matrix_json(const Mat4& m) {
    Json rows = Json::array();
    for (int i = 0; i < 4; ++i) {
        Json row = Json::array();
        for (int j = 0; j < 4; ++j)
            row.push_back(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        rows.push_back(row);
    }
    return rows;
}

inline const char* regime_name(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::NotVeryStrong: return "not_very_strong";
        case RegimeTag::VeryStrongBoundary: return "very_strong_boundary";
        case RegimeTag::StrictlyVeryStrong: return "strictly_very_strong";
    }
    return "?";
}

/// The point with equal normalized coordinates on the corner boundary:
/// l_j = -sqrt(v_j) PhiInv(sqrt(1-eps)).
inline SecondOrderPoint symmetric_boundary_point(const RegionSpec& spec) {
    const double q = std_normal_quantile(std::sqrt(1.0 - spec.epsilon));
    return {-std::sqrt(spec.v1) * q, -std::sqrt(spec.v2) * q};
}

} // namespace detail

/// analyze: first- and second-order channel quantities as a JSON report.
inline int cmd_analyze(const RunConfig& cfg, const std::string& outdir) {
    detail::ensure_outdir(outdir);
    const Regime reg = classify_regime(cfg.channel);
    const FirstOrder fo = first_order(cfg.channel);
    const SecondOrder so = second_order(cfg.channel);

    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["channel"] = cfg.to_json()["channel"];
    j["regime"] = detail::regime_name(reg.tag);
    j["slack1"] = reg.slack1;
    j["slack2"] = reg.slack2;
    j["first_order"] = {{"i11", fo.i11}, {"i21", fo.i21}, {"i12", fo.i12}, {"i22", fo.i22}};
    j["v1"] = so.v1;
    j["v2"] = so.v2;
    j["vd"] = detail::matrix_json(so.vd);
    if (reg.very_strong()) {
        const auto rect = capacity_region_vertices(cfg.channel);
        Json verts = Json::array();
        for (const auto& v : rect) verts.push_back({v[0], v[1]});
        j["capacity_rectangle"] = verts;
    }
    detail::write_text(detail::join(outdir, "analyze.json"), j.dump(2) + "\n");
    return 0;
}

/// region: boundary trace as CSV plus an SVG plot; interior/exterior
/// targets produce a sentinel report and no plot.
inline int cmd_region(const RunConfig& cfg, const std::string& outdir) {
    detail::ensure_outdir(outdir);
    const TargetPoint tp = cfg.region.target.resolve(cfg.channel);
    RegionSpec spec;
    try {
        spec = classify_target(cfg.channel, tp);
    } catch (const std::domain_error& e) {
        throw PreconditionError(e.what());
    }

    Json meta;
    meta["schema_version"] = kReportSchemaVersion;
    meta["case"] = to_string(spec.kase);
    meta["epsilon"] = spec.epsilon;
    meta["v1"] = spec.v1;
    meta["v2"] = spec.v2;
    meta["kappa1"] = tp.kappa1;
    meta["kappa2"] = tp.kappa2;

    if (spec.kase == RegionCase::Interior || spec.kase == RegionCase::Exterior) {
        meta["region"] = spec.kase == RegionCase::Interior ? "all" : "empty";
        detail::write_text(detail::join(outdir, "region.json"), meta.dump(2) + "\n");
        return 0;
    }

    std::vector<double> l1s, l2s;
    if (spec.kase == RegionCase::Corner) {
        const BoundaryTrace trace = trace_boundary(spec, cfg.region.grid);
        for (const auto& p : trace.points) {
            l1s.push_back(p.l1);
            l2s.push_back(p.l2);
        }
        meta["l1_window"] = {trace.l1_lo, trace.l1_hi};
        meta["clip"] = trace.clip;
    } else {
        // half-plane cases: the boundary is a straight line
        const bool vertical = spec.kase == RegionCase::Vertical;
        const double v = vertical ? spec.v1 : spec.v2;
        const double boundary = std::sqrt(v) * std_normal_quantile(spec.epsilon);
        const double other_v = vertical ? spec.v2 : spec.v1;
        const double span = 4.0 * std::sqrt(other_v);
        for (int i = 0; i < cfg.region.grid; ++i) {
            const double q = -span + 2.0 * span * static_cast<double>(i) /
                                         static_cast<double>(cfg.region.grid - 1);
            l1s.push_back(vertical ? boundary : q);
            l2s.push_back(vertical ? q : boundary);
        }
        meta["boundary"] = boundary;
    }

    CsvTable csv({"l1", "l2"});
    for (std::size_t i = 0; i < l1s.size(); ++i) csv.add_row({l1s[i], l2s[i]});
    csv.write(detail::join(outdir, "region.csv"));

    SvgPlot plot("second-order region boundary, eps = " + format_number(spec.epsilon),
                 "L1 (nats/sqrt(use))", "L2 (nats/sqrt(use))");
    plot.add_series(l1s, l2s);
    plot.write(detail::join(outdir, "region.svg"));
    detail::write_text(detail::join(outdir, "region.json"), meta.dump(2) + "\n");
    return 0;
}

/// simulate: blocklength sweep of both non-asymptotic bounds against the
/// asymptotic prediction, written as CSV.
inline int cmd_simulate(const RunConfig& cfg, const std::string& outdir) {
    detail::ensure_outdir(outdir);
    const TargetPoint tp = cfg.simulate.target.resolve(cfg.channel);
    RegionSpec spec;
    try {
        spec = classify_target(cfg.channel, tp);
    } catch (const std::domain_error& e) {
        throw PreconditionError(e.what());
    }
    if (spec.kase != RegionCase::Corner)
        throw PreconditionError("simulate: target must be the capacity corner");

    const SecondOrderPoint pt = cfg.simulate.symmetric_boundary
                                    ? detail::symmetric_boundary_point(spec)
                                    : SecondOrderPoint{cfg.simulate.l1, cfg.simulate.l2};
    BoundOptions opt;
    opt.threads = cfg.threads;
    ExperimentTable table;
    try {
        table = second_order_experiment(cfg.channel, tp, pt, cfg.simulate.n_list,
                                        cfg.simulate.trials, cfg.seed, opt);
    } catch (const std::domain_error& e) {
        throw PreconditionError(e.what());
    }

    CsvTable csv({"n", "achievability_estimate", "achievability_stderr", "converse_estimate",
                  "converse_stderr", "theorem_prediction"});
    for (const auto& row : table.rows)
        csv.add_row({static_cast<double>(row.n), row.ach_bound(), row.ach_se, row.conv_value,
                     row.conv_se, row.prediction});
    csv.write(detail::join(outdir, "simulate.csv"));
    return 0;
}

namespace detail {

struct Check {
    std::string name;
    bool pass = true;
    Json stats;
};

inline void add_check(std::vector<Check>& checks, std::string name, bool pass, Json stats) {
    checks.push_back(Check{std::move(name), pass, std::move(stats)});
}

} // namespace detail

/// verify: statistical verification suite (conditional density moments,
/// moment-vector covariance, tau Jacobian, vd match, bound scans) as a JSON
/// report. Returns 1 when any check fails; the report is kept either way.
inline int cmd_verify(const RunConfig& cfg, const std::string& outdir) {
    detail::ensure_outdir(outdir);
    const ChannelParams& ch = cfg.channel;
    const FirstOrder fo = first_order(ch);
    const SecondOrder so = second_order(ch);
    const Alphas al = so.alphas;
    std::vector<detail::Check> checks;

    // conditional moments for two distinct on-shell codeword pairs
    for (int pair = 0; pair < 2; ++pair) {
        const auto x1 = on_sphere_codeword(cfg.verify.n, ch.p1, pair == 0 ? 0 : 2);
        const auto x2 = on_sphere_codeword(cfg.verify.n, ch.p2, pair == 0 ? 1 : 3);
        StatsOptions opt;
        opt.mode = CodewordMode::Fixed;
        opt.x1 = &x1;
        opt.x2 = &x2;
        opt.threads = cfg.threads;
        const EmpiricalStats st =
            empirical_stats(ch, cfg.verify.n, cfg.verify.trials, cfg.seed + static_cast<std::uint64_t>(pair), opt);

        const double dm1 = st.mean[0] - fo.i11;
        const double dm2 = st.mean[1] - fo.i21;
        const bool mean_ok =
            std::abs(dm1) <= 4.0 * st.mean_se[0] && std::abs(dm2) <= 4.0 * st.mean_se[1];
        detail::add_check(checks, "conditional_mean_pair" + std::to_string(pair), mean_ok,
                          Json{{"dev1", dm1},
                               {"se1", st.mean_se[0]},
                               {"dev2", dm2},
                               {"se2", st.mean_se[1]}});

        const double dv1 = st.cov[0][0] - so.v1;
        const double dv2 = st.cov[1][1] - so.v2;
        const double doff = st.cov[0][1];
        const bool cov_ok = std::abs(dv1) <= 4.0 * st.cov_se[0][0] &&
                            std::abs(dv2) <= 4.0 * st.cov_se[1][1] &&
                            std::abs(doff) <= 4.0 * st.cov_se[0][1];
        detail::add_check(checks, "conditional_cov_pair" + std::to_string(pair), cov_ok,
                          Json{{"dev_v1", dv1},
                               {"se_v1", st.cov_se[0][0]},
                               {"dev_v2", dv2},
                               {"se_v2", st.cov_se[1][1]},
                               {"offdiag", doff},
                               {"se_offdiag", st.cov_se[0][1]}});
    }

    // moment-vector covariance against the alpha table
    {
        const MomentCovStats mc =
            empirical_moment_covariance(ch, cfg.verify.u_draws, cfg.seed + 11, cfg.threads);
        const Mat10 target = moment_covariance(al);
        double worst = 0.0;
        int bad = 0;
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = i; j < 10; ++j) {
                const double se = std::max(mc.cov_se[i][j], 1e-300);
                const double sig = std::abs(mc.cov[i][j] - target[i][j]) / se;
                worst = std::max(worst, sig);
                if (sig > 4.0) ++bad;
            }
        double worst_mean = 0.0;
        for (std::size_t i = 0; i < 10; ++i)
            worst_mean =
                std::max(worst_mean, std::abs(mc.mean[i]) / std::max(mc.mean_se[i], 1e-300));
        detail::add_check(checks, "moment_covariance", bad == 0 && worst_mean <= 4.0,
                          Json{{"entries_beyond_4sigma", bad},
                               {"worst_sigma", worst},
                               {"worst_mean_sigma", worst_mean}});
    }

    // tau Jacobian at the origin by central differences
    {
        const Matrix<4, 10> jac = tau_jacobian(al);
        const double h = 1e-6;
        double worst = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            std::array<double, 10> up{}, dn{};
            up[i] = h;
            dn[i] = -h;
            const auto tu = tau(al, up);
            const auto td = tau(al, dn);
            for (std::size_t r = 0; r < 4; ++r)
                worst = std::max(worst, std::abs((tu[r] - td[r]) / (2.0 * h) - jac[r][i]));
        }
        detail::add_check(checks, "tau_jacobian_fd", worst <= 1e-6, Json{{"max_abs_dev", worst}});
    }

    // tau reconstruction identity on sampled blocks
    {
        const int n = 50;
        double worst = 0.0;
        for (std::uint64_t b = 0; b < cfg.verify.tau_blocks; ++b) {
            const SphereSample s = sample_sphere_block(ch, n, cfg.seed + 13, b);
            const DensitySample d = info_densities_closed_form(ch, s);
            const auto tv = tau(al, moment_vector_mean(ch, s));
            const double dn = static_cast<double>(n);
            const double lam[4] = {al.a11, al.a21, al.a12, al.a22};
            const double target[4] = {dn * fo.i11, dn * fo.i21, dn * fo.i12, dn * fo.i22};
            const double vals[4] = {d.i11, d.i21, d.i12, d.i22};
            for (int l = 0; l < 4; ++l)
                worst = std::max(worst, std::abs(vals[l] - (target[l] + dn / (2.0 * lam[l]) *
                                                                            tv[static_cast<std::size_t>(l)])));
        }
        detail::add_check(checks, "tau_reconstruction", worst <= 1e-8,
                          Json{{"max_abs_dev", worst}});
    }

    // vd: the matrix-product assembly against the closed-form entries, and
    // both against the random-codeword sample covariance
    {
        StatsOptions opt;
        opt.threads = cfg.threads;
        const EmpiricalStats st =
            empirical_stats(ch, 2 * cfg.verify.n, cfg.verify.trials, cfg.seed + 17, opt);
        Mat4 target = so.vd;
        if (cfg.verify.perturb_vd) {
            const auto& p = *cfg.verify.perturb_vd;
            const auto i = static_cast<std::size_t>(p[0]);
            const auto j = static_cast<std::size_t>(p[1]);
            if (i > 3 || j > 3) throw ConfigError("config: field 'verify._perturb_vd' indices must be 0..3");
            target[i][j] += p[2];
            target[j][i] = target[i][j];
        }
        const Mat4 closed = vd_closed_form(al);
        double assembly_dev = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                assembly_dev = std::max(assembly_dev, std::abs(target[i][j] - closed[i][j]));
        double worst = 0.0;
        int bad = 0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i; j < 4; ++j) {
                const double sig =
                    std::abs(st.cov[i][j] - target[i][j]) / std::max(st.cov_se[i][j], 1e-300);
                worst = std::max(worst, sig);
                if (sig > 4.0) ++bad;
            }
        detail::add_check(checks, "vd_match", bad == 0 && assembly_dev <= 1e-12,
                          Json{{"entries_beyond_4sigma", bad},
                               {"worst_sigma", worst},
                               {"assembly_dev", assembly_dev}});
    }

    // nonpositivity scans of the limiting bound exponents
    {
        const GridScan phi = scan_phi_limit(ch);
        const double target = 1.0 + ch.snr1();
        const bool ok = phi.violations == 0 && std::abs(phi.argmax - target) <= 1e-3;
        detail::add_check(checks, "phi_scan", ok,
                          Json{{"max_value", phi.max_value},
                               {"argmax", phi.argmax},
                               {"argmax_target", target},
                               {"violations", phi.violations}});
    }
    {
        const GridScan rho = scan_rho_limit(ch);
        const double target = ch.snr1() + ch.h21 * ch.h21 * ch.p2;
        const bool ok = rho.violations == 0 && std::abs(rho.argmax - target) <= 1e-3;
        detail::add_check(checks, "rho_scan", ok,
                          Json{{"max_value", rho.max_value},
                               {"argmax", rho.argmax},
                               {"argmax_target", target},
                               {"violations", rho.violations}});
    }

    // exact conditional-output ratio against its exponential bound
    {
        const RatioCheck rc = finite_n_ratio_check(ch, cfg.verify.ratio_n,
                                                   cfg.verify.ratio_samples, cfg.seed + 19,
                                                   cfg.threads);
        const bool ok = rc.violations == 0 && std::abs(rc.is_mean - 1.0) <= 3.0 * rc.is_se;
        detail::add_check(checks, "d11_ratio_bound", ok,
                          Json{{"violations", rc.violations},
                               {"min_margin", rc.min_margin},
                               {"max_log_d11", rc.max_log_d11},
                               {"is_mean", rc.is_mean},
                               {"is_se", rc.is_se}});
    }

    Json report;
    report["schema_version"] = kReportSchemaVersion;
    report["seed"] = cfg.seed;
    report["n"] = cfg.verify.n;
    report["trials"] = cfg.verify.trials;
    bool all_pass = true;
    Json arr = Json::array();
    for (const auto& c : checks) {
        Json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["stats"] = c.stats;
        arr.push_back(e);
        all_pass = all_pass && c.pass;
    }
    report["checks"] = arr;
    report["pass"] = all_pass;
    detail::write_text(detail::join(outdir, "verify.json"), report.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

} // namespace icdisp

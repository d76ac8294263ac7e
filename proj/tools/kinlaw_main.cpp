// kinlaw: experiment runner for 2x2 hyperbolic systems, their singular
// entropy families, kinetic defect measures, characteristic bundles, and
// shock-structure diagnostics. Every output directory is self-describing:
// the full configuration is echoed into its manifest.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kinlaw/diagnostics.hpp"
#include "kinlaw/io.hpp"
#include "kinlaw/kinetic.hpp"
#include "kinlaw/lagrangian.hpp"
#include "kinlaw/verify.hpp"
#include "kinlaw/viscous.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kinlaw;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAcceptance = 3;

struct Experiment {
    json raw;
    std::unique_ptr<SystemChart> chart;
    SimConfig sim;
    Grid1 wgrid, zgrid, xigrid, zetagrid;
    double band_r_frac = 0.4;
    int kinetic_width = 4;
    KineticVariant variant = KineticVariant::chi;
    int n_curves = 1024;
    int substeps = 1;
    std::vector<double> jump_radii_cells{2, 4, 8};
    double jump_theta = -1.0;  // negative: use the documented default
    std::vector<double> vmo_radii{0.32, 0.16, 0.08, 0.04};
};

Experiment load_experiment(const fs::path& file) {
    Experiment e;
    e.raw = read_json(file);
    const json& j = e.raw;
    const json chart = j.value("chart", json{{"id", "decoupled"}});
    e.chart = make_chart(chart.value("id", "decoupled"),
                         chart.value("params", json::object()));
    const Rect& R = e.chart->rectangle();

    const json grid = j.value("grid", json::object());
    e.sim.nx = grid.value("nx", 512);
    e.sim.T = grid.value("T", 1.0);
    e.sim.L = grid.value("L", 4.0);
    e.sim.snapshots = grid.value("snapshots", 201);
    e.sim.epsilon = j.value("epsilon", 0.01);
    e.sim.cfl = j.value("cfl", 0.4);
    const json init = j.value("initial_data", json::object());
    e.sim.initial_rule = init.value("rule", "sine");
    e.sim.initial_params = init.value("params", json::object());

    const json fam = j.value("family", json::object());
    const int nw = fam.value("n_w", 129);
    const int nz = fam.value("n_z", nw);
    const int nxi = fam.value("n_xi", 33);
    const int nzeta = fam.value("n_zeta", nxi);
    e.wgrid = {R.w_lo, R.w_hi, nw};
    e.zgrid = {R.z_lo, R.z_hi, nz};
    e.xigrid = {R.w_lo, R.w_hi, nxi};
    e.zetagrid = {R.z_lo, R.z_hi, nzeta};

    e.band_r_frac = j.value("band", json::object()).value("r_frac", 0.4);
    const json kin = j.value("kinetic", json::object());
    e.kinetic_width = kin.value("width", 4);
    e.variant = variant_from_string(kin.value("variant", "chi"));
    const json tr = j.value("trace", json::object());
    e.n_curves = tr.value("n_curves", 1024);
    e.substeps = tr.value("substeps", 1);
    const json diag = j.value("diagnostics", json::object());
    if (diag.contains("radii_cells"))
        e.jump_radii_cells = diag.at("radii_cells").get<std::vector<double>>();
    e.jump_theta = diag.value("theta", -1.0);
    if (diag.contains("vmo_radii"))
        e.vmo_radii = diag.at("vmo_radii").get<std::vector<double>>();
    return e;
}

void write_run_manifest(const fs::path& out, const std::string& command, const json& config) {
    write_json(out / "run.json", json{{"tool", "kinlaw"},
                                      {"command", command},
                                      {"config", config}});
}

int cmd_simulate(const fs::path& cfg_path, const fs::path& out) {
    const Experiment e = load_experiment(cfg_path);
    if (e.raw.contains("epsilon_list")) {
        const auto eps = e.raw.at("epsilon_list").get<std::vector<double>>();
        const ConvergenceReport rep = vanishing_sequence(*e.chart, e.sim, eps);
        json jr{{"eps", rep.eps}, {"l1_distance", rep.l1_distance}, {"cauchy", rep.cauchy}};
        write_json(out / "vanishing.json", jr);
        SimConfig last = e.sim;
        last.epsilon = eps.back();
        const GridSolution sol = simulate(*e.chart, last);
        save_solution(out / "solution", sol);
        save_energy(out / "solution", energy_budget(*e.chart, sol));
    } else {
        const GridSolution sol = simulate(*e.chart, e.sim);
        save_solution(out / "solution", sol);
        save_energy(out / "solution", energy_budget(*e.chart, sol));
    }
    write_run_manifest(out, "simulate", e.raw);
    std::cout << "wrote " << (out / "solution").string() << "\n";
    return 0;
}

int cmd_family(const fs::path& cfg_path, const fs::path& out) {
    const Experiment e = load_experiment(cfg_path);
    const EntropyFamily fam =
        build_family(*e.chart, e.wgrid, e.zgrid, e.xigrid, e.zetagrid);
    save_family(out / "family", fam);
    write_run_manifest(out, "family", e.raw);
    std::cout << "wrote " << (out / "family").string() << " (rbar=" << fam.rbar
              << ", c=" << fam.c << ")\n";
    return 0;
}

int cmd_kinetic(const fs::path& cfg_path, const fs::path& sol_dir, const fs::path& fam_dir,
                const fs::path& out) {
    const Experiment e = load_experiment(cfg_path);
    const GridSolution sol = load_solution(sol_dir);
    const EntropyFamily fam = load_family(fam_dir, *e.chart);

    const KineticField field = assemble(sol, *e.chart, fam, e.variant);
    const MeasureEstimate T = kinetic_residual(field, e.kinetic_width);
    save_measure(out, T, "residual_" + to_string(e.variant));
    const KineticSplit split = split_residual(T, sol.epsilon > 0);
    save_measure(out, split.mu1, "mu1_split");
    save_measure(out, split.mu0, "mu0_split");

    const EtaSpec spec = eta_from_pair(builtin_convex_entropy(*e.chart));
    save_measure(out, dissipation_measure(sol, *e.chart, spec, e.kinetic_width), "mu_eta");
    if (sol.epsilon > 0)
        save_measure(out, mu1_from_viscous(sol, *e.chart, fam), "mu1_eps");
    save_measure(out,
                 nu_sup(sol, *e.chart, build_entropy_bank(*e.chart, fam, 32),
                        e.kinetic_width),
                 "nu_sup");
    write_run_manifest(out, "kinetic", e.raw);
    std::cout << "wrote measures under " << out.string() << "\n";
    return 0;
}

int cmd_trace(const fs::path& cfg_path, const fs::path& sol_dir, const fs::path& fam_dir,
              const fs::path& out) {
    const Experiment e = load_experiment(cfg_path);
    const GridSolution sol = load_solution(sol_dir);
    const EntropyFamily fam = load_family(fam_dir, *e.chart);
    const BandSpec band = make_band(*e.chart, sol, fam.rbar, e.band_r_frac);
    const CurveBundle gmax =
        seed_bundle(sol, *e.chart, fam, band, true, e.n_curves, e.substeps);
    const CurveBundle gmin =
        seed_bundle(sol, *e.chart, fam, band, false, e.n_curves, e.substeps);
    save_bundle(out, gmax, "bundle_max");
    save_bundle(out, gmin, "bundle_min");
    const CrossingReport rep = crossing_check(gmax, gmin);
    write_json(out / "crossing.json", json{{"pairs", rep.pairs},
                                           {"violations", rep.violations},
                                           {"fraction", rep.fraction}});
    write_run_manifest(out, "trace", e.raw);
    std::cout << "traced " << gmax.curves.size() << " + " << gmin.curves.size()
              << " curves, crossing fraction " << rep.fraction << "\n";
    return 0;
}

int cmd_qfunc(const fs::path& cfg_path, const fs::path& sol_dir, const fs::path& fam_dir,
              const fs::path& out) {
    const Experiment e = load_experiment(cfg_path);
    const GridSolution sol = load_solution(sol_dir);
    const EntropyFamily fam = load_family(fam_dir, *e.chart);
    const BandSpec band = make_band(*e.chart, sol, fam.rbar, e.band_r_frac);

    // reference curves: fast one from the w-crest, slow one from the next
    // trough to its right
    int icrest = 0, itrough = 0;
    for (int i = 0; i < sol.nx; ++i) {
        const double w = e.chart->to_riemann(sol.u[0][i]).w;
        if (w > e.chart->to_riemann(sol.u[0][icrest]).w) icrest = i;
        if (w < e.chart->to_riemann(sol.u[0][itrough]).w) itrough = i;
    }
    double xg = sol.x(icrest), xs = sol.x(itrough);
    if (xs < xg) xs += sol.L;
    const Curve g = trace(sol, *e.chart, fam, xg, sol.t.front(), band.b, +1, -1, e.substeps);
    const Curve s = trace(sol, *e.chart, fam, xs, sol.t.front(),
                          band.w_min + band.r / 2, +1, -1, e.substeps);
    const QLedger led = q_functional(sol, *e.chart, fam, g, s, band);
    save_qledger(out, led);
    write_run_manifest(out, "qfunc", e.raw);
    std::cout << "Q(0)=" << led.Q.front() << " Q(end)=" << led.Q.back()
              << " predicted decay rate " << led.predicted_rate << "\n";
    return 0;
}

int cmd_jumpset(const fs::path& cfg_path, const fs::path& sol_dir, const fs::path& fam_dir,
                const fs::path& out) {
    const Experiment e = load_experiment(cfg_path);
    const GridSolution sol = load_solution(sol_dir);
    const EntropyFamily fam = load_family(fam_dir, *e.chart);
    const MeasureEstimate nu = nu_sup(
        sol, *e.chart, build_entropy_bank(*e.chart, fam, 32), e.kinetic_width);
    save_measure(out, nu, "nu_sup");
    std::vector<double> radii;
    for (double c : e.jump_radii_cells) radii.push_back(c * sol.dx);
    const double theta =
        e.jump_theta > 0 ? e.jump_theta : default_jump_threshold(nu, radii);
    const JumpSetMask mask = jump_set(nu, radii, theta);
    save_mask(out, mask);
    write_run_manifest(out, "jumpset", e.raw);
    std::cout << "flagged " << mask.cells.size() << " cells at theta=" << theta << "\n";
    return 0;
}

int cmd_vmo(const fs::path& cfg_path, const fs::path& sol_dir, const fs::path& out) {
    const Experiment e = load_experiment(cfg_path);
    const GridSolution sol = load_solution(sol_dir);
    std::vector<VmoProfile> profiles;
    if (e.raw.contains("diagnostics") && e.raw["diagnostics"].contains("points")) {
        for (const auto& pt : e.raw["diagnostics"]["points"])
            profiles.push_back(
                vmo_profile(sol, pt.at(0).get<double>(), pt.at(1).get<double>(), e.vmo_radii));
    } else {
        // default probe: mid-window sweep across the domain
        const double tc = 0.5 * (sol.t.front() + sol.t.back());
        for (int i = 0; i < 8; ++i)
            profiles.push_back(vmo_profile(sol, tc, (i + 0.5) * sol.L / 8, e.vmo_radii));
    }
    save_vmo(out, profiles);
    write_run_manifest(out, "vmo", e.raw);
    std::cout << "wrote " << profiles.size() << " oscillation profiles\n";
    return 0;
}

int cmd_report(const fs::path& dir) {
    std::ofstream md(dir / "report.md", std::ios::trunc);
    if (!md) throw FormatError("cannot write report under " + dir.string());
    md << "# kinlaw run report\n\n";
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path p = entry.path();
        if (p.extension() == ".json" && p.filename() != "run.json") {
            md << "## " << fs::relative(p, dir).string() << "\n\n```json\n";
            std::ifstream f(p);
            md << f.rdbuf() << "```\n\n";
        }
        if (p.extension() == ".csv")
            md << "- data table: `" << fs::relative(p, dir).string() << "`\n";
    }
    md << "\n";
    // plain-text plotting template; any CSV tool can consume the tables
    std::ofstream gp(dir / "plot.gp", std::ios::trunc);
    gp << "# gnuplot template for kinlaw CSV tables\n"
          "set datafile separator ','\n"
          "set key autotitle columnhead\n"
          "# Q ledger:   plot 'qledger.csv' using 1:2 with lines\n"
          "# measures:   plot 'nu_sup.csv' using 2:1:4 with points palette\n"
          "# vmo:        plot 'vmo.csv' using 3:4 with linespoints\n";
    std::cout << "wrote " << (dir / "report.md").string() << "\n";
    return 0;
}

int cmd_verify(const fs::path& out) {
    const auto results = run_acceptance(std::cout);
    json jr = json::array();
    int failed = 0;
    for (const auto& r : results) {
        jr.push_back({{"index", r.index},
                      {"name", r.name},
                      {"pass", r.pass},
                      {"seconds", r.seconds},
                      {"detail", r.detail}});
        if (!r.pass) ++failed;
    }
    if (!out.empty()) write_json(out / "verify.json", json{{"criteria", jr}});
    if (failed > 0) {
        std::cout << failed << " of " << results.size() << " criteria failed\n";
        return kExitAcceptance;
    }
    std::cout << "all " << results.size() << " criteria passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for 2x2 systems of conservation laws"};
    app.require_subcommand(1);

    std::string cfg, sol_dir, fam_dir, out = "kinlaw_out";

    auto add_common = [&](CLI::App* sub, bool need_cfg, bool need_sol, bool need_fam) {
        if (need_cfg) sub->add_option("--config", cfg, "experiment config JSON")->required();
        if (need_sol)
            sub->add_option("--solution", sol_dir, "solution directory")->required();
        if (need_fam) sub->add_option("--family", fam_dir, "family directory")->required();
        sub->add_option("--out", out, "output directory");
    };

    add_common(app.add_subcommand("simulate", "run the viscous solver"), true, false, false);
    add_common(app.add_subcommand("family", "build the singular entropy family"), true,
               false, false);
    add_common(app.add_subcommand("kinetic", "assemble kinetic fields and measures"), true,
               true, true);
    add_common(app.add_subcommand("trace", "seed and trace characteristic bundles"), true,
               true, true);
    add_common(app.add_subcommand("qfunc", "evaluate the interaction functional"), true,
               true, true);
    add_common(app.add_subcommand("jumpset", "estimate the candidate jump set"), true, true,
               true);
    add_common(app.add_subcommand("vmo", "compute mean-oscillation profiles"), true, true,
               false);
    add_common(app.add_subcommand("report", "aggregate a run directory"), false, false,
               false);
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    std::string verify_out;
    verify->add_option("--out", verify_out, "where to write verify.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand("simulate")) return cmd_simulate(cfg, out);
        if (app.got_subcommand("family")) return cmd_family(cfg, out);
        if (app.got_subcommand("kinetic")) return cmd_kinetic(cfg, sol_dir, fam_dir, out);
        if (app.got_subcommand("trace")) return cmd_trace(cfg, sol_dir, fam_dir, out);
        if (app.got_subcommand("qfunc")) return cmd_qfunc(cfg, sol_dir, fam_dir, out);
        if (app.got_subcommand("jumpset")) return cmd_jumpset(cfg, sol_dir, fam_dir, out);
        if (app.got_subcommand("vmo")) return cmd_vmo(cfg, sol_dir, out);
        if (app.got_subcommand("report")) return cmd_report(out);
        if (app.got_subcommand("verify")) return cmd_verify(verify_out);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        write_json(fs::path(out) / "failure.json", json{{"error", e.what()}});
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}

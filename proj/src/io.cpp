#include "kinlaw/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace kinlaw {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void byteswap_if_needed(std::vector<double>& data) {
    if constexpr (std::endian::native == std::endian::little) {
        (void)data;
    } else {
        for (double& d : data) {
            uint64_t bits;
            std::memcpy(&bits, &d, 8);
            bits = __builtin_bswap64(bits);
            std::memcpy(&d, &bits, 8);
        }
    }
}

}  // namespace

void write_field(const fs::path& base, std::span<const double> data,
                 const std::vector<AxisSpec>& axes) {
    size_t expect = 1;
    json jaxes = json::array();
    for (const AxisSpec& a : axes) {
        expect *= static_cast<size_t>(a.n);
        jaxes.push_back({{"name", a.name}, {"n", a.n}, {"lo", a.lo}, {"hi", a.hi}});
    }
    if (expect != data.size())
        throw FormatError("axis product does not match the data size for " + base.string());

    fs::create_directories(base.parent_path().empty() ? "." : base.parent_path());
    {
        std::vector<double> buf(data.begin(), data.end());
        byteswap_if_needed(buf);
        std::ofstream f(base.string() + ".bin", std::ios::binary | std::ios::trunc);
        if (!f) throw FormatError("cannot open " + base.string() + ".bin for writing");
        f.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(double)));
    }
    write_json(base.string() + ".json", json{{"dtype", "f64le"},
                                             {"layout", "row-major"},
                                             {"count", data.size()},
                                             {"axes", jaxes}});
}

std::vector<double> read_field(const fs::path& base, std::vector<AxisSpec>& axes) {
    const json man = read_json(base.string() + ".json");
    if (man.value("dtype", "") != "f64le" || man.value("layout", "") != "row-major")
        throw FormatError("unsupported table encoding in " + base.string() + ".json");
    axes.clear();
    size_t expect = 1;
    for (const auto& a : man.at("axes")) {
        AxisSpec spec{a.at("name").get<std::string>(), a.at("n").get<int>(),
                      a.at("lo").get<double>(), a.at("hi").get<double>()};
        if (spec.n <= 0) throw FormatError("axis '" + spec.name + "' has non-positive size");
        expect *= static_cast<size_t>(spec.n);
        axes.push_back(spec);
    }
    if (expect != man.at("count").get<size_t>())
        throw FormatError("axis product disagrees with count in " + base.string() + ".json");

    std::ifstream f(base.string() + ".bin", std::ios::binary | std::ios::ate);
    if (!f) throw FormatError("missing table file " + base.string() + ".bin");
    const auto bytes = static_cast<size_t>(f.tellg());
    if (bytes != expect * sizeof(double))
        throw FormatError("table file " + base.string() + ".bin is " + std::to_string(bytes) +
                          " bytes, manifest expects " + std::to_string(expect * sizeof(double)));
    std::vector<double> data(expect);
    f.seekg(0);
    f.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
    byteswap_if_needed(data);
    return data;
}

json read_json(const fs::path& file) {
    std::ifstream f(file);
    if (!f) throw FormatError("cannot open " + file.string());
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw FormatError("bad JSON in " + file.string() + ": " + e.what());
    }
    return j;
}

void write_json(const fs::path& file, const json& j) {
    fs::create_directories(file.parent_path().empty() ? "." : file.parent_path());
    std::ofstream f(file, std::ios::trunc);
    if (!f) throw FormatError("cannot open " + file.string() + " for writing");
    f << j.dump(2) << "\n";
}

void save_solution(const fs::path& dir, const GridSolution& sol) {
    fs::create_directories(dir);
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(sol.nt()) * sol.nx * 2);
    for (int n = 0; n < sol.nt(); ++n)
        for (int i = 0; i < sol.nx; ++i) {
            flat.push_back(sol.u[n][i].u1);
            flat.push_back(sol.u[n][i].u2);
        }
    write_field(dir / "snapshots",
                flat,
                {{"t", sol.nt(), sol.t.empty() ? 0.0 : sol.t.front(), sol.t_end()},
                 {"x", sol.nx, 0.0, sol.L - sol.dx},
                 {"component", 2, 0.0, 1.0}});
    write_json(dir / "manifest.json", json{{"kind", "solution"},
                                           {"chart", sol.chart_id},
                                           {"config", sol.config},
                                           {"nx", sol.nx},
                                           {"L", sol.L},
                                           {"epsilon", sol.epsilon},
                                           {"dt", sol.dt},
                                           {"cfl_adv", sol.cfl_adv},
                                           {"cfl_diff", sol.cfl_diff},
                                           {"conservation_drift", sol.conservation_drift},
                                           {"snapshots", sol.nt()}});
}

GridSolution load_solution(const fs::path& dir) {
    const json man = read_json(dir / "manifest.json");
    if (man.value("kind", "") != "solution")
        throw FormatError(dir.string() + " does not hold a solution");
    GridSolution sol;
    sol.chart_id = man.at("chart").get<std::string>();
    sol.config = man.value("config", json::object());
    sol.nx = man.at("nx").get<int>();
    sol.L = man.at("L").get<double>();
    sol.dx = sol.L / sol.nx;
    sol.epsilon = man.at("epsilon").get<double>();
    sol.dt = man.value("dt", 0.0);
    sol.cfl_adv = man.value("cfl_adv", 0.0);
    sol.cfl_diff = man.value("cfl_diff", 0.0);
    sol.conservation_drift = man.value("conservation_drift", 0.0);

    std::vector<AxisSpec> axes;
    const std::vector<double> flat = read_field(dir / "snapshots", axes);
    if (axes.size() != 3 || axes[2].n != 2)
        throw FormatError("solution table must have axes (t, x, component)");
    if (axes[1].n != sol.nx) throw FormatError("axis 'x' disagrees with the manifest nx");
    const int nt = axes[0].n;
    sol.t.resize(nt);
    const double t0 = axes[0].lo;
    const double ts = nt > 1 ? (axes[0].hi - axes[0].lo) / (nt - 1) : 0.0;
    for (int n = 0; n < nt; ++n) sol.t[n] = t0 + n * ts;
    sol.u.assign(nt, std::vector<State>(sol.nx));
    for (int n = 0; n < nt; ++n)
        for (int i = 0; i < sol.nx; ++i) {
            const size_t base = (static_cast<size_t>(n) * sol.nx + i) * 2;
            sol.u[n][i] = {flat[base], flat[base + 1]};
        }
    return sol;
}

namespace {

json grid_to_json(const Grid1& g) { return {{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}}; }
Grid1 grid_from_json(const json& j) {
    return {j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("n").get<int>()};
}

void write_member_stack(const fs::path& base, const std::vector<GoursatSolution>& members,
                        bool flux_table, const Grid1& cut, const Grid1& gw, const Grid1& gz) {
    std::vector<double> flat;
    flat.reserve(members.size() * static_cast<size_t>(gw.n) * gz.n);
    for (const auto& m : members) {
        const Table2& t = flux_table ? m.flux : m.theta;
        flat.insert(flat.end(), t.v.begin(), t.v.end());
    }
    write_field(base, flat,
                {{"cut", static_cast<int>(members.size()), cut.lo, cut.hi},
                 {"w", gw.n, gw.lo, gw.hi},
                 {"z", gz.n, gz.lo, gz.hi}});
}

std::vector<Table2> read_member_stack(const fs::path& base, const Grid1& gw, const Grid1& gz,
                                      int expect_members) {
    std::vector<AxisSpec> axes;
    const std::vector<double> flat = read_field(base, axes);
    if (axes.size() != 3) throw FormatError("member stack must have 3 axes");
    if (axes[0].n != expect_members)
        throw FormatError("axis 'cut' disagrees with the family manifest");
    if (axes[1].n != gw.n || axes[2].n != gz.n)
        throw FormatError("axis 'w'/'z' disagree with the family manifest");
    std::vector<Table2> out(expect_members, Table2(gw, gz));
    const size_t per = static_cast<size_t>(gw.n) * gz.n;
    for (int k = 0; k < expect_members; ++k)
        std::copy(flat.begin() + k * per, flat.begin() + (k + 1) * per, out[k].v.begin());
    return out;
}

}  // namespace

void save_family(const fs::path& dir, const EntropyFamily& fam) {
    fs::create_directories(dir);
    write_json(dir / "manifest.json",
               json{{"kind", "entropy_family"},
                    {"chart", fam.chart_id},
                    {"wgrid", grid_to_json(fam.wgrid)},
                    {"zgrid", grid_to_json(fam.zgrid)},
                    {"xigrid", grid_to_json(fam.xigrid)},
                    {"zetagrid", grid_to_json(fam.zetagrid)},
                    {"rbar", fam.rbar},
                    {"c", fam.c}});
    write_member_stack(dir / "theta_xi", fam.xi_members, false, fam.xigrid, fam.wgrid,
                       fam.zgrid);
    write_member_stack(dir / "flux_xi", fam.xi_members, true, fam.xigrid, fam.wgrid,
                       fam.zgrid);
    write_member_stack(dir / "theta_zeta", fam.zeta_members, false, fam.zetagrid, fam.wgrid,
                       fam.zgrid);
    write_member_stack(dir / "flux_zeta", fam.zeta_members, true, fam.zetagrid, fam.wgrid,
                       fam.zgrid);
}

EntropyFamily load_family(const fs::path& dir, const SystemChart& chart) {
    const json man = read_json(dir / "manifest.json");
    if (man.value("kind", "") != "entropy_family")
        throw FormatError(dir.string() + " does not hold an entropy family");
    EntropyFamily fam;
    fam.chart_id = man.at("chart").get<std::string>();
    if (fam.chart_id != chart.id())
        throw ChartMismatchError("family built on chart '" + fam.chart_id + "'");
    fam.wgrid = grid_from_json(man.at("wgrid"));
    fam.zgrid = grid_from_json(man.at("zgrid"));
    fam.xigrid = grid_from_json(man.at("xigrid"));
    fam.zetagrid = grid_from_json(man.at("zetagrid"));
    fam.rbar = man.at("rbar").get<double>();
    fam.c = man.at("c").get<double>();
    fam.gh = compute_gh(chart, fam.wgrid, fam.zgrid);

    auto thx = read_member_stack(dir / "theta_xi", fam.wgrid, fam.zgrid, fam.xigrid.n);
    auto flx = read_member_stack(dir / "flux_xi", fam.wgrid, fam.zgrid, fam.xigrid.n);
    auto thz = read_member_stack(dir / "theta_zeta", fam.wgrid, fam.zgrid, fam.zetagrid.n);
    auto flz = read_member_stack(dir / "flux_zeta", fam.wgrid, fam.zgrid, fam.zetagrid.n);
    fam.xi_members.resize(fam.xigrid.n);
    fam.zeta_members.resize(fam.zetagrid.n);
    fam.speed_xi.resize(fam.xigrid.n);
    fam.speed_zeta.resize(fam.zetagrid.n);
    for (int k = 0; k < fam.xigrid.n; ++k) {
        auto& m = fam.xi_members[k];
        m.xi = fam.xigrid.x(k);
        m.cut_index = fam.wgrid.nearest(m.xi);
        m.theta = std::move(thx[k]);
        m.flux = std::move(flx[k]);
        Table2 s(fam.wgrid, fam.zgrid);
        for (size_t q = 0; q < s.v.size(); ++q) s.v[q] = m.flux.v[q] / m.theta.v[q];
        fam.speed_xi[k] = std::move(s);
    }
    for (int k = 0; k < fam.zetagrid.n; ++k) {
        auto& m = fam.zeta_members[k];
        m.xi = fam.zetagrid.x(k);
        m.cut_index = fam.zgrid.nearest(m.xi);
        m.theta = std::move(thz[k]);
        m.flux = std::move(flz[k]);
        Table2 s(fam.wgrid, fam.zgrid);
        for (size_t q = 0; q < s.v.size(); ++q) s.v[q] = m.flux.v[q] / m.theta.v[q];
        fam.speed_zeta[k] = std::move(s);
    }
    return fam;
}

void save_measure(const fs::path& dir, const MeasureEstimate& m, const std::string& name) {
    fs::create_directories(dir);
    write_json(dir / (name + ".json"), json{{"kind", m.kind},
                                            {"width", m.width},
                                            {"nt", m.nt},
                                            {"nx", m.nx},
                                            {"nk", m.nk},
                                            {"dt", m.dt},
                                            {"dx", m.dx},
                                            {"dk", m.dk},
                                            {"t0", m.t0},
                                            {"L", m.L},
                                            {"cells", m.cells.size()},
                                            {"total", m.total()},
                                            {"total_abs", m.total_abs()}});
    std::ofstream f(dir / (name + ".csv"), std::ios::trunc);
    f << "t_idx,x_idx,k_idx,mass\n" << std::setprecision(17);
    for (const auto& c : m.cells)
        f << c.t_idx << "," << c.x_idx << "," << c.k_idx << "," << c.mass << "\n";
}

MeasureEstimate load_measure(const fs::path& dir, const std::string& name) {
    const json man = read_json(dir / (name + ".json"));
    MeasureEstimate m;
    m.kind = man.at("kind").get<std::string>();
    m.width = man.at("width").get<int>();
    m.nt = man.at("nt").get<int>();
    m.nx = man.at("nx").get<int>();
    m.nk = man.at("nk").get<int>();
    m.dt = man.at("dt").get<double>();
    m.dx = man.at("dx").get<double>();
    m.dk = man.at("dk").get<double>();
    m.t0 = man.at("t0").get<double>();
    m.L = man.at("L").get<double>();
    std::ifstream f(dir / (name + ".csv"));
    if (!f) throw FormatError("missing " + (dir / (name + ".csv")).string());
    std::string line;
    std::getline(f, line);  // header
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        MeasureEstimate::Cell c;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        if (!(ss >> c.t_idx >> c.x_idx >> c.k_idx >> c.mass))
            throw FormatError("bad measure row: " + line);
        m.cells.push_back(c);
    }
    if (m.cells.size() != man.at("cells").get<size_t>())
        throw FormatError("measure row count disagrees with the manifest");
    return m;
}

void save_bundle(const fs::path& dir, const CurveBundle& bundle, const std::string& name) {
    fs::create_directories(dir);
    write_json(dir / (name + ".json"),
               json{{"kind", "curve_bundle"},
                    {"max_side", bundle.max_side},
                    {"curves", bundle.curves.size()},
                    {"total_weight", bundle.total_weight},
                    {"lattice_nx", bundle.lattice_nx},
                    {"lattice_nk", bundle.lattice_nk},
                    {"band",
                     {{"w_min", bundle.band.w_min},
                      {"w_max", bundle.band.w_max},
                      {"r", bundle.band.r},
                      {"a", bundle.band.a},
                      {"b", bundle.band.b}}}});
    std::ofstream f(dir / (name + ".csv"), std::ios::trunc);
    f << "curve,t,x,xi,weight,clamped\n" << std::setprecision(17);
    for (size_t c = 0; c < bundle.curves.size(); ++c) {
        const Curve& cv = bundle.curves[c];
        for (size_t k = 0; k < cv.t.size(); ++k)
            f << c << "," << cv.t[k] << "," << cv.x[k] << "," << cv.xi << "," << cv.weight
              << "," << int(cv.clamped[k]) << "\n";
    }
}

void save_qledger(const fs::path& dir, const QLedger& led) {
    fs::create_directories(dir);
    write_json(dir / "qledger.json", json{{"kind", "qledger"},
                                          {"a", led.a},
                                          {"b", led.b},
                                          {"r", led.r},
                                          {"c", led.c},
                                          {"rbar", led.rbar},
                                          {"w_min", led.w_min},
                                          {"w_max", led.w_max},
                                          {"predicted_rate", led.predicted_rate},
                                          {"crossed", led.crossed},
                                          {"cross_time", led.cross_time}});
    std::ofstream f(dir / "qledger.csv", std::ios::trunc);
    f << "t,Q,F_out,F_in\n" << std::setprecision(17);
    for (size_t k = 0; k < led.t.size(); ++k)
        f << led.t[k] << "," << led.Q[k] << "," << led.F_out[k] << "," << led.F_in[k] << "\n";
}

void save_mask(const fs::path& dir, const JumpSetMask& mask) {
    fs::create_directories(dir);
    write_json(dir / "jumpset.json", json{{"kind", "jump_set"},
                                          {"theta", mask.theta},
                                          {"radii", mask.radii},
                                          {"nu_kind", mask.nu_kind},
                                          {"cells", mask.cells.size()},
                                          {"area", mask.area()}});
    std::ofstream f(dir / "jumpset.csv", std::ios::trunc);
    f << "t_idx,x_idx,t,x\n" << std::setprecision(17);
    for (const auto& [tn, xi] : mask.cells)
        f << tn << "," << xi << "," << mask.t0 + tn * mask.dt << "," << xi * mask.dx << "\n";
}

void save_vmo(const fs::path& dir, const std::vector<VmoProfile>& profiles) {
    fs::create_directories(dir);
    std::ofstream f(dir / "vmo.csv", std::ios::trunc);
    f << "t,x,r,oscillation,decay_flag\n" << std::setprecision(17);
    for (const auto& p : profiles)
        for (size_t k = 0; k < p.radii.size(); ++k)
            f << p.t_center << "," << p.x_center << "," << p.radii[k] << ","
              << p.oscillation[k] << "," << int(p.decay_flag) << "\n";
}

void save_energy(const fs::path& dir, const EnergyLedger& led) {
    fs::create_directories(dir);
    json slabs = json::array();
    for (size_t s = 0; s < led.slab_dissipation.size(); ++s)
        slabs.push_back({{"t0", led.slab_t0[s]},
                         {"t1", led.slab_t1[s]},
                         {"dissipation", led.slab_dissipation[s]}});
    write_json(dir / "energy.json", json{{"kind", "energy_ledger"},
                                         {"entropy", led.entropy_id},
                                         {"initial_entropy", led.initial_entropy},
                                         {"dissipation_total", led.dissipation_total},
                                         {"cone_dissipation", led.cone_dissipation},
                                         {"cone_center", led.cone_center},
                                         {"cone_halfwidth", led.cone_halfwidth},
                                         {"cone_speed", led.cone_speed},
                                         {"bound_constant", led.bound_constant},
                                         {"slabs", slabs}});
}

}  // namespace kinlaw

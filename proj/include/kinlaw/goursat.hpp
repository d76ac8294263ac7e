#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kinlaw/grid.hpp"
#include "kinlaw/system_model.hpp"

namespace kinlaw {

// Coefficient tables of the entropy equation on the W grid. g and h are the
// exponential-integral solutions normalized to 1 on the data edges; the
// logarithmic derivatives g_z/g and h_w/h are stored in closed form (they are
// exactly the quadrature integrands), so the marching scheme never divides
// two tables.
struct GhTables {
    Grid1 wgrid, zgrid;
    Table2 g, h;
    Table2 gz_over_g;  // -lambda1_z / (lambda1 - lambda2)
    Table2 hw_over_h;  //  lambda2_w / (lambda1 - lambda2)
    Table2 lam1, lam2;
    Table2 lam1w, lam2z;
};

GhTables compute_gh(const SystemChart& chart, Grid1 wgrid, Grid1 zgrid);

// Boundary data b0 on [w_lo, w_hi].
using EdgeData = std::function<double(double)>;

// One smooth entropy cut candidate: the Goursat solution for a given cut
// value, together with its flux anchored so flux = lambda1 * theta on the cut
// line. Tables cover the full rectangle; the indicator is applied by the
// accessors in EntropyFamily, never here.
struct GoursatSolution {
    double xi = 0.0;    // snapped cut value
    int cut_index = 0;  // node index of the cut line
    Table2 theta;
    Table2 flux;
};

GoursatSolution solve_goursat(const GhTables& gh, double xi, const EdgeData& b0);
Table2 entropy_flux(const GhTables& gh, const GoursatSolution& sol);

// Mirror-image tables for the family cut along the second Riemann invariant:
// axes swapped, g and h exchanged, lambda2 playing the transport role.
GhTables transposed(const GhTables& gh);

struct StripConstants {
    double rbar = 0.0;
    double c = 0.0;
};

// Tabulated singular entropy family for one chart: per-xi and per-zeta
// Goursat solutions, their kinetic-speed ratio tables, and the strip
// constants. Cut entropies are evaluated on demand with an exact indicator.
struct EntropyFamily {
    std::string chart_id;
    Grid1 wgrid, zgrid;
    Grid1 xigrid, zetagrid;
    GhTables gh;
    std::vector<GoursatSolution> xi_members;
    std::vector<GoursatSolution> zeta_members;  // tables stored in (w, z) orientation
    std::vector<Table2> speed_xi;               // flux/theta, smooth on the rectangle
    std::vector<Table2> speed_zeta;
    double rbar = 0.0;
    double c = 0.0;

    int n_xi() const { return static_cast<int>(xi_members.size()); }
    int n_zeta() const { return static_cast<int>(zeta_members.size()); }
    double xi_at(int k) const { return xi_members[k].xi; }
    double zeta_at(int k) const { return zeta_members[k].xi; }

    // hypograph cuts (support {w >= xi}, resp. {z >= zeta})
    double chi(int k, double w, double z) const;
    double psi(int k, double w, double z) const;
    double upsilon(int k, double w, double z) const;
    double varphi(int k, double w, double z) const;
    // epigraph cuts
    double chi_tilde(int k, double w, double z) const;
    double psi_tilde(int k, double w, double z) const;
    double upsilon_tilde(int k, double w, double z) const;
    double varphi_tilde(int k, double w, double z) const;

    double speed_xi_at(int k, double w, double z) const { return speed_xi[k].eval(w, z); }
    double speed_zeta_at(int k, double w, double z) const { return speed_zeta[k].eval(w, z); }
};

EntropyFamily build_family(const SystemChart& chart, Grid1 wgrid, Grid1 zgrid,
                           Grid1 xigrid, Grid1 zetagrid, bool compute_strip = true);

// Grid scan behind Prop.-localspeed-style constants: the largest strip width
// on the xi grid over which both the cut entropy and the speed monotonicity
// stay above half their one-cell baseline; c is 0.9 x the surviving minimum.
StripConstants strip_constants(const EntropyFamily& family);

// Kinetic transport speed at level xi. Off-strip queries clamp xi into
// [w - rbar, w] and set the flag; strict mode throws StripError instead.
struct SpeedQuery {
    double value = 0.0;
    bool clamped = false;
};
SpeedQuery kinetic_speed(const EntropyFamily& family, double xi, double w, double z,
                         bool strict = false);

// Entropy pair reconstructed from edge-derivative samples on the family
// grids, normalized to vanish at the lower-left corner of W.
struct ReconstructedPair {
    Table2 eta, q;
};
ReconstructedPair reconstruct_entropy(const EntropyFamily& family,
                                      std::span<const double> rho1,
                                      std::span<const double> rho2);

}  // namespace kinlaw

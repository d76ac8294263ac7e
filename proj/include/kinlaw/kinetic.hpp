#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kinlaw/goursat.hpp"
#include "kinlaw/viscous.hpp"

namespace kinlaw {

enum class KineticVariant { chi, chi_tilde, upsilon, upsilon_tilde };

std::string to_string(KineticVariant v);
KineticVariant variant_from_string(const std::string& s);

// Dense (t, x, kinetic-level) tables of a cut entropy and its flux evaluated
// along a solution. The cut is applied with an exact indicator against the
// pointwise Riemann invariant, never smoothed.
struct KineticField {
    KineticVariant variant = KineticVariant::chi;
    int nt = 0, nx = 0, nk = 0;
    std::vector<double> t;
    double dx = 0.0, L = 0.0;
    Grid1 kgrid;
    std::vector<double> value, fluxval;      // layout (n * nx + i) * nk + k
    std::vector<double> wfield, zfield;      // Riemann invariants, layout n * nx + i

    double dt_snap() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
    size_t idx(int n, int i, int k) const {
        return (static_cast<size_t>(n) * nx + i) * nk + k;
    }
    double at(int n, int i, int k) const { return value[idx(n, i, k)]; }
    double flux_at(int n, int i, int k) const { return fluxval[idx(n, i, k)]; }
    double w_at(int n, int i) const { return wfield[static_cast<size_t>(n) * nx + i]; }
    double z_at(int n, int i) const { return zfield[static_cast<size_t>(n) * nx + i]; }
};

KineticField assemble(const GridSolution& sol, const SystemChart& chart,
                      const EntropyFamily& family, KineticVariant variant);

// Cell-indexed signed masses approximating a space-time (x kinetic) measure.
// Cells sit on the hat-center lattice; k_idx is -1 for purely (t,x) measures.
struct MeasureEstimate {
    std::string kind;
    struct Cell {
        int t_idx = 0, x_idx = 0, k_idx = -1;
        double mass = 0.0;
    };
    std::vector<Cell> cells;
    int width = 4;  // hat half-width in cells
    int nt = 0, nx = 0, nk = 0;
    double dt = 0.0, dx = 0.0, dk = 0.0;
    double t0 = 0.0, L = 0.0;

    double total() const;
    double total_abs() const;
    double positive_part() const;  // sum of positive masses
};

// Weak residual of (value, flux) against tensor hats phi(t,x) and node hats
// in the kinetic variable; summation-by-parts quadrature, exact on constants.
MeasureEstimate kinetic_residual(const KineticField& f, int width_cells = 4);

// Same (t,x) pairing tested against one fixed smooth kinetic profile
// rho(k-grid nodes) instead of the node hats.
MeasureEstimate kinetic_residual_against(const KineticField& f, std::span<const double> rho,
                                         int width_cells = 4);

// Canonical representative of the split T = d_k mu1 + mu0 (the split is not
// unique): mu1 is the cumulative primitive of T in the kinetic variable,
// optionally clamped nonnegative, and mu0 absorbs the exact remainder.
struct KineticSplit {
    MeasureEstimate mu1, mu0;
};
KineticSplit split_residual(const MeasureEstimate& T, bool nonneg_mu1);

// Entropy evaluated along states, by closed form or by reconstructed tables.
struct EtaSpec {
    std::string id;
    std::function<double(const State&)> eta;
    std::function<double(const State&)> q;
};
EtaSpec eta_from_pair(const EntropyPair& pair);
EtaSpec eta_from_tables(const SystemChart& chart, const ReconstructedPair& tables,
                        const std::string& id);

// Weak residual of (eta(u), q(u)) against (t,x) tensor hats.
MeasureEstimate dissipation_measure(const GridSolution& sol, const SystemChart& chart,
                                    const EtaSpec& spec, int width_cells = 4);

// Viscous kinetic dissipation: pushforward of Theta[w(u)](u) (sqrt(eps) w_x)^2
// onto (t, x, k = cell of w). Nonnegative by construction.
MeasureEstimate mu1_from_viscous(const GridSolution& sol, const SystemChart& chart,
                                 const EntropyFamily& family);

// Finite bank of C^2-normalized entropies built from smooth edge profiles;
// nu_sup is the cellwise max of |mu_eta| over the bank, a lower estimate of
// the measure-theoretic supremum.
struct EntropyBank {
    std::vector<EtaSpec> members;
};
EntropyBank build_entropy_bank(const SystemChart& chart, const EntropyFamily& family,
                               int n_members = 32);
MeasureEstimate nu_sup(const GridSolution& sol, const SystemChart& chart,
                       const EntropyBank& bank, int width_cells = 4);

// Mass of cells whose centers fall in the window, normalized per unit time by
// the hat-coverage span. Used for shock-rate measurements.
double window_mass_rate(const MeasureEstimate& m, double t0, double t1, double x0, double x1);

// Hat-center lattices shared by the measure estimators and the diagnostics.
std::vector<int> hat_lattice_interior(int n_nodes, int width);
std::vector<int> hat_lattice_periodic(int n_nodes, int width);

}  // namespace kinlaw

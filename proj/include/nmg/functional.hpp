#ifndef NMG_FUNCTIONAL_HPP
#define NMG_FUNCTIONAL_HPP

#include "nmg/domain.hpp"
#include "nmg/kernel.hpp"

#include <memory>
#include <vector>

namespace nmg {

/**
 * A function on the window grid: u on interior nodes, phi on every other
 * node.  The exterior descriptor is kept alongside so the assembly can
 * integrate the far field beyond the window analytically.
 */
struct ScalarField {
    std::shared_ptr<const Grid1D> grid;
    std::shared_ptr<const ExteriorData> exterior;
    std::vector<double> values;

    static ScalarField make(std::shared_ptr<const Grid1D> grid,
                            std::shared_ptr<const ExteriorData> phi, double interior_init = 0.0);

    /// Re-impose u = phi on all non-interior nodes.
    void reset_exterior();
    double sup_interior() const;
};

struct EnergyBreakdown {
    double interior = 0.0;   // A_s(u, Omega)
    double exchange = 0.0;   // windowed part of N_s^M
    double farfield = 0.0;   // analytic part beyond the window
    double total = 0.0;
    bool truncation_warning = false;  // M < sup_Omega |u|
};

struct AssemblyOptions {
    int gauss_pts = 4;        // tensor rule on well-separated cell pairs
    int duffy_pts = 8;        // rule on the desingularized corner pieces
    int jacobi_pts = 20;      // far-field Gauss-Jacobi nodes
    double separation = 4.0;  // well-separated when dist >= separation * max width
    double panel_ratio = 0.25;  // exterior panel width <= ratio * dist to boundary
    int near_cells = 8;       // unmerged exterior cells next to the boundary
    int threads = 0;          // 0: NMG_THREADS env var, else hardware
    int blocks = 64;          // fixed reduction blocks (thread-count independent sums)
};

/**
 * Assembles F_s^M = A_s + N_s^M and its first variation for piecewise-linear
 * fields on a Grid1D (n = 1).
 *
 * The quadrature layout is fixed at construction and independent of the field
 * values, so the assembled gradient is the exact derivative of the assembled
 * energy.  Shared-corner cell pairs are integrated with a rho/sigma
 * substitution that splits off the exactly-integrable radial factor; the
 * far field beyond the window is reduced to Gauss-Jacobi sums in 1/|x-y|.
 */
class FunctionalAssembler {
public:
    FunctionalAssembler(const KernelSpec& spec, std::shared_ptr<const Grid1D> grid,
                        std::shared_ptr<const ExteriorData> phi, double M,
                        AssemblyOptions opt = {});

    EnergyBreakdown energy(const ScalarField& u) const;
    double energy_interior(const ScalarField& u) const;

    /// Gradient of F_s^M with respect to interior node values; entries for
    /// non-interior nodes are zero.  out is resized to the node count.
    void gradient(const ScalarField& u, std::vector<double>& out) const;

    /// <H_s u, v> for a test field v supported on interior nodes.
    double pairing(const ScalarField& u, const ScalarField& v) const;

    /// Discrete W^{s,1}(Omega) seminorm of the interpolant of u.
    double ws1_seminorm(const ScalarField& u) const;

    double M() const { return M_; }
    const KernelSpec& spec() const { return spec_; }
    const Grid1D& grid() const { return *grid_; }
    std::size_t plan_size() const { return plan_.size(); }

private:
    struct QPoint {
        double w;      // quadrature weight including |x-y|^-s and symmetry factors
        double d;      // |x - y|
        double phi_y;  // exterior value at y (cross pairs)
        double fx, fy;
        int ix, iy;    // left nodes of the x / y cells; iy < 0 marks cross pairs
    };
    struct FarEntry {
        double xw;  // x-quadrature weight
        double fx;
        int ix;
        // per side: phi(y(d)) = A + B d beyond the window, w0 = 1 / dist(x, window edge)
        double A[2], B[2], w0s[2], w0[2];
        double GnB[2], gB[2], gpnB[2];  // G(-B), g(B), g'(-B) for the stable small-w path
    };

    void build_plan(const AssemblyOptions& opt);
    void emit_pair(double a0, double a1, double b0, double b1, double factor, bool cross,
                   int depth);
    void emit_tensor(double a0, double a1, double b0, double b1, double factor, bool cross);
    void emit_duffy(double a0, double a1, double b0, double b1, double factor, bool cross);
    void push_qpoint(double x, double y, double w, bool cross);
    double phi_at(double y) const;

    template <typename F>
    void for_blocks(F&& f) const;  // deterministic fixed-block parallel loop

    KernelSpec spec_;
    std::shared_ptr<const Grid1D> grid_;
    std::shared_ptr<const ExteriorData> phi_;
    double M_;
    AssemblyOptions opt_;
    double s_;

    std::vector<QPoint> plan_;
    std::size_t n_interior_qpoints_ = 0;  // plan_ is ordered: interior pairs first
    std::vector<FarEntry> far_;
    std::vector<double> jac_x_, jac_w_;
    double E_M_cross_ = 0.0;  // u-independent truncation terms, windowed part
    double E_far_const_ = 0.0;
};

// Free-function forms of the spec operations (one-shot assemblers).
double energy_interior(const KernelSpec& spec, const ScalarField& u,
                       const AssemblyOptions& opt = {});
EnergyBreakdown energy_truncated(const KernelSpec& spec, const ScalarField& u, double M,
                                 const AssemblyOptions& opt = {});
double weak_curvature_pairing(const KernelSpec& spec, const ScalarField& u, const ScalarField& v,
                              const AssemblyOptions& opt = {});
std::vector<double> energy_gradient(const KernelSpec& spec, const ScalarField& u, double M,
                                    const AssemblyOptions& opt = {});

}  // namespace nmg

#endif

#ifndef NMG_SOLVER_HPP
#define NMG_SOLVER_HPP

#include "nmg/domain.hpp"
#include "nmg/functional.hpp"
#include "nmg/kernel.hpp"

#include <memory>
#include <string>
#include <vector>

namespace nmg {

/**
 * Discrete obstacle problem: minimize F_s^M over piecewise-linear fields with
 * u = phi outside Omega, u >= eps psi on A, and |u| <= apriori_bound.
 *
 * The norm box is part of the admissible class (the B_M W^s class the
 * existence theory minimizes over); its level is the a-priori bound
 * diam(Omega) + max(sup_window |phi|, sup |eps psi|), so every certified
 * solution satisfies that bound by construction.  The truncation level M of
 * the functional sits one unit above the box.
 */
struct ObstacleProblem {
    KernelSpec spec;
    Domain1D domain;
    std::shared_ptr<const Grid1D> grid;
    std::shared_ptr<const ExteriorData> phi;
    ObstacleSpec obstacle;
    double M;  // vertical truncation of F_s^M

    static ObstacleProblem make(const KernelSpec& spec, const Domain1D& dom,
                                const ExteriorData& phi, const ObstacleSpec& obs, double h,
                                double M = -1.0);  // M < 0: jbond policy (bound + 1)

    double apriori_bound() const;          // diam + max(sup_win |phi|, sup |eps psi|)
    double sup_phi_window() const;
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iters = 20000;
    enum class Init { ZeroExtension, AffineExtension } init = Init::ZeroExtension;
    AssemblyOptions assembly;
    double contact_tol_scale = 1e-6;  // delta_contact = scale * (1 + sup|psi|)
};

struct SolveReport {
    ScalarField solution;
    EnergyBreakdown energy;
    double kkt_residual = 0.0;
    std::vector<char> coincidence_mask;  // per obstacle node: u within tol of eps psi
    double coincidence_fraction = 0.0;
    int iterations = 0;
    double sup_norm = 0.0;
    double apriori_bound = 0.0;
    double tau0 = 0.0;  // reference step h^s used by the residual
    bool certified = false;
    double ws1_seminorm = 0.0;
    std::string message;
};

/// The convex projection onto the obstacle constraint: values on A are raised
/// to eps psi, everything else untouched.  Idempotent.
ScalarField project(const ScalarField& u, const ObstacleSpec& obstacle);

SolveReport solve(const ObstacleProblem& problem, const SolveOptions& opt = {});

/// Reuses a prepared assembler (the sweep driver keeps one per s).
SolveReport solve(const ObstacleProblem& problem, const FunctionalAssembler& assembler,
                  const SolveOptions& opt, const ScalarField* warm_start = nullptr);

struct NodeDiagnostic {
    int node = 0;
    double x = 0.0;
    double grad = 0.0;
    enum class Class { Contact, Free, Ambiguous, OffObstacle } cls = Class::OffObstacle;
    bool violated = false;  // outside the complementarity tolerance
};

/// Euler-Lagrange complementarity diagnostics: on the contact set the gradient
/// must be >= -ctol, away from contact |gradient| <= ctol.
std::vector<NodeDiagnostic> complementarity_check(const ObstacleProblem& problem,
                                                  const SolveReport& report,
                                                  const FunctionalAssembler& assembler,
                                                  double ctol);

struct AprioriRecord {
    double sup_norm = 0.0;
    double bound = 0.0;
    bool bound_ok = false;        // sup |u| <= bound + 1e-8
    double min_over_obstacle = 0.0;  // min of u - eps psi on A (>= -1e-12 expected)
    bool feasible = true;
    double margin = 0.0;  // bound - sup|u|
};

AprioriRecord apriori_bounds_check(const ObstacleProblem& problem, const SolveReport& report);

}  // namespace nmg

#endif

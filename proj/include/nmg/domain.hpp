#ifndef NMG_DOMAIN_HPP
#define NMG_DOMAIN_HPP

#include "nmg/kernel.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmg {

/// Omega = (a,b) with a computational window of half-width W on each side.
struct Domain1D {
    double a;
    double b;
    double W;  // window half-width; exterior data is represented on [a-W, b+W]

    Domain1D(double a_, double b_, double W_) : a(a_), b(b_), W(W_) {
        if (!(a < b)) throw std::invalid_argument("Domain1D: need a < b");
        if (!(W > 0.0)) throw std::invalid_argument("Domain1D: need W > 0");
    }
    double diam() const { return b - a; }
    bool contains(double x) const { return x > a && x < b; }
};

/// Signed distance to the boundary of Omega: negative inside, zero on {a,b}.
double signed_distance(const Domain1D& omega, double x);

/// Omega_delta = (a - delta, b + delta); throws if the result is empty.
Domain1D delta_neighborhood(const Domain1D& omega, double delta);

/**
 * Exterior data phi on the complement of Omega.
 *
 * Parametric kinds keep an analytic far field (required by the energy
 * assembly and the alpha computations):
 *   constant:  phi(x) = c
 *   affine:    phi(x) = c + m x
 *   cone:      phi(x) = c + m x - kappa |x|,  kappa != 0
 * Tabulated data lives on the window grid only and is cut off beyond it.
 */
struct ExteriorData {
    enum class Kind { Constant, Affine, Cone, Tabulated };

    Kind kind = Kind::Constant;
    double c = 0.0;
    double m = 0.0;
    double kappa = 0.0;
    std::vector<double> tab;   // node values over the full window (Tabulated)
    double tab_xmin = 0.0, tab_h = 1.0;

    static ExteriorData constant(double c);
    static ExteriorData affine(double c, double m);
    static ExteriorData cone(double c, double m, double kappa);

    double operator()(double x) const;

    /// Asymptotic slopes of phi as x -> +inf / -inf (parametric kinds).
    double slope_right() const;
    double slope_left() const;

    /// alpha of the subgraph of phi at infinity (n = 1):
    /// pi + atan(slope_right) - atan(slope_left).  Exact for parametric kinds.
    double subgraph_alpha() const;

    bool parametric() const { return kind != Kind::Tabulated; }
};

/// Obstacle psi on a region A (sub-interval of Omega, all of it, or empty),
/// scaled by eps in [0,1].
struct ObstacleSpec {
    enum class Region { Empty, Interval, Full };
    enum class PsiKind { Constant, Quadratic };

    Region region = Region::Empty;
    double lo = 0.0, hi = 0.0;  // A = (lo, hi) for Region::Interval
    PsiKind psi_kind = PsiKind::Constant;
    double v0 = 0.0;   // psi(x) = v0 + q x^2
    double q = 0.0;
    double eps = 1.0;

    static ObstacleSpec none();
    static ObstacleSpec constant(double lo, double hi, double value, double eps = 1.0);
    static ObstacleSpec quadratic(double lo, double hi, double v0, double q, double eps = 1.0);
    static ObstacleSpec full_domain(const Domain1D& omega, PsiKind k, double v0, double q,
                                    double eps = 1.0);

    double psi(double x) const { return v0 + q * x * x; }
    double scaled_psi(double x) const { return eps * psi(x); }
    /// sup over A of |eps psi|.
    double sup_scaled(const Domain1D& omega) const;
};

/// Uniform grid over [a-W, b+W] with the endpoints of Omega on nodes.
struct Grid1D {
    double a, b;     // Omega
    double h;        // spacing (exact divisor of b-a)
    double xmin;     // first node
    int i_a, i_b;    // node indices of a and b
    int nnodes;      // total nodes
    std::vector<char> interior_mask;  // nodes strictly inside Omega
    std::vector<char> obstacle_mask;  // nodes inside A

    double node(int i) const { return xmin + h * i; }
    int ncells() const { return nnodes - 1; }
    bool interior(int i) const { return interior_mask[i] != 0; }
    bool in_obstacle(int i) const { return obstacle_mask[i] != 0; }
    std::vector<int> interior_nodes() const;
    std::vector<int> obstacle_nodes() const;
};

Grid1D make_grid(const Domain1D& omega, const ObstacleSpec& obs, double h_request);

/// Result of a Tail computation.  For tabulated data the far field beyond the
/// window is dropped and `truncation_bound` reports the order of the cutoff.
struct TailResult {
    double value = 0.0;
    double truncation_bound = 0.0;
};

struct TailDivergence : std::runtime_error {
    explicit TailDivergence(const std::string& msg) : std::runtime_error(msg) {}
};

/// One (possibly unbounded) interval of the integration region O.
struct IntervalU {
    double lo;  // -inf allowed
    double hi;  // +inf allowed
};

/**
 * Tail(phi, O, x) = int_O |phi(y)| / |x-y|^(n+s) dy,  x in Omega, O in the
 * complement of Omega.  Unbounded components are integrated analytically for
 * constant data and rejected (divergent for s < 1) when |phi| grows linearly.
 */
TailResult tail(const KernelSpec& spec, const ExteriorData& phi, const Domain1D& omega,
                const std::vector<IntervalU>& O, double x);

}  // namespace nmg

#endif

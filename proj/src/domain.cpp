#include "nmg/domain.hpp"

#include "nmg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nmg {

double signed_distance(const Domain1D& omega, double x) {
    if (x <= omega.a) return omega.a - x;
    if (x >= omega.b) return x - omega.b;
    return -std::min(x - omega.a, omega.b - x);
}

Domain1D delta_neighborhood(const Domain1D& omega, double delta) {
    if (delta <= -0.5 * omega.diam())
        throw std::invalid_argument("delta_neighborhood: erosion empties the domain");
    return Domain1D(omega.a - delta, omega.b + delta, omega.W);
}

ExteriorData ExteriorData::constant(double c) {
    ExteriorData e;
    e.kind = Kind::Constant;
    e.c = c;
    return e;
}

ExteriorData ExteriorData::affine(double c, double m) {
    ExteriorData e;
    e.kind = Kind::Affine;
    e.c = c;
    e.m = m;
    return e;
}

ExteriorData ExteriorData::cone(double c, double m, double kappa) {
    if (kappa == 0.0) throw std::invalid_argument("ExteriorData::cone: kappa must be nonzero");
    ExteriorData e;
    e.kind = Kind::Cone;
    e.c = c;
    e.m = m;
    e.kappa = kappa;
    return e;
}

double ExteriorData::operator()(double x) const {
    switch (kind) {
        case Kind::Constant: return c;
        case Kind::Affine: return c + m * x;
        case Kind::Cone: return c + m * x - kappa * std::abs(x);
        case Kind::Tabulated: {
            if (tab.empty()) return 0.0;
            double t = (x - tab_xmin) / tab_h;
            if (t <= 0.0) return tab.front();
            if (t >= static_cast<double>(tab.size() - 1)) return tab.back();
            int i = static_cast<int>(t);
            double f = t - i;
            return tab[i] * (1.0 - f) + tab[i + 1] * f;
        }
    }
    return 0.0;
}

double ExteriorData::slope_right() const {
    switch (kind) {
        case Kind::Constant: return 0.0;
        case Kind::Affine: return m;
        case Kind::Cone: return m - kappa;
        case Kind::Tabulated: return 0.0;
    }
    return 0.0;
}

double ExteriorData::slope_left() const {
    switch (kind) {
        case Kind::Constant: return 0.0;
        case Kind::Affine: return m;
        case Kind::Cone: return m + kappa;
        case Kind::Tabulated: return 0.0;
    }
    return 0.0;
}

double ExteriorData::subgraph_alpha() const {
    if (!parametric())
        throw std::invalid_argument("subgraph_alpha: tabulated data has no analytic far field");
    return M_PI + std::atan(slope_right()) - std::atan(slope_left());
}

ObstacleSpec ObstacleSpec::none() { return ObstacleSpec{}; }

ObstacleSpec ObstacleSpec::constant(double lo, double hi, double value, double eps) {
    ObstacleSpec o;
    o.region = Region::Interval;
    o.lo = lo;
    o.hi = hi;
    o.psi_kind = PsiKind::Constant;
    o.v0 = value;
    o.eps = eps;
    return o;
}

ObstacleSpec ObstacleSpec::quadratic(double lo, double hi, double v0, double q, double eps) {
    ObstacleSpec o;
    o.region = Region::Interval;
    o.lo = lo;
    o.hi = hi;
    o.psi_kind = PsiKind::Quadratic;
    o.v0 = v0;
    o.q = q;
    o.eps = eps;
    return o;
}

ObstacleSpec ObstacleSpec::full_domain(const Domain1D& omega, PsiKind k, double v0, double q,
                                       double eps) {
    ObstacleSpec o;
    o.region = Region::Full;
    o.lo = omega.a;
    o.hi = omega.b;
    o.psi_kind = k;
    o.v0 = v0;
    o.q = k == PsiKind::Quadratic ? q : 0.0;
    o.eps = eps;
    return o;
}

double ObstacleSpec::sup_scaled(const Domain1D& omega) const {
    if (region == Region::Empty) return 0.0;
    double l = std::max(lo, omega.a), r = std::min(hi, omega.b);
    if (l >= r) return 0.0;
    double sup = std::max(std::abs(psi(l)), std::abs(psi(r)));
    if (q != 0.0 && l < 0.0 && r > 0.0) sup = std::max(sup, std::abs(psi(0.0)));
    return eps * sup;
}

Grid1D make_grid(const Domain1D& omega, const ObstacleSpec& obs, double h_request) {
    Grid1D g;
    g.a = omega.a;
    g.b = omega.b;
    int ncell_om = std::max(1, static_cast<int>(std::llround(omega.diam() / h_request)));
    g.h = omega.diam() / ncell_om;
    int wcells = std::max(1, static_cast<int>(std::llround(omega.W / g.h)));
    g.xmin = omega.a - wcells * g.h;
    g.i_a = wcells;
    g.i_b = wcells + ncell_om;
    g.nnodes = ncell_om + 2 * wcells + 1;
    g.interior_mask.assign(g.nnodes, 0);
    g.obstacle_mask.assign(g.nnodes, 0);
    const double tol = 1e-12 * (1.0 + std::abs(omega.b));
    for (int i = 0; i < g.nnodes; ++i) {
        double x = g.node(i);
        if (i > g.i_a && i < g.i_b) g.interior_mask[i] = 1;
        if (obs.region == ObstacleSpec::Region::Full)
            g.obstacle_mask[i] = g.interior_mask[i];
        else if (obs.region == ObstacleSpec::Region::Interval)
            g.obstacle_mask[i] = (x > obs.lo + tol && x < obs.hi - tol && g.interior_mask[i]) ? 1 : 0;
    }
    return g;
}

std::vector<int> Grid1D::interior_nodes() const {
    std::vector<int> v;
    for (int i = 0; i < nnodes; ++i)
        if (interior_mask[i]) v.push_back(i);
    return v;
}

std::vector<int> Grid1D::obstacle_nodes() const {
    std::vector<int> v;
    for (int i = 0; i < nnodes; ++i)
        if (obstacle_mask[i]) v.push_back(i);
    return v;
}

namespace {

// |phi| integrated against |x-y|^-(n+s) over a bounded interval, split at the
// kink (y=0 for cones) and at sign changes of phi so the integrand is smooth
// on every piece.
double tail_bounded(const KernelSpec& spec, const ExteriorData& phi, double lo, double hi,
                    double x) {
    std::vector<double> cuts = {lo, hi};
    if (phi.kind == ExteriorData::Kind::Cone && lo < 0.0 && hi > 0.0) cuts.push_back(0.0);
    // roots of the affine pieces
    auto add_root = [&](double xl, double xr, double sl) {
        // phi restricted to [xl, xr] is c' + sl*y for suitable c'
        double cl = phi(xl) - sl * xl;
        if (sl != 0.0) {
            double r = -cl / sl;
            if (r > xl && r < xr) cuts.push_back(r);
        }
    };
    if (phi.kind != ExteriorData::Kind::Tabulated) {
        if (hi <= 0.0 || lo >= 0.0) {
            add_root(lo, hi, lo >= 0.0 ? phi.slope_right() : phi.slope_left());
        } else {
            add_root(lo, 0.0, phi.slope_left());
            add_root(0.0, hi, phi.slope_right());
        }
    }
    std::sort(cuts.begin(), cuts.end());
    const double ex = spec.n() + spec.s();
    double total = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-15) continue;
        total += integrate_adaptive(
            [&](double y) { return std::abs(phi(y)) * std::pow(std::abs(x - y), -ex); }, a, b,
            1e-13, 1e-12);
    }
    return total;
}

}  // namespace

TailResult tail(const KernelSpec& spec, const ExteriorData& phi, const Domain1D& omega,
                const std::vector<IntervalU>& O, double x) {
    if (!omega.contains(x)) throw std::invalid_argument("tail: x must lie in Omega");
    const double inf = std::numeric_limits<double>::infinity();
    const double wlo = omega.a - omega.W, whi = omega.b + omega.W;
    const double exm1 = spec.n() + spec.s() - 1.0;  // decay power of the analytic primitive
    TailResult res;
    for (const auto& iv : O) {
        if (iv.hi <= iv.lo) continue;
        if (iv.lo < omega.b && iv.hi > omega.a && std::max(iv.lo, omega.a) < std::min(iv.hi, omega.b))
            throw std::invalid_argument("tail: O must be disjoint from Omega");
        double blo = std::max(iv.lo, wlo), bhi = std::min(iv.hi, whi);
        if (blo < bhi) res.value += tail_bounded(spec, phi, blo, bhi, x);
        // pieces beyond the window
        for (int side = 0; side < 2; ++side) {
            double from, to;
            if (side == 0) {
                from = iv.lo;
                to = std::min(iv.hi, wlo);
            } else {
                from = std::max(iv.lo, whi);
                to = iv.hi;
            }
            if (to <= from) continue;
            bool unbounded = (side == 0 && from == -inf) || (side == 1 && to == inf);
            if (phi.kind == ExteriorData::Kind::Tabulated) {
                // hard cutoff; report the order of the neglected mass
                double d = side == 0 ? x - wlo : whi - x;
                double supv = 0.0;
                for (double v : phi.tab) supv = std::max(supv, std::abs(v));
                res.truncation_bound += supv * std::pow(d, -exm1) / exm1;
                continue;
            }
            double slope = side == 0 ? phi.slope_left() : phi.slope_right();
            if (unbounded) {
                if (slope != 0.0)
                    throw TailDivergence("tail: |phi| grows linearly at infinity; integral diverges");
                // |phi| is constant on this ray (phi exactly affine with zero slope
                // beyond the window), so the power-law primitive is exact
                double edge = side == 0 ? to : from;
                double cval = std::abs(phi(side == 0 ? edge - 1.0 : edge + 1.0));
                double d = std::abs(edge - x);
                res.value += cval * std::pow(d, -exm1) / exm1;
            } else {
                res.value += tail_bounded(spec, phi, from, to, x);
            }
        }
    }
    return res;
}

}  // namespace nmg

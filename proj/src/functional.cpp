#include "nmg/functional.hpp"

#include "nmg/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace nmg {

ScalarField ScalarField::make(std::shared_ptr<const Grid1D> grid,
                              std::shared_ptr<const ExteriorData> phi, double interior_init) {
    ScalarField f;
    f.grid = std::move(grid);
    f.exterior = std::move(phi);
    f.values.assign(f.grid->nnodes, interior_init);
    f.reset_exterior();
    return f;
}

void ScalarField::reset_exterior() {
    for (int i = 0; i < grid->nnodes; ++i)
        if (!grid->interior(i)) values[i] = (*exterior)(grid->node(i));
}

double ScalarField::sup_interior() const {
    double s = 0.0;
    for (int i = 0; i < grid->nnodes; ++i)
        if (grid->interior(i)) s = std::max(s, std::abs(values[i]));
    return s;
}

FunctionalAssembler::FunctionalAssembler(const KernelSpec& spec,
                                         std::shared_ptr<const Grid1D> grid,
                                         std::shared_ptr<const ExteriorData> phi, double M,
                                         AssemblyOptions opt)
    : spec_(spec), grid_(std::move(grid)), phi_(std::move(phi)), M_(M), opt_(opt), s_(spec.s()) {
    if (M_ < 0.0) throw std::invalid_argument("FunctionalAssembler: M must be >= 0");
    if (spec_.n() != 1)
        throw std::invalid_argument("FunctionalAssembler: only n = 1 assembly is supported");
    auto jr = gauss_jacobi01(opt_.jacobi_pts, s_);
    jac_x_ = jr.x;
    jac_w_ = jr.w;
    build_plan(opt_);
}

double FunctionalAssembler::phi_at(double y) const { return (*phi_)(y); }

void FunctionalAssembler::push_qpoint(double x, double y, double w, bool cross) {
    QPoint q;
    q.d = std::abs(y - x);
    q.w = cross ? 2.0 * w : w;
    const Grid1D& g = *grid_;
    if (cross) {
        // the u side must be the interior point; the integrand only sees
        // (u point, phi point, |x-y|), so relabeling is free
        int cx0 = std::min(g.ncells() - 1, std::max(0, static_cast<int>((x - g.xmin) / g.h)));
        if (cx0 < g.i_a || cx0 >= g.i_b) std::swap(x, y);
    }
    int cx = std::min(g.ncells() - 1, std::max(0, static_cast<int>((x - g.xmin) / g.h)));
    q.ix = cx;
    q.fx = (x - g.node(cx)) / g.h;
    if (cross) {
        q.iy = -1;
        q.fy = 0.0;
        q.phi_y = phi_at(y);
        // truncation terms are independent of u; fold them into a constant now
        double dinv = 1.0 / q.d;
        E_M_cross_ += w * (2.0 * spec_.Lambda() * M_ * dinv -
                           spec_.GG((M_ + q.phi_y) * dinv) - spec_.GG((M_ - q.phi_y) * dinv));
    } else {
        int cy = std::min(g.ncells() - 1, std::max(0, static_cast<int>((y - g.xmin) / g.h)));
        q.iy = cy;
        q.fy = (y - g.node(cy)) / g.h;
        q.phi_y = 0.0;
    }
    plan_.push_back(q);
}

void FunctionalAssembler::emit_tensor(double a0, double a1, double b0, double b1, double factor,
                                      bool cross) {
    const QuadRule& gr = gauss_legendre(opt_.gauss_pts);
    const double ja = 0.5 * (a1 - a0), jb = 0.5 * (b1 - b0);
    const double ca = 0.5 * (a0 + a1), cb = 0.5 * (b0 + b1);
    for (size_t i = 0; i < gr.x.size(); ++i) {
        double x = ca + ja * gr.x[i];
        for (size_t j = 0; j < gr.x.size(); ++j) {
            double y = cb + jb * gr.x[j];
            double w = factor * ja * gr.w[i] * jb * gr.w[j] * std::pow(std::abs(y - x), -s_);
            push_qpoint(x, y, w, cross);
        }
    }
}

void FunctionalAssembler::emit_duffy(double a0, double a1, double b0, double b1, double factor,
                                     bool cross) {
    // shared corner at a1 == b0; equal widths by construction
    const double h = a1 - a0;
    if (std::abs((b1 - b0) - h) > 1e-9 * h)
        throw std::logic_error("emit_duffy: unequal touching widths");
    const double x0 = a1;
    const QuadRule& gr = gauss_legendre(opt_.duffy_pts);
    // simplex rho <= h: radial factor integrates to h^(2-s)/(2-s); the
    // difference quotient is constant along each rho-ray
    const double radw = std::pow(h, 2.0 - s_) / (2.0 - s_);
    const double rho_hat = 0.5 * h;
    for (size_t j = 0; j < gr.x.size(); ++j) {
        double sig = 0.5 + 0.5 * gr.x[j];
        double w = factor * radw * 0.5 * gr.w[j];
        push_qpoint(x0 - rho_hat * (1.0 - sig), x0 + rho_hat * sig, w, cross);
    }
    // remaining corner piece: rho in (h, 2h), sigma in (1 - h/rho, h/rho)
    for (size_t i = 0; i < gr.x.size(); ++i) {
        double rho = h + 0.5 * h * (1.0 + gr.x[i]);
        double slo = 1.0 - h / rho, shi = h / rho;
        double js = 0.5 * (shi - slo);
        if (js <= 0.0) continue;
        for (size_t j = 0; j < gr.x.size(); ++j) {
            double sig = 0.5 * (slo + shi) + js * gr.x[j];
            double w = factor * (0.5 * h * gr.w[i]) * (js * gr.w[j]) * std::pow(rho, 1.0 - s_);
            push_qpoint(x0 - rho * (1.0 - sig), x0 + rho * sig, w, cross);
        }
    }
}

void FunctionalAssembler::emit_pair(double a0, double a1, double b0, double b1, double factor,
                                    bool cross, int depth) {
    const double wa = a1 - a0, wb = b1 - b0;
    const double dist = std::max(0.0, b0 - a1);  // pairs are ordered a before b
    if (dist <= 1e-14 * grid_->h) {
        emit_duffy(a0, a1, b0, b1, factor, cross);
        return;
    }
    if (dist >= opt_.separation * std::max(wa, wb) || depth >= 12) {
        emit_tensor(a0, a1, b0, b1, factor, cross);
        return;
    }
    if (wa >= wb) {
        double m = 0.5 * (a0 + a1);
        emit_pair(a0, m, b0, b1, factor, cross, depth + 1);
        emit_pair(m, a1, b0, b1, factor, cross, depth + 1);
    } else {
        double m = 0.5 * (b0 + b1);
        emit_pair(a0, a1, b0, m, factor, cross, depth + 1);
        emit_pair(a0, a1, m, b1, factor, cross, depth + 1);
    }
}

void FunctionalAssembler::build_plan(const AssemblyOptions& opt) {
    const Grid1D& g = *grid_;
    const double h = g.h;
    const double I0 = 2.0 * std::pow(h, 2.0 - s_) / ((1.0 - s_) * (2.0 - s_));

    // ---- Omega x Omega -------------------------------------------------
    for (int ci = g.i_a; ci < g.i_b; ++ci) {
        // same cell: the difference quotient is the cell slope everywhere, so
        // the cell-square integral is exact with one sample
        double xa = g.node(ci);
        push_qpoint(xa + 0.25 * h, xa + 0.75 * h, I0, false);
        for (int cj = ci + 1; cj < g.i_b; ++cj)
            emit_pair(xa, xa + h, g.node(cj), g.node(cj) + h, 2.0, false, 0);
    }
    n_interior_qpoints_ = plan_.size();

    // ---- Omega x (window exterior), panel-merged -----------------------
    struct Panel {
        double y0, y1;
    };
    std::vector<Panel> panels;
    const bool merge = phi_->parametric();
    auto build_side = [&](bool left) {
        int first = left ? g.i_a - 1 : g.i_b;
        int last = left ? -1 : g.ncells();
        double bdry = left ? g.node(g.i_a) : g.node(g.i_b);
        int k = first;
        int taken = 0;
        while (k != last) {
            double dist = std::abs(g.node(k) + (left ? h : 0.0) - bdry);
            int span = 1;
            if (merge && taken >= opt.near_cells) {
                span = std::max(1, static_cast<int>(opt.panel_ratio * dist / h));
                int remain = left ? k + 1 : last - k;
                span = std::min(span, remain);
            }
            double y0, y1;
            if (left) {
                y0 = g.node(k - span + 1);
                y1 = g.node(k) + h;
                k -= span;
            } else {
                y0 = g.node(k);
                y1 = g.node(k + span);
                k += span;
            }
            panels.push_back({y0, y1});
            taken += span;
        }
    };
    build_side(true);
    build_side(false);
    for (int ci = g.i_a; ci < g.i_b; ++ci) {
        double xa = g.node(ci), xb = xa + h;
        for (const auto& p : panels) {
            if (p.y1 <= xa)
                emit_pair(p.y0, p.y1, xa, xb, 1.0, true, 0);  // y-interval first: swap roles
            else
                emit_pair(xa, xb, p.y0, p.y1, 1.0, true, 0);
        }
    }

    // ---- far field beyond the window -----------------------------------
    if (phi_->parametric()) {
        if (phi_->kind == ExteriorData::Kind::Cone &&
            !(g.xmin < 0.0 && g.node(g.ncells()) > 0.0))
            throw std::invalid_argument("assembly: cone apex must lie inside the window");
        const QuadRule& gr = gauss_legendre(opt.gauss_pts);
        const double wlo = g.xmin, whi = g.node(g.ncells());
        const double Lam = spec_.Lambda();
        for (int ci = g.i_a; ci < g.i_b; ++ci) {
            double xa = g.node(ci);
            for (size_t i = 0; i < gr.x.size(); ++i) {
                FarEntry e;
                double x = xa + 0.5 * h * (1.0 + gr.x[i]);
                e.xw = 0.5 * h * gr.w[i];
                e.ix = ci;
                e.fx = (x - xa) / h;
                for (int side = 0; side < 2; ++side) {
                    // phi(y(d)) with y = x -+ d is affine beyond the window:
                    // A + B d, with A the side's affine extension evaluated at x
                    double slope = side == 0 ? phi_->slope_left() : phi_->slope_right();
                    e.A[side] = phi_->c + slope * x;
                    e.B[side] = side == 0 ? -slope : slope;
                    double D0 = side == 0 ? x - wlo : whi - x;
                    e.w0[side] = 1.0 / D0;
                    e.w0s[side] = std::pow(D0, -s_);
                    e.GnB[side] = spec_.G(-e.B[side]);
                    e.gB[side] = spec_.g(e.B[side]);
                    double B = e.B[side];
                    e.gpnB[side] = 2.0 * spec_.profile().p() * B *
                                   std::pow(1.0 + B * B, -spec_.profile().p() - 1.0);
                    // u-independent part of the far integrand
                    double cpart = 0.0;
                    for (size_t jn = 0; jn < jac_x_.size(); ++jn) {
                        double w = e.w0[side] * jac_x_[jn];
                        double scale = std::max(std::abs(M_ + e.A[side]), std::abs(M_ - e.A[side]));
                        double val;
                        if (scale * w < 1e-5 * (1.0 + std::abs(B))) {
                            double c1 = 2.0 * Lam * M_ - 2.0 * spec_.G(B) * e.A[side];
                            double c2 = -0.5 * e.gB[side] *
                                        ((M_ + e.A[side]) * (M_ + e.A[side]) +
                                         (M_ - e.A[side]) * (M_ - e.A[side]));
                            val = c1 + c2 * w;
                        } else {
                            val = (2.0 * spec_.GG(B) + 2.0 * Lam * M_ * w -
                                   spec_.GG((M_ + e.A[side]) * w + B) -
                                   spec_.GG((M_ - e.A[side]) * w - B)) /
                                  w;
                        }
                        cpart += jac_w_[jn] * val;
                    }
                    E_far_const_ += e.xw * e.w0s[side] * cpart;
                }
                far_.push_back(e);
            }
        }
    }
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NMG_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

template <typename F>
void FunctionalAssembler::for_blocks(F&& f) const {
    const int nb = opt_.blocks;
    int nt = std::min(resolve_threads(opt_.threads), nb);
    if (nt <= 1) {
        for (int b = 0; b < nb; ++b) f(b);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            int b;
            while ((b = next.fetch_add(1)) < nb) f(b);
        });
    for (auto& th : pool) th.join();
}

EnergyBreakdown FunctionalAssembler::energy(const ScalarField& u) const {
    const double* uv = u.values.data();
    const std::size_t n = plan_.size();
    const int nb = opt_.blocks;
    std::vector<double> part_int(nb, 0.0), part_cross(nb, 0.0);
    for_blocks([&](int b) {
        std::size_t lo = n * b / nb, hi = n * (b + 1) / nb;
        double si = 0.0, sc = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
            const QPoint& q = plan_[k];
            double ux = (1.0 - q.fx) * uv[q.ix] + q.fx * uv[q.ix + 1];
            double uy = q.iy >= 0 ? (1.0 - q.fy) * uv[q.iy] + q.fy * uv[q.iy + 1] : q.phi_y;
            double val = q.w * spec_.GG((ux - uy) / q.d);
            if (q.iy >= 0)
                si += val;
            else
                sc += val;
        }
        part_int[b] = si;
        part_cross[b] = sc;
    });
    EnergyBreakdown e;
    for (int b = 0; b < nb; ++b) {
        e.interior += part_int[b];
        e.exchange += part_cross[b];
    }
    e.exchange += E_M_cross_;

    // far field: u-dependent part
    double far_u = 0.0;
    for (const auto& fe : far_) {
        double ux = (1.0 - fe.fx) * uv[fe.ix] + fe.fx * uv[fe.ix + 1];
        for (int side = 0; side < 2; ++side) {
            double uA = ux - fe.A[side];
            double acc = 0.0;
            for (std::size_t jn = 0; jn < jac_x_.size(); ++jn) {
                double w = fe.w0[side] * jac_x_[jn];
                double xi = uA * w;
                double val;
                if (std::abs(xi) < 1e-5 * (1.0 + std::abs(fe.B[side]))) {
                    val = 2.0 * uA *
                          (fe.GnB[side] + 0.5 * fe.gB[side] * xi + fe.gpnB[side] * xi * xi / 6.0);
                } else {
                    val = 2.0 * (spec_.GG(xi - fe.B[side]) - spec_.GG(fe.B[side])) / w;
                }
                acc += jac_w_[jn] * val;
            }
            far_u += fe.xw * fe.w0s[side] * acc;
        }
    }
    e.farfield = far_u + E_far_const_;
    e.total = e.interior + e.exchange + e.farfield;
    e.truncation_warning = u.sup_interior() > M_;
    return e;
}

double FunctionalAssembler::energy_interior(const ScalarField& u) const {
    const double* uv = u.values.data();
    double s = 0.0;
    for (std::size_t k = 0; k < n_interior_qpoints_; ++k) {
        const QPoint& q = plan_[k];
        double ux = (1.0 - q.fx) * uv[q.ix] + q.fx * uv[q.ix + 1];
        double uy = (1.0 - q.fy) * uv[q.iy] + q.fy * uv[q.iy + 1];
        s += q.w * spec_.GG((ux - uy) / q.d);
    }
    return s;
}

double FunctionalAssembler::ws1_seminorm(const ScalarField& u) const {
    const double* uv = u.values.data();
    double s = 0.0;
    for (std::size_t k = 0; k < n_interior_qpoints_; ++k) {
        const QPoint& q = plan_[k];
        double ux = (1.0 - q.fx) * uv[q.ix] + q.fx * uv[q.ix + 1];
        double uy = (1.0 - q.fy) * uv[q.iy] + q.fy * uv[q.iy + 1];
        s += q.w * std::abs((ux - uy) / q.d);
    }
    return s;
}

void FunctionalAssembler::gradient(const ScalarField& u, std::vector<double>& out) const {
    const Grid1D& g = *grid_;
    const double* uv = u.values.data();
    const std::size_t n = plan_.size();
    const int nb = opt_.blocks;
    const int nn = g.nnodes;
    std::vector<double> scratch(static_cast<std::size_t>(nb) * nn, 0.0);
    for_blocks([&](int b) {
        std::size_t lo = n * b / nb, hi = n * (b + 1) / nb;
        double* gb = scratch.data() + static_cast<std::size_t>(b) * nn;
        for (std::size_t k = lo; k < hi; ++k) {
            const QPoint& q = plan_[k];
            double ux = (1.0 - q.fx) * uv[q.ix] + q.fx * uv[q.ix + 1];
            double uy = q.iy >= 0 ? (1.0 - q.fy) * uv[q.iy] + q.fy * uv[q.iy + 1] : q.phi_y;
            double c = q.w * spec_.G((ux - uy) / q.d) / q.d;
            gb[q.ix] += c * (1.0 - q.fx);
            gb[q.ix + 1] += c * q.fx;
            if (q.iy >= 0) {
                gb[q.iy] -= c * (1.0 - q.fy);
                gb[q.iy + 1] -= c * q.fy;
            }
        }
    });
    out.assign(nn, 0.0);
    for (int b = 0; b < nb; ++b) {
        const double* gb = scratch.data() + static_cast<std::size_t>(b) * nn;
        for (int i = 0; i < nn; ++i) out[i] += gb[i];
    }
    // far field derivative
    for (const auto& fe : far_) {
        double ux = (1.0 - fe.fx) * uv[fe.ix] + fe.fx * uv[fe.ix + 1];
        double dsum = 0.0;
        for (int side = 0; side < 2; ++side) {
            double uA = ux - fe.A[side];
            double acc = 0.0;
            for (std::size_t jn = 0; jn < jac_x_.size(); ++jn) {
                double w = fe.w0[side] * jac_x_[jn];
                acc += jac_w_[jn] * 2.0 * spec_.G(uA * w - fe.B[side]);
            }
            dsum += fe.w0s[side] * acc;
        }
        out[fe.ix] += fe.xw * dsum * (1.0 - fe.fx);
        out[fe.ix + 1] += fe.xw * dsum * fe.fx;
    }
    for (int i = 0; i < nn; ++i)
        if (!g.interior(i)) out[i] = 0.0;
}

double FunctionalAssembler::pairing(const ScalarField& u, const ScalarField& v) const {
    const Grid1D& g = *grid_;
    for (int i = 0; i < g.nnodes; ++i)
        if (!g.interior(i) && v.values[i] != 0.0)
            throw std::invalid_argument("pairing: test field must vanish on exterior nodes");
    std::vector<double> gr;
    gradient(u, gr);
    double s = 0.0;
    for (int i = 0; i < g.nnodes; ++i) s += gr[i] * v.values[i];
    return s;
}

double energy_interior(const KernelSpec& spec, const ScalarField& u, const AssemblyOptions& opt) {
    FunctionalAssembler a(spec, u.grid, u.exterior, 0.0, opt);
    return a.energy_interior(u);
}

EnergyBreakdown energy_truncated(const KernelSpec& spec, const ScalarField& u, double M,
                                 const AssemblyOptions& opt) {
    FunctionalAssembler a(spec, u.grid, u.exterior, M, opt);
    return a.energy(u);
}

double weak_curvature_pairing(const KernelSpec& spec, const ScalarField& u, const ScalarField& v,
                              const AssemblyOptions& opt) {
    FunctionalAssembler a(spec, u.grid, u.exterior, 0.0, opt);
    return a.pairing(u, v);
}

std::vector<double> energy_gradient(const KernelSpec& spec, const ScalarField& u, double M,
                                    const AssemblyOptions& opt) {
    FunctionalAssembler a(spec, u.grid, u.exterior, M, opt);
    std::vector<double> g;
    a.gradient(u, g);
    return g;
}

}  // namespace nmg

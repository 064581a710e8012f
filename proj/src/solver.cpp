#include "nmg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nmg {

double ObstacleProblem::sup_phi_window() const {
    const Grid1D& g = *grid;
    double sup = 0.0;
    for (int i = 0; i < g.nnodes; ++i)
        if (!g.interior(i)) sup = std::max(sup, std::abs((*phi)(g.node(i))));
    return sup;
}

double ObstacleProblem::apriori_bound() const {
    return domain.diam() + std::max(sup_phi_window(), obstacle.sup_scaled(domain));
}

ObstacleProblem ObstacleProblem::make(const KernelSpec& spec, const Domain1D& dom,
                                      const ExteriorData& phi, const ObstacleSpec& obs, double h,
                                      double M) {
    ObstacleProblem p{spec, dom, nullptr, nullptr, obs, M};
    p.grid = std::make_shared<Grid1D>(make_grid(dom, obs, h));
    p.phi = std::make_shared<ExteriorData>(phi);
    if (M < 0.0) p.M = p.apriori_bound() + 1.0;
    if (p.M < obs.sup_scaled(dom))
        throw std::invalid_argument("ObstacleProblem: M must dominate the obstacle sup norm");
    return p;
}

ScalarField project(const ScalarField& u, const ObstacleSpec& obstacle) {
    ScalarField v = u;
    const Grid1D& g = *u.grid;
    for (int i = 0; i < g.nnodes; ++i)
        if (g.in_obstacle(i))
            v.values[i] = std::max(v.values[i], obstacle.eps * obstacle.psi(g.node(i)));
    return v;
}

namespace {

struct Bounds {
    std::vector<double> lo, hi;
};

Bounds make_bounds(const ObstacleProblem& p) {
    const Grid1D& g = *p.grid;
    const double B = p.apriori_bound();
    Bounds b;
    b.lo.assign(g.nnodes, -B);
    b.hi.assign(g.nnodes, B);
    for (int i = 0; i < g.nnodes; ++i)
        if (g.in_obstacle(i))
            b.lo[i] = std::max(b.lo[i], p.obstacle.eps * p.obstacle.psi(g.node(i)));
    return b;
}

void project_box(std::vector<double>& v, const Bounds& b, const Grid1D& g) {
    for (int i = 0; i < g.nnodes; ++i)
        if (g.interior(i)) v[i] = std::min(b.hi[i], std::max(b.lo[i], v[i]));
}

}  // namespace

SolveReport solve(const ObstacleProblem& problem, const SolveOptions& opt) {
    FunctionalAssembler a(problem.spec, problem.grid, problem.phi, problem.M, opt.assembly);
    return solve(problem, a, opt, nullptr);
}

SolveReport solve(const ObstacleProblem& problem, const FunctionalAssembler& assembler,
                  const SolveOptions& opt, const ScalarField* warm_start) {
    const Grid1D& g = *problem.grid;
    const Bounds bounds = make_bounds(problem);
    const double tau0 = std::pow(g.h, problem.spec.s());

    ScalarField u = ScalarField::make(problem.grid, problem.phi, 0.0);
    if (warm_start) {
        u.values = warm_start->values;
    } else if (opt.init == SolveOptions::Init::AffineExtension) {
        double ua = (*problem.phi)(problem.domain.a), ub = (*problem.phi)(problem.domain.b);
        for (int i = 0; i < g.nnodes; ++i)
            if (g.interior(i)) {
                double t = (g.node(i) - problem.domain.a) / problem.domain.diam();
                u.values[i] = ua + t * (ub - ua);
            }
    }
    u.reset_exterior();
    project_box(u.values, bounds, g);

    EnergyBreakdown eb = assembler.energy(u);
    double E = eb.total;
    std::vector<double> grad, trial(u.values.size());
    assembler.gradient(u, grad);

    std::vector<double> u_prev, g_prev;
    double tau = tau0;
    int it = 0;
    double residual = std::numeric_limits<double>::infinity();
    const double tau_min = 1e-14, tau_max = 1e14;

    for (it = 0; it < opt.max_iters; ++it) {
        // residual of the projected-gradient fixed point at the reference step
        residual = 0.0;
        for (int i = 0; i < g.nnodes; ++i)
            if (g.interior(i)) {
                double pi = std::min(bounds.hi[i], std::max(bounds.lo[i], u.values[i] - tau0 * grad[i]));
                residual = std::max(residual, std::abs(u.values[i] - pi) / tau0);
            }
        if (residual <= opt.tol) break;

        // Barzilai-Borwein step with Armijo backtracking (monotone descent)
        if (!u_prev.empty()) {
            double sy = 0.0, ss = 0.0;
            for (int i = 0; i < g.nnodes; ++i)
                if (g.interior(i)) {
                    double ds = u.values[i] - u_prev[i];
                    double dy = grad[i] - g_prev[i];
                    sy += ds * dy;
                    ss += ds * ds;
                }
            if (sy > 0.0 && ss > 0.0) tau = std::min(tau_max, std::max(tau_min, ss / sy));
        }
        u_prev = u.values;
        g_prev = grad;

        double E_new = E;
        ScalarField cand = u;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            cand.values = u.values;
            for (int i = 0; i < g.nnodes; ++i)
                if (g.interior(i)) cand.values[i] -= tau * grad[i];
            project_box(cand.values, bounds, g);
            std::vector<double> step(g.nnodes, 0.0);
            double gdotstep = 0.0, stepnorm = 0.0;
            for (int i = 0; i < g.nnodes; ++i)
                if (g.interior(i)) {
                    step[i] = cand.values[i] - u.values[i];
                    gdotstep += grad[i] * step[i];
                    stepnorm = std::max(stepnorm, std::abs(step[i]));
                }
            if (stepnorm == 0.0) { accepted = false; break; }
            E_new = assembler.energy(cand).total;
            if (E_new <= E + 1e-4 * gdotstep) {
                accepted = true;
                break;
            }
            tau *= 0.5;
            if (tau < tau_min) break;
        }
        if (!accepted) {
            // no admissible descent step: the projected point is stationary
            break;
        }
        u.values = cand.values;
        E = E_new;
        assembler.gradient(u, grad);
    }

    SolveReport rep;
    rep.solution = u;
    rep.energy = assembler.energy(u);
    rep.kkt_residual = residual;
    rep.iterations = it;
    rep.tau0 = tau0;
    rep.apriori_bound = problem.apriori_bound();
    rep.sup_norm = u.sup_interior();
    rep.certified = residual <= opt.tol;
    rep.ws1_seminorm = assembler.ws1_seminorm(u);
    rep.message = rep.certified ? "converged" : "max iterations exceeded";

    const double dc = opt.contact_tol_scale * (1.0 + problem.obstacle.sup_scaled(problem.domain));
    auto obs_nodes = g.obstacle_nodes();
    rep.coincidence_mask.assign(obs_nodes.size(), 0);
    int count = 0;
    for (size_t k = 0; k < obs_nodes.size(); ++k) {
        int i = obs_nodes[k];
        double psi_i = problem.obstacle.eps * problem.obstacle.psi(g.node(i));
        if (std::abs(u.values[i] - psi_i) <= dc) {
            rep.coincidence_mask[k] = 1;
            ++count;
        }
    }
    rep.coincidence_fraction = obs_nodes.empty() ? 0.0 : double(count) / obs_nodes.size();
    return rep;
}

std::vector<NodeDiagnostic> complementarity_check(const ObstacleProblem& problem,
                                                  const SolveReport& report,
                                                  const FunctionalAssembler& assembler,
                                                  double ctol) {
    const Grid1D& g = *problem.grid;
    std::vector<double> grad;
    assembler.gradient(report.solution, grad);
    const double dc = 1e-6 * (1.0 + problem.obstacle.sup_scaled(problem.domain));
    std::vector<NodeDiagnostic> out;
    for (int i = 0; i < g.nnodes; ++i) {
        if (!g.interior(i)) continue;
        NodeDiagnostic d;
        d.node = i;
        d.x = g.node(i);
        d.grad = grad[i];
        if (g.in_obstacle(i)) {
            double gap = report.solution.values[i] -
                         problem.obstacle.eps * problem.obstacle.psi(g.node(i));
            if (gap <= dc)
                d.cls = NodeDiagnostic::Class::Contact;
            else if (gap <= 10.0 * dc)
                d.cls = NodeDiagnostic::Class::Ambiguous;
            else
                d.cls = NodeDiagnostic::Class::Free;
        } else {
            d.cls = NodeDiagnostic::Class::OffObstacle;
        }
        // box-pinned nodes carry the corresponding one-sided condition
        double B = report.apriori_bound;
        bool at_lower = report.solution.values[i] <= -B + 1e-12;
        bool at_upper = report.solution.values[i] >= B - 1e-12;
        switch (d.cls) {
            case NodeDiagnostic::Class::Contact:
                d.violated = d.grad < -ctol;
                break;
            default:
                if (at_lower)
                    d.violated = d.grad < -ctol;
                else if (at_upper)
                    d.violated = d.grad > ctol;
                else
                    d.violated = std::abs(d.grad) > ctol;
        }
        out.push_back(d);
    }
    return out;
}

AprioriRecord apriori_bounds_check(const ObstacleProblem& problem, const SolveReport& report) {
    AprioriRecord r;
    r.sup_norm = report.sup_norm;
    r.bound = problem.apriori_bound();
    r.bound_ok = r.sup_norm <= r.bound + 1e-8;
    r.margin = r.bound - r.sup_norm;
    const Grid1D& g = *problem.grid;
    r.min_over_obstacle = std::numeric_limits<double>::infinity();
    for (int i : g.obstacle_nodes()) {
        double gap = report.solution.values[i] -
                     problem.obstacle.eps * problem.obstacle.psi(g.node(i));
        r.min_over_obstacle = std::min(r.min_over_obstacle, gap);
    }
    if (g.obstacle_nodes().empty()) r.min_over_obstacle = 0.0;
    r.feasible = r.min_over_obstacle >= -1e-12;
    return r;
}

}  // namespace nmg

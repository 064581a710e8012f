#include "nmg/kernel.hpp"

#include "nmg/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace nmg {

double sphere_measure(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

namespace detail {

struct KernelProfile::Tables {
    std::vector<double> edges;       // panel edges on [0, T1]
    std::vector<ChebSeries> g_pan;   // g per panel
    std::vector<ChebSeries> G_pan;   // G per panel (cumulative)
    std::vector<ChebSeries> GG_pan;  // GG per panel (cumulative)
    ChebSeries tail_h;               // h(w) with tail(t) = t^(1-2p) h(1/t), w in [0, 1/T1]
};

KernelProfile::KernelProfile(int n, double s) {
    if (n < 1) throw std::invalid_argument("KernelProfile: n must be >= 1");
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("KernelProfile: s must be in (0,1]");
    p_ = 0.5 * (n + 1 + s);
    T1_ = 8.0;

    auto tb = std::make_shared<Tables>();
    tb->edges = {0.0, 0.5, 1.0, 2.0, 4.0, T1_};
    auto g_fun = [this](double t) { return std::pow(1.0 + t * t, -p_); };

    const int deg = 32;
    double Gacc = 0.0, GGacc = 0.0;
    for (size_t i = 0; i + 1 < tb->edges.size(); ++i) {
        double a = tb->edges[i], b = tb->edges[i + 1];
        ChebSeries gc = ChebSeries::fit(g_fun, a, b, deg);
        tb->g_pan.push_back(gc);
        // cumulative antiderivatives, panel value continuous across edges
        ChebSeries Grel = gc.antiderivative();  // zero at panel start
        ChebSeries Gpan = ChebSeries::fit(
            [&](double x) { return Gacc + Grel(x); }, a, b, deg + 1);
        tb->G_pan.push_back(Gpan);
        ChebSeries GGrel = Gpan.antiderivative();
        ChebSeries GGpan = ChebSeries::fit(
            [&](double x) { return GGacc + GGrel(x); }, a, b, deg + 2);
        tb->GG_pan.push_back(GGpan);
        Gacc += Grel(b);
        GGacc += GGrel(b);
    }

    // tail(t) = int_t^inf g = t^(1-2p) * h(1/t),
    // h(w) = int_0^1 xi^(2p-2) (1 + w^2 xi^2)^(-p) dxi,  analytic in w on [0, 1/T1].
    tb->tail_h = ChebSeries::fit(
        [this](double w) {
            return integrate_adaptive(
                [this, w](double xi) {
                    return std::pow(xi, 2.0 * p_ - 2.0) * std::pow(1.0 + w * w * xi * xi, -p_);
                },
                0.0, 1.0, 1e-15, 1e-14);
        },
        0.0, 1.0 / T1_, 24);

    tb_ = tb;
    GG_T1_ = GGacc;
    Lambda_ = Gacc + tail(T1_);
    tail2_T1_ = tail2(T1_);
    lambda_ = Lambda_ * T1_ - GG_T1_ + tail2_T1_;
    // pin the fit residue so G(0) and GG(0) vanish exactly
    G0_ = tb_->G_pan[0](0.0);
    GG0_ = tb_->GG_pan[0](0.0);
}

double KernelProfile::tail(double t) const {
    return std::pow(t, 1.0 - 2.0 * p_) * tb_->tail_h(1.0 / t);
}

double KernelProfile::tail2(double t) const {
    // int_t^inf tail(tau) dtau = (1+t^2)^(1-p) / (2(p-1)) - t tail(t)
    return std::pow(1.0 + t * t, 1.0 - p_) / (2.0 * (p_ - 1.0)) - t * tail(t);
}

double KernelProfile::g(double t) const { return std::pow(1.0 + t * t, -p_); }

double KernelProfile::G(double t) const {
    double a = std::abs(t);
    double v;
    if (a <= T1_) {
        const auto& ed = tb_->edges;
        size_t i = 0;
        while (i + 2 < ed.size() && a > ed[i + 1]) ++i;
        v = tb_->G_pan[i](a) - G0_;
    } else {
        v = Lambda_ - tail(a);
    }
    return t >= 0 ? v : -v;
}

double KernelProfile::GG(double t) const {
    double a = std::abs(t);
    if (a <= T1_) {
        const auto& ed = tb_->edges;
        size_t i = 0;
        while (i + 2 < ed.size() && a > ed[i + 1]) ++i;
        return tb_->GG_pan[i](a) - GG0_;
    }
    return GG_T1_ + Lambda_ * (a - T1_) - tail2_T1_ + tail2(a);
}

}  // namespace detail

KernelSpec::KernelSpec(int n, double s) : n_(n), s_(s) {
    if (n < 1) throw std::invalid_argument("KernelSpec: n must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("KernelSpec: s must be in (0,1)");
    omega_ = sphere_measure(n);
    prof_ = std::make_shared<detail::KernelProfile>(n, s);
}

}  // namespace nmg

#ifndef NMG_QUADRATURE_HPP
#define NMG_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace nmg {

/// Nodes and weights of a quadrature rule on a reference interval.
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Gauss-Legendre rule on [-1,1].
const QuadRule& gauss_legendre(int npts);

/// Gauss-Jacobi rule for integrals of the form  int_0^1 tau^(s-1) f(tau) dtau,
/// s in (0,1].  Nodes cluster near 0 like exp(-c/s), which is what makes the
/// far-field integrals tractable at small s.
QuadRule gauss_jacobi01(int npts, double s);

/// Chebyshev series on [a,b], evaluated with Clenshaw recurrence.
class ChebSeries {
public:
    ChebSeries() = default;
    ChebSeries(double a, double b, std::vector<double> coef)
        : a_(a), b_(b), c_(std::move(coef)) {}

    static ChebSeries fit(const std::function<double(double)>& f, double a, double b, int degree);

    double operator()(double x) const;
    /// Antiderivative series with F(a) = 0.
    ChebSeries antiderivative() const;

    double a() const { return a_; }
    double b() const { return b_; }

private:
    double a_ = 0.0, b_ = 1.0;
    std::vector<double> c_;
};

/// Adaptive Gauss-Kronrod (7-15) quadrature over [a,b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 40);

}  // namespace nmg

#endif

#include "nmg/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nmg {

namespace {

QuadRule compute_gauss_legendre(int n) {
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P'_n(x)
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

}  // namespace

const QuadRule& gauss_legendre(int npts) {
    static std::mutex mtx;
    static std::map<int, QuadRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(npts);
    if (it == cache.end()) it = cache.emplace(npts, compute_gauss_legendre(npts)).first;
    return it->second;
}

QuadRule gauss_jacobi01(int npts, double s) {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("gauss_jacobi01: s must be in (0,1]");
    // Golub-Welsch on the Jacobi weight (1+x)^(s-1) over [-1,1]
    // (alpha = 0, beta = s-1 in Gautschi's notation), then map to [0,1].
    const double al = 0.0, be = s - 1.0;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(npts, npts);
    for (int k = 0; k < npts; ++k) {
        double ab = 2.0 * k + al + be;
        double a;
        if (k == 0)
            a = (be - al) / (al + be + 2.0);
        else
            a = (be * be - al * al) / (ab * (ab + 2.0));
        J(k, k) = a;
        if (k + 1 < npts) {
            double b;
            if (k == 0)
                b = 4.0 * (1.0 + al) * (1.0 + be) / ((al + be + 2.0) * (al + be + 2.0) * (al + be + 3.0));
            else {
                double den = (ab + 2.0);
                b = 4.0 * (k + 1) * (k + 1 + al) * (k + 1 + be) * (k + 1 + al + be) /
                    (den * den * (ab + 1.0) * (ab + 3.0));
            }
            J(k, k + 1) = J(k + 1, k) = std::sqrt(b);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    // total mass of the weight on [-1,1]
    const double mu0 = std::pow(2.0, s) / s;
    QuadRule r;
    r.x.resize(npts);
    r.w.resize(npts);
    for (int i = 0; i < npts; ++i) {
        double v0 = es.eigenvectors()(0, i);
        r.x[i] = 0.5 * (es.eigenvalues()(i) + 1.0);        // map to [0,1]
        r.w[i] = mu0 * v0 * v0 * std::pow(2.0, -s);        // int_0^1 tau^(s-1) f = 2^-s * sum w f
    }
    return r;
}

ChebSeries ChebSeries::fit(const std::function<double(double)>& f, double a, double b, int degree) {
    const int N = degree;
    std::vector<double> fv(N + 1);
    for (int j = 0; j <= N; ++j) {
        double theta = M_PI * j / N;
        double x = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(theta);
        fv[j] = f(x);
    }
    std::vector<double> c(N + 1, 0.0);
    for (int k = 0; k <= N; ++k) {
        double sum = 0.5 * (fv[0] + (k % 2 == 0 ? fv[N] : -fv[N]));
        for (int j = 1; j < N; ++j) sum += fv[j] * std::cos(M_PI * k * j / N);
        c[k] = 2.0 / N * sum;
    }
    c[0] *= 0.5;
    c[N] *= 0.5;
    return ChebSeries(a, b, std::move(c));
}

double ChebSeries::operator()(double x) const {
    double t = (2.0 * x - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(c_.size()) - 1; k >= 1; --k) {
        double tmp = 2.0 * t * b1 - b2 + c_[k];
        b2 = b1;
        b1 = tmp;
    }
    return t * b1 - b2 + c_[0];
}

ChebSeries ChebSeries::antiderivative() const {
    const int N = static_cast<int>(c_.size()) - 1;
    std::vector<double> C(N + 2, 0.0);
    const double scale = 0.25 * (b_ - a_);
    for (int k = 1; k <= N + 1; ++k) {
        double ck1 = (k - 1 <= N) ? c_[k - 1] : 0.0;
        double ck2 = (k + 1 <= N) ? c_[k + 1] : 0.0;
        if (k == 1) ck1 *= 2.0;  // account for the halved c_0 convention
        C[k] = scale * (ck1 - ck2) / k;
    }
    ChebSeries F(a_, b_, std::move(C));
    double F_a = F(a_);
    F.c_[0] -= F_a;
    return F;
}

namespace {

// Kronrod 15 / Gauss 7 nodes on [-1,1] (positive half; symmetric).
const double kXK[8] = {0.0, 0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
                       0.7415311855993945, 0.8648644233597691, 0.9491079123427585, 0.9914553711208126};
const double kWK[8] = {0.2094821410847278, 0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
                       0.1406532597155259, 0.1047900103222502, 0.0630920926299786, 0.0229353220105292};
const double kWG[4] = {0.4179591836734694, 0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

void gk15(const std::function<double(double)>& f, double a, double b, double& valK, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double sumK = 0.0, sumG = 0.0;
    double f0 = f(c);
    sumK += kWK[0] * f0;
    sumG += kWG[0] * f0;
    for (int i = 1; i < 8; ++i) {
        double fp = f(c + h * kXK[i]);
        double fm = f(c - h * kXK[i]);
        sumK += kWK[i] * (fp + fm);
        if (i % 2 == 0) sumG += kWG[i / 2] * (fp + fm);
    }
    valK = sumK * h;
    err = std::abs((sumK - sumG) * h);
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
             int max_depth) {
    double v, e;
    gk15(f, a, b, v, e);
    if (e <= tol || depth >= max_depth) return v;
    double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, depth + 1, max_depth) +
           adapt(f, m, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int max_depth) {
    if (a == b) return 0.0;
    double v0, e0;
    gk15(f, a, b, v0, e0);
    double tol = std::max(abs_tol, rel_tol * std::abs(v0));
    if (e0 <= tol) return v0;
    double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, 1, max_depth) + adapt(f, m, b, 0.5 * tol, 1, max_depth);
}

}  // namespace nmg

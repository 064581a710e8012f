#ifndef NMG_KERNEL_HPP
#define NMG_KERNEL_HPP

#include <memory>

namespace nmg {

namespace detail {

/**
 * Evaluators for the kernel profile
 *
 *     g(t)  = (1 + t^2)^(-(n+1+s)/2)
 *     G(t)  = int_0^t g
 *     GG(t) = int_0^t G          (Lipschitz, convex, even)
 *     Gbar(t) = int_{-inf}^t g = Lambda + G(t)
 *
 * together with the constants Lambda = G(+inf) and
 * lambda = sup_t (Lambda |t| - GG(t)).
 *
 * Evaluation uses Chebyshev panels on |t| <= 8 and the analytic tail
 * expansion beyond, accurate to ~1e-13 absolute.  All state is immutable
 * after construction.
 */
class KernelProfile {
public:
    KernelProfile(int n, double s);

    double g(double t) const;
    double G(double t) const;
    double GG(double t) const;
    double Gbar(double t) const { return Lambda_ + G(t); }

    double Lambda() const { return Lambda_; }
    double lambda_small() const { return lambda_; }
    double p() const { return p_; }

private:
    double tail(double t) const;   // int_t^inf g, t >= T1
    double tail2(double t) const;  // int_t^inf tail, t >= T1

    double p_;
    double T1_;
    double Lambda_;
    double lambda_;
    double GG_T1_, tail2_T1_;
    double G0_ = 0.0, GG0_ = 0.0;
    struct Tables;
    std::shared_ptr<const Tables> tb_;
};

}  // namespace detail

/**
 * Dimension n, fractional order s in (0,1), and the derived geometric
 * constants: omega = H^n(boundary of the unit ball in R^(n+1)),
 * Lambda = G(+inf), and lambda with Lambda|t| - lambda <= GG(t) <= Lambda|t|.
 *
 * Pure and safe for concurrent use once constructed.
 */
class KernelSpec {
public:
    KernelSpec(int n, double s);

    int n() const { return n_; }
    double s() const { return s_; }
    double omega() const { return omega_; }
    double Lambda() const { return prof_->Lambda(); }
    double lambda_small() const { return prof_->lambda_small(); }

    double g(double t) const { return prof_->g(t); }
    double G(double t) const { return prof_->G(t); }
    double GG(double t) const { return prof_->GG(t); }
    double Gbar(double t) const { return prof_->Gbar(t); }

    const detail::KernelProfile& profile() const { return *prof_; }

private:
    int n_;
    double s_;
    double omega_;
    std::shared_ptr<const detail::KernelProfile> prof_;
};

/// Surface measure of the unit sphere in R^(n+1): 2 pi^((n+1)/2) / Gamma((n+1)/2).
double sphere_measure(int n);

// Free-function forms of the kernel profile operations.
inline double kernel_g(const KernelSpec& spec, double t) { return spec.g(t); }
inline double kernel_G(const KernelSpec& spec, double t) { return spec.G(t); }
inline double kernel_GG(const KernelSpec& spec, double t) { return spec.GG(t); }
inline double kernel_Gbar(const KernelSpec& spec, double t) { return spec.Gbar(t); }

}  // namespace nmg

#endif

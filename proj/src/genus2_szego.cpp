#include "sewkernel/genus2_szego.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sewkernel {

Genus2Kernel::Genus2Kernel(const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M,
                           const SeriesBudget& b)
    : kk_(sew, tw, b), N_(N), M_(quad_M) {
    if (N < 0) throw DomainError("truncation order must be >= 0");
    if (N == 0) return;
    T_ = build_T(N, kk_, quad_M);
    lu_.compute(MatrixXc::Identity(2 * N, 2 * N) - T_.m);
    Dtheta_.resize(2 * N);
    for (int k = 0; k < N; ++k) {
        Dtheta_(k) = 1.0 / tw.theta2();
        Dtheta_(N + k) = -tw.theta2();
    }
}

void Genus2Kernel::check_surface_point(cplx x) const {
    const SewingConfig& sew = kk_.sew();
    for (int a = 1; a <= 2; ++a) {
        cplx z = x - sew.center(a);
        double d = std::abs(z - nearest_lattice_point(z, sew.tau));
        if (d <= std::abs(sew.rho) / sew.radius(bar(a)))
            throw DomainError("point lies in an excised disk");
    }
}

VectorXc Genus2Kernel::h_impl(HalfDiffSide side, cplx p) const {
    const SewingConfig& sew = kk_.sew();
    const double kappa = kk_.tw().kappa;
    VectorXc out(2 * N_);
    for (int a = 1; a <= 2; ++a) {
        VectorXc d = half_diff_all(side, a, p, N_, kk_, M_);
        for (int k = 1; k <= N_; ++k)
            out((a - 1) * N_ + k - 1) = sew.rho_pow(0.5 * (shifted_index(a, k, kappa) - 0.5)) * d(k - 1);
    }
    return out;
}

VectorXc Genus2Kernel::h(cplx x) const { return h_impl(HalfDiffSide::d, x); }
VectorXc Genus2Kernel::hbar(cplx y) const { return h_impl(HalfDiffSide::dbar, y); }

KernelEval Genus2Kernel::eval(cplx x, cplx y) const {
    check_surface_point(x);
    check_surface_point(y);
    KernelEval r;
    r.N = N_;
    r.quad_M = M_;
    r.branch = branch();
    r.value = kk_.s_kappa(x, y);
    if (N_ == 0) return r;
    VectorXc sol = lu_.solve(hbar(y));
    cplx acc = 0.0;
    VectorXc hx = h(x);
    for (Eigen::Index i = 0; i < hx.size(); ++i) acc += hx(i) * Dtheta_(i) * sol(i);
    r.value += kk_.tw().xi() * acc;
    return r;
}

KernelEval s2_eval(cplx x, cplx y, const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M,
                   const SeriesBudget& b) {
    return Genus2Kernel(sew, tw, N, quad_M, b).eval(x, y);
}

SewingResidual sewing_multiplier_residual(int a, cplx za, cplx y, const Genus2Kernel& g2) {
    if (a != 1 && a != 2) throw DomainError("labels must be 1 or 2");
    const SewingConfig& sew = g2.kernel().sew();
    const TwistConfig& tw = g2.kernel().tw();
    const int ab = bar(a);
    double inner = std::abs(sew.rho) / sew.radius(ab);
    if (!(std::abs(za) > inner && std::abs(za) < sew.radius(a)))
        throw DomainError("sewing coordinate outside the annulus");
    const cplx zb = sew.rho / za;
    SewingResidual r;
    r.winding = int(std::lround((std::log(za) + std::log(zb) - sew.log_rho()).imag() / (2.0 * pi)));
    const cplx J = sgn(ab) * tw.xi() * sew.rho_pow(0.5) / zb;
    r.lhs = g2.eval(sew.center(a) + za, y).value * J;
    r.rhs = g2.eval(sew.center(ab) + zb, y).value;
    const cplx branch = std::exp(two_pi_i * tw.kappa * double(r.winding) * sgn(a));
    const cplx th = tw.theta2();
    const double scale = std::abs(r.rhs);
    const int e = a - ab;
    r.residual = std::abs(r.lhs + std::pow(th, e) * branch * r.rhs) / scale;
    r.residual_alt = std::abs(r.lhs + std::pow(th, -e) * branch * r.rhs) / scale;
    r.exponent = r.residual <= r.residual_alt ? e : -e;
    return r;
}

SewingResidual sewing_multiplier_residual(int a, cplx za, cplx y, const SewingConfig& sew, const TwistConfig& tw,
                                          int N, int quad_M, const SeriesBudget& b) {
    return sewing_multiplier_residual(a, za, y, Genus2Kernel(sew, tw, N, quad_M, b));
}

DomainReport domain_check(const SewingConfig& sew) {
    DomainReport rep;
    const double bound = 2.0 * std::sqrt(std::abs(sew.rho));
    rep.bound = bound;
    const cplx e1 = two_pi_i, e2 = two_pi_i * sew.tau.value;
    const double diam = std::max(std::abs(e1 + e2), std::abs(e1 - e2));
    const double R = std::abs(sew.w) + bound + diam;
    // |m e2 + n e1| >= |m| Im(tau) 2 pi
    const long mmax = long(std::ceil(R / (2.0 * pi * sew.tau.value.imag()))) + 1;
    double best = std::numeric_limits<double>::infinity();
    for (long m = -mmax; m <= mmax; ++m) {
        double base = -double(m) * sew.tau.value.real();
        long nspan = long(std::ceil(R / (2.0 * pi))) + 1;
        for (long n = long(std::floor(base)) - nspan; n <= long(std::ceil(base)) + nspan; ++n) {
            cplx lam = double(m) * e2 + double(n) * e1;
            if (std::abs(lam) > R) continue;
            double d = std::abs(sew.w - lam);
            if (d < best) {
                best = d;
                rep.worst_lambda = lam;
            }
        }
    }
    rep.distance = best;
    std::ostringstream msg;
    if (!(bound > 0.0)) {
        msg << "rho = 0 violates 2|rho|^(1/2) > 0";
    } else if (!(best > bound)) {
        msg << "|w - lambda| = " << best << " <= 2|rho|^(1/2) = " << bound << " at lambda = " << rep.worst_lambda;
    } else {
        rep.ok = true;
        msg << "ok: min |w - lambda| = " << best << " > " << bound;
    }
    rep.message = msg.str();
    return rep;
}

}  // namespace sewkernel

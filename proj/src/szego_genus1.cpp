#include "sewkernel/szego_genus1.hpp"

#include <algorithm>
#include <cmath>

namespace sewkernel {

void TwistConfig::validate() const {
    if (!std::isfinite(alpha1) || !std::isfinite(beta1) || !std::isfinite(beta2))
        throw DomainError("twist parameters must be finite");
    if (!(kappa > -0.5 && kappa < 0.5)) throw DomainError("kappa must lie in (-1/2, 1/2)");
    if (B % 2 == 0) throw DomainError("B must be odd");
}

cplx TwistConfig::theta1() const { return -std::exp(-two_pi_i * beta1); }
cplx TwistConfig::phi1() const { return -std::exp(two_pi_i * alpha1); }
cplx TwistConfig::theta2() const { return -std::exp(-two_pi_i * beta2); }
cplx TwistConfig::phi2() const { return -std::exp(two_pi_i * kappa); }
cplx TwistConfig::xi() const { return std::exp(I * pi * double(B) / 2.0); }

SewingConfig::SewingConfig(const Tau& t, cplx w_, cplx rho_, double r1_, double r2_, int sheet)
    : tau(t), w(w_), rho(rho_), r1(r1_), r2(r2_), rho_sheet(sheet) {}

double SewingConfig::default_radius(const Tau& t, cplx w) {
    double dw = std::abs(w - nearest_lattice_point(w, t));
    return 0.45 * std::min(dw, lattice_min_length(t));
}

SewingConfig SewingConfig::make(cplx tau, cplx w, cplx rho, int sheet) {
    Tau t(tau);
    double r = default_radius(t, w);
    return SewingConfig(t, w, rho, r, r, sheet);
}

void SewingConfig::validate() const {
    double D = lattice_min_length(tau);
    double dw = std::abs(w - nearest_lattice_point(w, tau));
    double s = 2.0 * std::sqrt(std::abs(rho));
    if (!(s > 0.0)) throw DomainError("rho must be nonzero");
    if (!(dw > s)) throw DomainError("(tau, w, rho) outside the sewing domain");
    if (!(r1 > 0.0 && r2 > 0.0)) throw DomainError("radii must be positive");
    if (!(r1 < 0.5 * D && r2 < 0.5 * D)) throw DomainError("radii must be below D(q)/2");
    if (!(r1 + r2 < dw)) throw DomainError("disks around 0 and w overlap");
    if (!(std::abs(rho) <= r1 * r2)) throw DomainError("|rho| exceeds r1 r2");
}

cplx SewingConfig::log_rho() const { return std::log(rho) + two_pi_i * double(rho_sheet); }

KappaKernel::KappaKernel(const SewingConfig& sew, const TwistConfig& tw, const SeriesBudget& b)
    : sew_(sew), tw_(tw), b_(b) {
    sew_.validate();
    tw_.validate();
    b_.validate();
    D_ = lattice_min_length(sew_.tau);
    const cplx kw = tw_.kappa * sew_.w;
    theta_kw_ = theta_char_g1(tw_.char1(), kw, sew_.tau, b_);
    double majorant =
        theta_char_g1(cplx(tw_.alpha1), cplx(0.0), cplx(kw.real()), Tau(I * sew_.tau.value.imag()), b_)
            .real();
    if (std::abs(theta_kw_) < 1e-12 * majorant)
        throw DegenerateCharacteristic("theta[alpha1;beta1](kappa w) vanishes");
    theta1p0_ = theta1(0.0, sew_.tau, b_, 1);

    A0_[0] = std::log(G(1, 0.0));
    A0_[1] = 0.0;
    const cplx m = sew_.w / 2.0;
    cplx delta2 = A(2, -m);
    A0_[1] = -std::log(m) + A(1, m) - std::log(-m) - delta2 + two_pi_i * double(sew_.kappa_branch);
}

cplx KappaKernel::log_ratio() const { return sew_.log_rho() + A0_[1] - A0_[0]; }

cplx KappaKernel::G(int a, cplx z) const {
    const Tau& t = sew_.tau;
    const cplx w = sew_.w;
    if (std::abs(z) < 1e-9 * D_) {
        if (a == 1) return theta1(-w, t, b_) / theta1p0_;
        return theta1p0_ / theta1(w, t, b_);
    }
    if (a == 1) return z * theta1(z - w, t, b_) / theta1(z, t, b_);
    return theta1(z, t, b_) / (z * theta1(z + w, t, b_));
}

cplx KappaKernel::A(int a, cplx z) const {
    // continuation of log G_a along the ray from 0 to z
    cplx acc = A0_[a - 1];
    int steps = std::max(4, int(std::ceil(8.0 * std::abs(z) / D_)));
    cplx prev = G(a, 0.0);
    double t0 = 0.0;
    for (int j = 1; j <= steps; ++j) {
        double t1 = double(j) / steps;
        cplx next = G(a, t1 * z);
        cplx d = std::log(next / prev);
        int depth = 0;
        while (std::abs(d.imag()) > 0.5) {
            if (++depth > 30) throw PoleProximity("log continuation passes a zero or pole");
            t1 = 0.5 * (t0 + t1);
            next = G(a, t1 * z);
            d = std::log(next / prev);
        }
        acc += d;
        prev = next;
        t0 = t1;
        if (t1 < double(j) / steps) --j;
    }
    return acc;
}

cplx KappaKernel::L(cplx x) const {
    const int a = std::abs(x) <= std::abs(x - sew_.w) ? 1 : 2;
    const cplx z = x - sew_.center(a);
    return sgn(a) * std::log(z) + A(a, z);
}

void KappaKernel::check_point(cplx x) const {
    for (cplx c : {cplx(0.0), sew_.w}) {
        cplx z = x - c;
        if (std::abs(z - nearest_lattice_point(z, sew_.tau)) < 1e-8 * D_)
            throw PoleProximity("point coincides with a puncture");
    }
}

cplx KappaKernel::P(cplx z) const {
    if (std::abs(z - nearest_lattice_point(z, sew_.tau)) < 1e-8 * D_)
        throw PoleProximity("coincident points");
    cplx num = theta_char_g1(tw_.char1(), z + tw_.kappa * sew_.w, sew_.tau, b_);
    return num * theta1p0_ / (theta_kw_ * theta1(z, sew_.tau, b_));
}

cplx KappaKernel::s_kappa(cplx x, cplx y) const {
    check_point(x);
    check_point(y);
    cplx p = P(x - y);
    if (tw_.kappa == 0.0) return p;
    return std::exp(tw_.kappa * (L(x) - L(y))) * p;
}

cplx KappaKernel::s_regular(cplx xc, cplx yc, int x_disk, int y_disk) const {
    if (std::abs(xc) > sew_.radius(x_disk) * (1.0 + 1e-12) ||
        std::abs(yc) > sew_.radius(y_disk) * (1.0 + 1e-12))
        throw DomainError("local coordinate outside the disk");
    cplx p = P(sew_.center(x_disk) + xc - sew_.center(y_disk) - yc);
    if (tw_.kappa == 0.0) return p;
    return std::exp(tw_.kappa * (A(x_disk, xc) - A(y_disk, yc))) * p;
}

std::vector<cplx> KappaKernel::F_circle(int a, double r, int M) const {
    std::vector<cplx> out(M);
    if (tw_.kappa == 0.0) {
        std::fill(out.begin(), out.end(), cplx(1.0));
        return out;
    }
    cplx z0 = r;
    cplx acc = A(a, z0);
    cplx prev = G(a, z0);
    out[0] = std::exp(tw_.kappa * acc);
    for (int j = 1; j < M; ++j) {
        cplx z = std::polar(r, 2.0 * pi * j / M);
        cplx g = G(a, z);
        cplx d = std::log(g / prev);
        if (std::abs(d.imag()) > 1.0) throw DomainError("quadrature too coarse for the circle");
        acc += d;
        prev = g;
        out[j] = std::exp(tw_.kappa * acc);
    }
    return out;
}

cplx s_kappa(cplx x, cplx y, const SewingConfig& sew, const TwistConfig& tw, const SeriesBudget& b) {
    return KappaKernel(sew, tw, b).s_kappa(x, y);
}

cplx s_kappa_regular(cplx x_coord, cplx y_coord, int x_disk, int y_disk, const SewingConfig& sew,
                     const TwistConfig& tw, const SeriesBudget& b) {
    return KappaKernel(sew, tw, b).s_regular(x_coord, y_coord, x_disk, y_disk);
}

namespace {

void check_labels(int a) {
    if (a != 1 && a != 2) throw DomainError("labels must be 1 or 2");
}

void check_resolution(int N, int M) {
    if (N < 1) throw DomainError("truncation order must be >= 1");
    if (M < 2 * (N + 4)) throw DomainError("quadrature under-resolved: need quad_M >= 2(N + 4)");
}

// X(i, k-1) = z_i^{-(k-1)} on the circle |z| = r
MatrixXc inverse_powers(double r, int M, int N) {
    MatrixXc X(M, N);
    for (int i = 0; i < M; ++i) {
        cplx zinv = std::polar(1.0 / r, -2.0 * pi * i / M);
        cplx p = 1.0;
        for (int k = 0; k < N; ++k) {
            X(i, k) = p;
            p *= zinv;
        }
    }
    return X;
}

}  // namespace

BlockMatrix moment_C_all(int N, const KappaKernel& kk, int M) {
    check_resolution(N, M);
    const SewingConfig& sew = kk.sew();
    BlockMatrix C(N);
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) {
            const int xd = bar(a), yd = b;
            const double rx = sew.radius(xd);
            const double ry = sew.radius(yd) * (xd == yd ? 0.8 : 1.0);
            auto Fx = kk.F_circle(xd, rx, M);
            auto Fy = kk.F_circle(yd, ry, M);
            MatrixXc S(M, M);
            const cplx shift = sew.center(xd) - sew.center(yd);
            for (int i = 0; i < M; ++i) {
                cplx x = std::polar(rx, 2.0 * pi * i / M);
                for (int j = 0; j < M; ++j) {
                    cplx y = std::polar(ry, 2.0 * pi * j / M);
                    S(i, j) = Fx[i] / Fy[j] * kk.P(shift + x - y);
                }
            }
            MatrixXc blk = inverse_powers(rx, M, N).transpose() * S * inverse_powers(ry, M, N);
            blk /= double(M) * double(M);
            C.m.block((a - 1) * N, (b - 1) * N, N, N) = blk;
        }
    return C;
}

cplx moment_C(int a, int b, int k, int l, const SewingConfig& sew, const TwistConfig& tw, int quad_M,
              const SeriesBudget& bud) {
    check_labels(a);
    check_labels(b);
    if (k < 1 || l < 1) throw DomainError("mode indices must be >= 1");
    KappaKernel kk(sew, tw, bud);
    BlockMatrix C = moment_C_all(std::max(k, l), kk, quad_M);
    return C(a, k, b, l);
}

VectorXc half_diff_all(HalfDiffSide side, int a, cplx point, int N, const KappaKernel& kk, int M,
                       double radius) {
    check_labels(a);
    check_resolution(N, M);
    const SewingConfig& sew = kk.sew();
    const double kappa = kk.tw().kappa;
    kk.check_point(point);
    // contour around the puncture c (label a for d, bar a for dbar)
    const int disk = side == HalfDiffSide::d ? a : bar(a);
    const cplx c = sew.center(disk);
    cplx rel = point - c;
    double dist = std::abs(rel - nearest_lattice_point(rel, sew.tau));
    double r = radius > 0.0 ? radius : std::min(sew.radius(disk), 0.5 * dist);
    if (!(r < dist)) throw DomainError("contour encloses the external point");
    auto F = kk.F_circle(disk, r, M);
    VectorXc vals(M);
    for (int j = 0; j < M; ++j) {
        cplx z = std::polar(r, 2.0 * pi * j / M);
        if (side == HalfDiffSide::d)
            vals(j) = kk.P(point - c - z) / F[j];
        else
            vals(j) = F[j] * kk.P(c + z - point);
    }
    VectorXc out = inverse_powers(r, M, N).transpose() * vals / double(M);
    cplx ext = kappa == 0.0 ? cplx(1.0) : std::exp(kappa * kk.L(point));
    if (side == HalfDiffSide::d)
        out *= ext;
    else
        out /= ext;
    return out;
}

cplx half_diff(HalfDiffSide side, int a, cplx point, int k, const SewingConfig& sew,
               const TwistConfig& tw, int quad_M, const SeriesBudget& b) {
    if (k < 1) throw DomainError("mode index must be >= 1");
    KappaKernel kk(sew, tw, b);
    return half_diff_all(side, a, point, k, kk, quad_M)(k - 1);
}

BlockMatrix T_from_C(const BlockMatrix& C, const SewingConfig& sew, const TwistConfig& tw) {
    const int N = C.N;
    BlockMatrix T(N);
    const cplx xi = tw.xi();
    const cplx Dcol[2] = {1.0 / tw.theta2(), -tw.theta2()};
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b)
            for (int k = 1; k <= N; ++k)
                for (int l = 1; l <= N; ++l) {
                    double e = 0.5 * (shifted_index(a, k, tw.kappa) + shifted_index(b, l, tw.kappa) - 1.0);
                    T(a, k, b, l) = xi * sew.rho_pow(e) * C(a, k, b, l) * Dcol[b - 1];
                }
    return T;
}

BlockMatrix build_T(int N, const KappaKernel& kk, int quad_M) {
    return T_from_C(moment_C_all(N, kk, quad_M), kk.sew(), kk.tw());
}

BlockMatrix build_T(int N, const SewingConfig& sew, const TwistConfig& tw, int quad_M,
                    const SeriesBudget& b) {
    return build_T(N, KappaKernel(sew, tw, b), quad_M);
}

}  // namespace sewkernel

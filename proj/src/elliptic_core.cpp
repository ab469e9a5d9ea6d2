#include "sewkernel/elliptic_core.hpp"

#include <cfloat>
#include <cmath>
#include <limits>

namespace sewkernel {

Tau::Tau(cplx t) : value(t), q(std::exp(two_pi_i * t)) {
    if (!(t.imag() > 0.0) || !std::isfinite(t.real()) || !std::isfinite(t.imag()))
        throw DomainError("tau must lie in the upper half plane");
}

void SeriesBudget::validate() const {
    if (lattice_cutoff < 4 || qseries_cutoff < 4)
        throw DomainError("series cutoffs must be at least 4");
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw DomainError("rel_tol must lie in (0, 1)");
}

namespace {

bool converged(cplx delta, cplx total, double scale, double tol) {
    double ref = std::max(std::abs(total), DBL_EPSILON * scale);
    return std::abs(delta) <= tol * ref;
}

struct ThetaSum {
    cplx alpha, beta, z;
    cplx tau;
    int deriv;
    long n0;

    cplx term(long n) const {
        cplx u = double(n) + alpha;
        cplx e = std::exp(I * pi * u * u * tau + u * (z + two_pi_i * beta));
        for (int d = 0; d < deriv; ++d) e *= u;
        return e;
    }
};

}  // namespace

cplx theta_char_g1(cplx alpha, cplx beta, cplx z, const Tau& tau, const SeriesBudget& b, int deriv) {
    b.validate();
    cplx zs = z + two_pi_i * beta;
    double center = zs.real() / (2.0 * pi * tau.value.imag()) - alpha.real();
    ThetaSum s{alpha, beta, z, tau.value, deriv, std::lround(center)};

    long cutoff = b.lattice_cutoff;
    cplx total = s.term(s.n0);
    double scale = std::abs(total);
    for (long j = 1; j <= cutoff; ++j) {
        cplx a = s.term(s.n0 + j), c = s.term(s.n0 - j);
        total += a + c;
        scale += std::abs(a) + std::abs(c);
    }
    for (int dbl = 0; dbl < max_doublings; ++dbl) {
        cplx shell = 0.0;
        for (long j = cutoff + 1; j <= 2 * cutoff; ++j) {
            cplx a = s.term(s.n0 + j), c = s.term(s.n0 - j);
            shell += a + c;
            scale += std::abs(a) + std::abs(c);
        }
        total += shell;
        cutoff *= 2;
        if (converged(shell, total, scale, b.rel_tol)) return total;
    }
    throw BudgetExhausted("theta series did not converge");
}

cplx theta_char_g1(const Characteristic& c, cplx z, const Tau& tau, const SeriesBudget& b) {
    return theta_char_g1(cplx(c.alpha), cplx(c.beta), z, tau, b, 0);
}

cplx theta1(cplx z, const Tau& tau, const SeriesBudget& b, int deriv) {
    return theta_char_g1(cplx(0.5), cplx(0.5), z, tau, b, deriv);
}

double lattice_min_length(const Tau& tau) {
    double im = tau.value.imag();
    long mmax = long(std::ceil(1.0 / im)) + 1;
    double best = 1.0;
    for (long m = 1; m <= mmax; ++m) {
        double base = -double(m) * tau.value.real();
        for (long n = long(std::floor(base)) - 1; n <= long(std::ceil(base)) + 1; ++n) {
            double len = std::abs(double(m) * tau.value + double(n));
            if (len > 0.0) best = std::min(best, len);
        }
    }
    return 2.0 * pi * best;
}

cplx nearest_lattice_point(cplx z, const Tau& tau) {
    cplx u = z / two_pi_i;
    long m0 = std::lround(u.imag() / tau.value.imag());
    long n0 = std::lround(u.real() - double(m0) * tau.value.real());
    cplx best = 0.0;
    double bestd = std::numeric_limits<double>::infinity();
    for (long m = m0 - 3; m <= m0 + 3; ++m)
        for (long n = n0 - 3; n <= n0 + 3; ++n) {
            cplx lam = two_pi_i * (double(m) * tau.value + double(n));
            double d = std::abs(z - lam);
            if (d < bestd) {
                bestd = d;
                best = lam;
            }
        }
    return best;
}

cplx prime_form_K(cplx z, const Tau& tau, const SeriesBudget& b) {
    double D = lattice_min_length(tau);
    if (std::abs(z - nearest_lattice_point(z, tau)) < 1e-13 * D)
        throw PoleProximity("prime form evaluated at a lattice point");
    return theta1(z, tau, b) / theta1(0.0, tau, b, 1);
}

cplx dedekind_eta(const Tau& tau, const SeriesBudget& b) {
    b.validate();
    int cutoff = b.qseries_cutoff;
    cplx prod = 1.0;
    cplx qn = 1.0;
    for (int n = 1; n <= cutoff; ++n) {
        qn *= tau.q;
        prod *= 1.0 - qn;
    }
    for (int dbl = 0; dbl < max_doublings; ++dbl) {
        cplx shell = 1.0;
        for (int n = cutoff + 1; n <= 2 * cutoff; ++n) {
            qn *= tau.q;
            shell *= 1.0 - qn;
        }
        cplx next = prod * shell;
        cutoff *= 2;
        bool ok = converged(next - prod, next, std::abs(next), b.rel_tol);
        prod = next;
        if (ok) return std::exp(two_pi_i * tau.value / 24.0) * prod;
    }
    throw BudgetExhausted("eta product did not converge");
}

namespace {

// sum_{m != 0} (2 pi i m)^{-s}
double zeta_lattice(int s) {
    if (s % 2) return 0.0;
    double sign = (s / 2) % 2 ? -1.0 : 1.0;
    return 2.0 * std::riemann_zeta(double(s)) * sign * std::exp(-double(s) * std::log(2.0 * pi));
}

}  // namespace

cplx eisenstein(int k, const Tau& tau, const SeriesBudget& b) {
    if (k < 2 || k % 2) throw DomainError("eisenstein: k must be even and >= 2");
    b.validate();
    double lg = std::lgamma(double(k));
    auto term = [&](int d) {
        cplx qd = std::pow(tau.q, d);
        double mag = std::exp(double(k - 1) * std::log(double(d)) - lg);
        return mag * qd / (1.0 - qd);
    };
    int cutoff = b.qseries_cutoff;
    cplx sum = 0.0;
    double scale = 0.0;
    for (int d = 1; d <= cutoff; ++d) {
        cplx t = term(d);
        sum += t;
        scale += std::abs(t);
    }
    cplx constant = zeta_lattice(k);
    for (int dbl = 0; dbl < max_doublings; ++dbl) {
        cplx shell = 0.0;
        for (int d = cutoff + 1; d <= 2 * cutoff; ++d) {
            cplx t = term(d);
            shell += t;
            scale += std::abs(t);
        }
        sum += shell;
        cutoff *= 2;
        cplx total = constant + 2.0 * sum;
        if (converged(2.0 * shell, total, 2.0 * scale + std::abs(constant), b.rel_tol)) return total;
    }
    throw BudgetExhausted("eisenstein q-series did not converge");
}

namespace {

// sum_{m in Z} (u + 2 pi i m)^{-k}, k >= 2
cplx row_sum(int k, cplx u) {
    u -= two_pi_i * std::round(u.imag() / (2.0 * pi));
    double re = u.real();
    double lg = std::lgamma(double(k));
    cplx acc = 0.0;
    if (std::abs(re) >= 2.0) {
        double s = re > 0 ? 1.0 : -1.0;
        double prefac = (re < 0 && k % 2) ? -1.0 : 1.0;
        double peak = double(k - 1) / std::abs(re);
        for (int j = 1; j < 100000; ++j) {
            cplx lt = double(k - 1) * std::log(double(j)) - lg - double(j) * s * u;
            cplx t = std::exp(lt);
            acc += t;
            if (double(j) > peak && std::abs(t) <= 1e-18 * std::abs(acc)) break;
            if (double(j) > peak && std::abs(t) < 1e-300) break;
        }
        return prefac * acc;
    }
    acc = std::pow(u, -k);
    double lu = std::log(std::abs(u));
    double argu = std::arg(u);
    double l2pi = std::log(2.0 * pi);
    for (int j = 0; j < 100000; ++j) {
        int s = k + j;
        if (s % 2) continue;
        double lbin = std::lgamma(double(k + j)) - std::lgamma(double(j + 1)) - lg;
        double mag = std::exp(lbin + double(j) * lu - double(s) * l2pi) * 2.0 *
                     std::riemann_zeta(double(s));
        double sign = ((s / 2) % 2 ? -1.0 : 1.0) * (j % 2 ? -1.0 : 1.0);
        cplx t = sign * mag * std::polar(1.0, double(j) * argu);
        acc += t;
        double peak = double(k) * std::abs(u) / (2.0 * pi - std::abs(u));
        if (double(j) > peak && std::abs(t) <= 1e-18 * std::abs(acc)) break;
    }
    return acc;
}

}  // namespace

cplx weierstrass_P(int k, cplx z, const Tau& tau, const SeriesBudget& b) {
    if (k < 2) throw DomainError("weierstrass_P: k must be >= 2");
    b.validate();
    double D = lattice_min_length(tau);
    cplx z0 = z - nearest_lattice_point(z, tau);
    if (std::abs(z0) < 1e-10 * D) throw PoleProximity("weierstrass_P evaluated at a lattice point");
    // shift z0 so that the real parts of the row variables are balanced
    cplx step = two_pi_i * tau.value;  // Re(step) = -2 pi Im(tau)
    cplx acc = row_sum(k, z0);
    double width = -step.real();
    for (long n = 1; n < 100000; ++n) {
        cplx up = row_sum(k, z0 - double(n) * step);
        cplx dn = row_sum(k, z0 + double(n) * step);
        acc += up + dn;
        double reach = double(n) * width - std::abs(z0.real());
        if (reach > double(k) && std::abs(up) + std::abs(dn) <= 1e-18 * std::abs(acc)) return acc;
        if (reach > double(k) && std::abs(up) + std::abs(dn) < 1e-300) return acc;
    }
    throw BudgetExhausted("weierstrass_P lattice sum did not converge");
}

Characteristic characteristic_from_multipliers(cplx theta, cplx phi) {
    Characteristic c;
    c.alpha = std::arg(-phi) / (2.0 * pi);
    c.beta = -std::arg(-theta) / (2.0 * pi);
    return c;
}

cplx twisted_P1(const Characteristic& c, cplx z, const Tau& tau, const SeriesBudget& b) {
    cplx t0 = theta_char_g1(c, 0.0, tau, b);
    double ref = std::abs(theta_char_g1(Characteristic{0.0, 0.0}, 0.0, tau, b));
    if (std::abs(t0) < 1e-12 * ref)
        throw DegenerateCharacteristic("theta[alpha;beta](0) vanishes");
    return theta_char_g1(c, z, tau, b) / (t0 * prime_form_K(z, tau, b));
}

cplx twisted_P1(cplx theta, cplx phi, cplx z, const Tau& tau, const SeriesBudget& b) {
    if (std::abs(theta - 1.0) < 1e-12 && std::abs(phi - 1.0) < 1e-12)
        throw DomainError("twisted_P1 undefined for (theta, phi) = (1, 1)");
    return twisted_P1(characteristic_from_multipliers(theta, phi), z, tau, b);
}

cplx theta_char_g2(const std::array<double, 2>& alpha, const std::array<double, 2>& beta,
                   const Mat2& Omega, const SeriesBudget& b) {
    b.validate();
    double a = Omega[0][0].imag(), c = Omega[1][1].imag();
    double off = 0.5 * (Omega[0][1].imag() + Omega[1][0].imag());
    if (!(a > 0.0 && a * c - off * off > 0.0))
        throw DomainError("Im Omega must be positive definite");
    if (std::abs(Omega[0][1] - Omega[1][0]) > 1e-12 * (std::abs(Omega[0][1]) + 1.0))
        throw DomainError("Omega must be symmetric");
    auto term = [&](long n1, long n2) {
        double u1 = double(n1) + alpha[0], u2 = double(n2) + alpha[1];
        cplx quad = u1 * u1 * Omega[0][0] + 2.0 * u1 * u2 * Omega[0][1] + u2 * u2 * Omega[1][1];
        return std::exp(I * pi * quad + two_pi_i * (u1 * beta[0] + u2 * beta[1]));
    };
    auto box = [&](long lo, long hi, double& scale) {
        // sum over lo < max(|n1|,|n2|) <= hi
        cplx s = 0.0;
        for (long n1 = -hi; n1 <= hi; ++n1)
            for (long n2 = -hi; n2 <= hi; ++n2) {
                if (std::max(std::labs(n1), std::labs(n2)) <= lo) continue;
                cplx t = term(n1, n2);
                s += t;
                scale += std::abs(t);
            }
        return s;
    };
    long cutoff = b.lattice_cutoff;
    double scale = 0.0;
    cplx total = box(-1, cutoff, scale);
    for (int dbl = 0; dbl < max_doublings; ++dbl) {
        cplx shell = box(cutoff, 2 * cutoff, scale);
        total += shell;
        cutoff *= 2;
        if (converged(shell, total, scale, b.rel_tol)) return total;
    }
    throw BudgetExhausted("genus-two theta series did not converge");
}

}  // namespace sewkernel

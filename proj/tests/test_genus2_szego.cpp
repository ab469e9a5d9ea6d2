#include <random>

#include "doctest.h"
#include "sewkernel/genus2_szego.hpp"

using namespace sewkernel;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const cplx tau0(0.1, 1.1), w0(1.3, 2.9);
const TwistConfig tw0{0.21, -0.13, 0.17, 0.23, 1};
const cplx xa(0.6, -1.3), yb(-1.1, 0.8);

}  // namespace

TEST_CASE("N = 0 gives S_kappa") {
    auto s = SewingConfig::make(tau0, w0, std::polar(1e-3, 0.7));
    Genus2Kernel g(s, tw0, 0, 64);
    CHECK(g.eval(xa, yb).value == g.kernel().s_kappa(xa, yb));
    CHECK(s2_eval(xa, yb, s, tw0, 0, 64).value == s_kappa(xa, yb, s, tw0));
}

TEST_CASE("correction vanishes as rho -> 0") {
    // the leading correction carries |rho|^{1/2 - |kappa|}
    std::vector<double> c;
    for (double r : {1e-2, 1e-3, 1e-4}) {
        auto s = SewingConfig::make(tau0, w0, std::polar(r, 0.7));
        Genus2Kernel g(s, tw0, 8, 64);
        c.push_back(std::abs(g.eval(xa, yb).value - g.kernel().s_kappa(xa, yb)));
    }
    CHECK(c[1] < c[0]);
    CHECK(c[2] < c[1]);
    CHECK(std::log10(c[1] / c[2]) > 0.5 - tw0.kappa - 0.05);
}

TEST_CASE("truncation refinement") {
    auto s = SewingConfig::make(tau0, w0, std::polar(2e-2, 0.7));
    std::vector<cplx> v;
    for (int N : {2, 6, 10, 14}) v.push_back(s2_eval(xa, yb, s, tw0, N, 128).value);
    CHECK(std::abs(v[2] - v[1]) < std::abs(v[1] - v[0]));
    CHECK(std::abs(v[3] - v[2]) < std::abs(v[2] - v[1]));
    KernelEval e = s2_eval(xa, yb, s, tw0, 6, 64);
    CHECK(e.N == 6);
    CHECK(e.quad_M == 64);
    CHECK(e.branch.B == 1);
    CHECK(e.branch.rho_sheet == 0);
}

TEST_CASE("local singularity and a-cycle multiplier") {
    auto s = SewingConfig::make(tau0, w0, std::polar(1e-3, 0.7));
    Genus2Kernel g(s, tw0, 8, 64);
    for (double h : {1e-4, 1e-5}) {
        cplx y = xa + cplx(h, -h);
        CHECK(std::abs((xa - y) * g.eval(xa, y).value - 1.0) < 10.0 * h);
    }
    const cplx x(-0.2, -2.9);
    cplx r1 = g.eval(x, yb).value / g.eval(x - two_pi_i, yb).value;
    cplx r2 = g.eval(x, yb + 0.3).value / g.eval(x - two_pi_i, yb + 0.3).value;
    CHECK(rel(r1, tw0.phi1()) < 1e-8);
    CHECK(rel(r2, r1) < 1e-8);
}

TEST_CASE("branch coherence in B") {
    auto s = SewingConfig::make(tau0, w0, std::polar(1e-2, 0.7));
    TwistConfig t4 = tw0;
    t4.B = 5;
    CHECK(rel(s2_eval(xa, yb, s, t4, 8, 64).value, s2_eval(xa, yb, s, tw0, 8, 64).value) < 1e-13);
    // B -> B + 2 is compensated by a rho^{1/2} sheet flip at kappa = 0
    TwistConfig u = tw0, u2 = tw0;
    u.kappa = u2.kappa = 0.0;
    u2.B = 3;
    auto flipped = SewingConfig::make(tau0, w0, std::polar(1e-2, 0.7), 1);
    CHECK(rel(s2_eval(xa, yb, flipped, u2, 8, 64).value, s2_eval(xa, yb, s, u, 8, 64).value) < 1e-13);
}

TEST_CASE("sewing multiplier condition") {
    auto s = SewingConfig::make(tau0, w0, std::polar(1e-3, 0.7));
    Genus2Kernel g8(s, tw0, 8, 128), g12(s, tw0, 12, 128);
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double inner = std::abs(s.rho) / s.r1;
    for (int i = 0; i < 4; ++i) {
        const int a = 1 + i % 2;
        double rad = std::exp(std::log(inner) + (std::log(s.radius(a)) - std::log(inner)) * (0.3 + 0.4 * u(gen)));
        cplx za = std::polar(rad, 2.0 * pi * u(gen));
        cplx y(-1.0 + 0.3 * u(gen), 0.6 + 0.3 * u(gen));
        SewingResidual r8 = sewing_multiplier_residual(a, za, y, g8), r12 = sewing_multiplier_residual(a, za, y, g12);
        CHECK(r12.residual < 1e-8);
        CHECK(r12.residual <= r8.residual + 1e-14);
        CHECK(r12.residual_alt > 1e-3);
        CHECK(r12.exponent == (a == 1 ? -1 : 1));
    }
    CHECK_THROWS_AS(sewing_multiplier_residual(1, cplx(2.0 * s.r1, 0.0), yb, g8), DomainError);
}

TEST_CASE("excised disks") {
    auto s = SewingConfig::make(tau0, w0, std::polar(1e-3, 0.7));
    Genus2Kernel g(s, tw0, 4, 64);
    CHECK_THROWS_AS(g.eval(cplx(1e-4, 0.0), yb), DomainError);
    CHECK_THROWS_AS(g.eval(xa, w0 + 1e-4), DomainError);
}

TEST_CASE("domain check") {
    DomainReport ok = domain_check(SewingConfig::make(I, pi * I, 1e-4));
    CHECK(ok.ok);
    CHECK(ok.distance == doctest::Approx(pi));
    CHECK(ok.bound == doctest::Approx(2e-2));
    CHECK_FALSE(domain_check(SewingConfig::make(I, pi * I, 0.0)).ok);
    SewingConfig zero(Tau(I), 0.0, 1e-4, 0.1, 0.1);
    DomainReport bad = domain_check(zero);
    CHECK_FALSE(bad.ok);
    CHECK(std::abs(bad.worst_lambda) < 1e-12);
    CHECK_FALSE(bad.message.empty());
}

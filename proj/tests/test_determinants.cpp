#include <random>

#include "doctest.h"
#include "sewkernel/genus2_szego.hpp"

using namespace sewkernel;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const TwistConfig tw0{0.21, -0.13, 0.17, 0.23, 1};

MatrixXc random_matrix(int n, double scale, std::mt19937& gen) {
    std::normal_distribution<double> g(0.0, scale);
    MatrixXc m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(gen), g(gen));
    return m;
}

}  // namespace

TEST_CASE("det of the zero matrix is one") {
    MatrixXc z = MatrixXc::Zero(4, 4);
    for (auto m : {DetMethod::trace_log, DetMethod::lu, DetMethod::automatic}) CHECK(det_I_minus(z, m).value == cplx(1.0));
}

TEST_CASE("trace-log and LU agree on T") {
    int count = 0;
    for (cplx tau : {cplx(0.0, 1.0), cplx(0.25, 1.4)})
        for (cplx w : {cplx(1.1, 2.7), cplx(-0.8, 3.3)})
            for (double r : {1e-2, 1e-3}) {
                auto s = SewingConfig::make(tau, w, std::polar(r, 0.4));
                BlockMatrix T = build_T(8, s, tw0, 64);
                DetResult a = det_I_minus(T, DetMethod::trace_log), b = det_I_minus(T, DetMethod::lu);
                CHECK(rel(a.value, b.value) < 1e-9);
                CHECK(std::abs(b.value) > 0.0);
                CHECK(a.method == DetMethod::trace_log);
                CHECK(a.est_error >= 0.0);
                ++count;
            }
    CHECK(count == 8);
}

TEST_CASE("trace-log refuses spectral radius >= 1") {
    MatrixXc m = 2.0 * MatrixXc::Identity(3, 3);
    CHECK_THROWS_AS(det_I_minus(m, DetMethod::trace_log), MethodError);
    DetResult r = det_I_minus(m, DetMethod::automatic);
    CHECK(r.method == DetMethod::lu);
    CHECK(std::abs(r.value + 1.0) < 1e-14);
    CHECK(spectral_radius(m) == doctest::Approx(2.0));
}

TEST_CASE("det(I - T) tends to one along rays") {
    // the leading correction is O(|rho|^{1/2 - |kappa|}) from the (1,1) diagonal entries
    for (double arg : {0.0, 1.3, -2.2}) {
        double prev = 1.0;
        std::vector<double> devs;
        for (double r : {1e-2, 1e-3, 1e-4}) {
            auto s = SewingConfig::make(cplx(0.1, 1.1), cplx(1.3, 2.9), std::polar(r, arg));
            double d = std::abs(det_I_minus(build_T(8, s, tw0, 64)).value - 1.0);
            CHECK(d < prev);
            prev = d;
            devs.push_back(d);
        }
        double order = std::log10(devs[1] / devs[2]);
        CHECK(order > 0.5 - tw0.kappa - 0.05);
    }
}

TEST_CASE("bosonic R") {
    auto s = SewingConfig::make(cplx(0.1, 1.1), cplx(1.3, 2.9), std::polar(1e-3, 0.7));
    BlockMatrix R = build_R(6, s);
    for (int k = 1; k <= 6; ++k)
        for (int l = 1; l <= 6; ++l) {
            CHECK(R(1, k, 2, l) == R(2, k, 1, l));
            if ((k + l) % 2) CHECK(std::abs(R(1, k, 2, l)) < 1e-15);
            cplx expect = -s.rho_pow(0.5 * (k + l)) / std::sqrt(double(k * l)) * binomial_factor(k, l) *
                          eisenstein(k + l + ((k + l) % 2), s.tau);
            if ((k + l) % 2 == 0) CHECK(rel(R(1, k, 2, l), expect) < 1e-12);
        }
    CHECK(rel(R(1, 2, 1, 3), -s.rho_pow(2.5) / std::sqrt(6.0) * binomial_factor(2, 3) * weierstrass_P(5, s.w, s.tau)) < 1e-12);
    CHECK(binomial_factor(2, 3) == doctest::Approx(-12.0));
    CHECK(std::isfinite(binomial_factor(120, 130)));
    auto tiny = SewingConfig::make(cplx(0.1, 1.1), cplx(1.3, 2.9), std::polar(1e-12, 0.7));
    CHECK(build_R(6, tiny).m.norm() < 1e-10);
}

TEST_CASE("det(1 - R)^{-1/2}") {
    auto s = SewingConfig::make(cplx(0.1, 1.1), cplx(1.3, 2.9), std::polar(2e-2, 0.7));
    cplx v = det_inv_sqrt_I_minus_R(10, s);
    cplx d = det_I_minus(build_R(10, s)).value;
    CHECK(std::abs(v * v * d - 1.0) < 1e-10);
    double prev = 1.0;
    for (int N : {2, 4, 6, 8}) {
        double diff = std::abs(det_inv_sqrt_I_minus_R(N, s) - det_inv_sqrt_I_minus_R(N + 4, s));
        CHECK(diff < prev);
        prev = diff;
    }
    auto tiny = SewingConfig::make(cplx(0.1, 1.1), cplx(1.3, 2.9), std::polar(1e-14, 0.7));
    CHECK(std::abs(det_inv_sqrt_I_minus_R(6, tiny) - 1.0) < 1e-12);
}

TEST_CASE("minor expansion") {
    std::mt19937 gen(11);
    for (int n = 1; n <= 8; ++n) {
        MatrixXc R = random_matrix(n, 0.5, gen);
        cplx direct = (MatrixXc::Identity(n, n) + R).determinant();
        CHECK(rel(minor_expansion_det(R), direct) < 1e-10);
    }
    CHECK(minor_expansion_det(MatrixXc(0, 0)) == cplx(1.0));
    MatrixXc S = random_matrix(2, 1.0, gen);
    MatrixXc R = random_matrix(5, 0.3, gen);
    MatrixXc Uw(2, 5), V(5, 2);
    std::normal_distribution<double> g;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 5; ++j) {
            Uw(i, j) = cplx(g(gen), g(gen));
            V(j, i) = cplx(g(gen), g(gen));
        }
    MatrixXc full(7, 7);
    full << S, Uw, V, MatrixXc::Identity(5, 5) + R;
    CHECK(rel(minor_expansion_det(S, Uw, V, R), full.determinant()) < 1e-10);
    CHECK(rel(minor_expansion_det(S, MatrixXc(2, 0), MatrixXc(0, 2), MatrixXc(0, 0)), S.determinant()) < 1e-14);
    CHECK_THROWS_AS(minor_expansion_det(random_matrix(13, 0.1, gen)), DomainError);
}

TEST_CASE("bordered determinant factorizes into det S2 det(I - T)") {
    auto s = SewingConfig::make(cplx(0.1, 1.1), cplx(1.3, 2.9), std::polar(1e-2, 0.7));
    const int N = 6;
    Genus2Kernel g2(s, tw0, N, 64);
    std::vector<cplx> xs{cplx(0.7, -1.0), cplx(-0.5, 1.6)}, ys{cplx(2.4, 0.3), cplx(-1.2, -0.9)};
    const int n = 2;
    MatrixXc Sk(n, n), S2(n, n), U(n, 2 * N), V(2 * N, n);
    VectorXc Dth(2 * N);
    for (int k = 0; k < N; ++k) {
        Dth(k) = 1.0 / tw0.theta2();
        Dth(N + k) = -tw0.theta2();
    }
    for (int i = 0; i < n; ++i) {
        VectorXc h = g2.h(xs[i]);
        U.row(i) = (-tw0.xi() * h.cwiseProduct(Dth)).transpose();
        V.col(i) = g2.hbar(ys[i]);
        for (int j = 0; j < n; ++j) {
            Sk(i, j) = g2.kernel().s_kappa(xs[i], ys[j]);
            S2(i, j) = g2.eval(xs[i], ys[j]).value;
        }
    }
    cplx lhs = minor_expansion_det(Sk, U, V, -g2.T().m);
    cplx rhs = S2.determinant() * det_I_minus(g2.T()).value;
    CHECK(rel(lhs, rhs) < 1e-8);
}

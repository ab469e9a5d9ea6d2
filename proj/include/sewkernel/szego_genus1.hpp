#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sewkernel/elliptic_core.hpp"

namespace sewkernel {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

struct TwistConfig {
    double alpha1 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double kappa = 0.0;  // in (-1/2, 1/2)
    int B = 1;           // odd

    void validate() const;
    Characteristic char1() const { return {alpha1, beta1}; }
    cplx theta1() const;
    cplx phi1() const;
    cplx theta2() const;
    cplx phi2() const;
    cplx xi() const;  // e^{i pi B / 2}
};

// A sewing point (tau, w, rho) with quadrature radii. Powers rho^s are taken with
// log rho = Log rho + 2 pi i rho_sheet, fixed once per configuration. kappa_branch shifts
// the constant of the kappa-power near w by 2 pi i kappa_branch.
struct SewingConfig {
    Tau tau;
    cplx w;
    cplx rho;
    double r1;
    double r2;
    int rho_sheet = 0;
    int kappa_branch = 0;

    SewingConfig(const Tau& t, cplx w_, cplx rho_, double r1_, double r2_, int sheet = 0);

    // Throws DomainError unless (tau, w, rho) lies in the sewing domain and the radii are
    // admissible: r_a < D(q)/2, |rho| <= r1 r2, r1 + r2 < |w - lambda*|.
    void validate() const;

    // Default radii 0.45 min(|w - lambda*|, D(q)).
    static SewingConfig make(cplx tau, cplx w, cplx rho, int sheet = 0);
    static double default_radius(const Tau& t, cplx w);

    cplx log_rho() const;
    cplx rho_pow(double s) const { return std::exp(s * log_rho()); }
    double radius(int a) const { return a == 1 ? r1 : r2; }
    cplx center(int a) const { return a == 1 ? cplx(0.0) : w; }
};

// Bar involution on labels: 1 <-> 2.
inline int bar(int a) { return 3 - a; }
// (-1)^a
inline double sgn(int a) { return a % 2 ? -1.0 : 1.0; }
// k_a = k + kappa (-1)^{bar a}
inline double shifted_index(int a, int k, double kappa) { return double(k) + kappa * sgn(bar(a)); }

// Truncation of a doubly indexed matrix, flattened as (a=1,k=1..N) then (a=2,k=1..N).
struct BlockMatrix {
    int N = 0;
    MatrixXc m;

    BlockMatrix() = default;
    explicit BlockMatrix(int n) : N(n), m(MatrixXc::Zero(2 * n, 2 * n)) {}
    int index(int a, int k) const { return (a - 1) * N + (k - 1); }
    cplx& operator()(int a, int k, int b, int l) { return m(index(a, k), index(b, l)); }
    cplx operator()(int a, int k, int b, int l) const { return m(index(a, k), index(b, l)); }
};

// Evaluator for S_kappa with constants cached for one (sew, tw) pair.
//
// The kappa-power is written f(x)/f(y) with f = exp(kappa L), L a logarithm of
// theta_1(x - w)/theta_1(x). Near the puncture c_a, L = (-1)^a Log z_a + A_a(z_a) with
// z_a the local coordinate and A_a analytic; the constant in A_2 is fixed by continuity of
// L along the straight segment from 0 to w. Points outside both disks use the form of the
// nearer puncture, with A_a continued along the ray from c_a.
class KappaKernel {
public:
    KappaKernel(const SewingConfig& sew, const TwistConfig& tw, const SeriesBudget& b = {});

    const SewingConfig& sew() const { return sew_; }
    const TwistConfig& tw() const { return tw_; }
    const SeriesBudget& budget() const { return b_; }

    // theta[a1;b1](z + kappa w)/(theta[a1;b1](kappa w) K(z))
    cplx P(cplx z) const;
    // A_a(z) for local coordinate z around puncture a
    cplx A(int a, cplx z) const;
    // Branch-fixed logarithm L(x)
    cplx L(cplx x) const;
    cplx s_kappa(cplx x, cplx y) const;
    // S_kappa(x, y) x_{xd}^{-kappa (-1)^{xd}} y_{yd}^{kappa (-1)^{yd}} in local coordinates
    cplx s_regular(cplx xc, cplx yc, int x_disk, int y_disk) const;
    // exp(kappa A_a) at M equally spaced points of the circle |z_a| = r
    std::vector<cplx> F_circle(int a, double r, int M) const;

    void check_point(cplx x) const;

    // log rho + A_2(0) - A_1(0), a logarithm of -rho/K(w)^2 fixed by the branch data
    cplx log_ratio() const;

private:
    cplx G(int a, cplx z) const;

    SewingConfig sew_;
    TwistConfig tw_;
    SeriesBudget b_;
    double D_;
    cplx theta_kw_;
    cplx theta1p0_;
    cplx A0_[2];
};

cplx s_kappa(cplx x, cplx y, const SewingConfig& sew, const TwistConfig& tw, const SeriesBudget& b = {});

// x_disk plays the role of the label bar(a) and y_disk that of b in the local expansion.
cplx s_kappa_regular(cplx x_coord, cplx y_coord, int x_disk, int y_disk, const SewingConfig& sew,
                     const TwistConfig& tw, const SeriesBudget& b = {});

// All moments C_ab(k,l), k,l <= N, by a double trapezoid sum on M points per circle.
BlockMatrix moment_C_all(int N, const KappaKernel& kk, int quad_M);
cplx moment_C(int a, int b, int k, int l, const SewingConfig& sew, const TwistConfig& tw, int quad_M,
              const SeriesBudget& bud = {});

enum class HalfDiffSide { d, dbar };

// d_a(x,k) or dbar_a(y,k) for k = 1..N at once. radius <= 0 picks the default contour.
VectorXc half_diff_all(HalfDiffSide side, int a, cplx point, int N, const KappaKernel& kk, int quad_M,
                       double radius = 0.0);
cplx half_diff(HalfDiffSide side, int a, cplx point, int k, const SewingConfig& sew,
               const TwistConfig& tw, int quad_M, const SeriesBudget& b = {});

// T = xi G D^{theta_2} with G_ab(k,l) = rho^{(k_a + l_b - 1)/2} C_ab(k,l).
BlockMatrix build_T(int N, const KappaKernel& kk, int quad_M);
BlockMatrix build_T(int N, const SewingConfig& sew, const TwistConfig& tw, int quad_M,
                    const SeriesBudget& b = {});
BlockMatrix T_from_C(const BlockMatrix& C, const SewingConfig& sew, const TwistConfig& tw);

}  // namespace sewkernel

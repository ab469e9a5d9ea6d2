#pragma once

#include <string>

#include "sewkernel/determinants.hpp"

namespace sewkernel {

struct BranchRecord {
    int rho_sheet = 0;
    int B = 1;
};

struct KernelEval {
    cplx value;
    int N = 0;
    int quad_M = 0;
    BranchRecord branch;
};

// S^(2)(x, y) = S_kappa(x, y) + xi h(x) D^{theta_2} (I - T)^{-1} hbar(y)^T with
// h_a(x,k) = rho^{(k_a - 1/2)/2} d_a(x,k) and hbar likewise. The factorization of I - T is
// built once per instance. N = 0 gives S_kappa.
class Genus2Kernel {
public:
    Genus2Kernel(const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b = {});

    KernelEval eval(cplx x, cplx y) const;
    VectorXc h(cplx x) const;
    VectorXc hbar(cplx y) const;

    const KappaKernel& kernel() const { return kk_; }
    const BlockMatrix& T() const { return T_; }
    int N() const { return N_; }
    int quad_M() const { return M_; }
    BranchRecord branch() const { return {kk_.sew().rho_sheet, kk_.tw().B}; }

    // Throws DomainError if x lies in an excised disk |z_a| <= |rho|/r_abar.
    void check_surface_point(cplx x) const;

private:
    VectorXc h_impl(HalfDiffSide side, cplx p) const;

    KappaKernel kk_;
    int N_;
    int M_;
    BlockMatrix T_;
    Eigen::PartialPivLU<MatrixXc> lu_;
    VectorXc Dtheta_;
};

KernelEval s2_eval(cplx x, cplx y, const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M,
                   const SeriesBudget& b = {});

struct SewingResidual {
    double residual = 0.0;      // exponent a - abar
    double residual_alt = 0.0;  // exponent abar - a
    int exponent = 0;           // the exponent giving the smaller residual
    int winding = 0;            // n with Log z_a + Log z_abar = log rho + 2 pi i n
    cplx lhs;                   // S^(2)(x_a, y) J
    cplx rhs;                   // S^(2)(x_abar, y)
};

// Compares S^(2)(x_a, y) J with -theta_2^{a - abar} e^{2 pi i kappa n (-1)^a} S^(2)(x_abar, y) where
// z_a z_abar = rho, J = (-1)^abar xi rho^{1/2}/z_abar and n is the winding of the principal
// logarithms. Residuals are normalized by |S^(2)(x_abar, y)|.
SewingResidual sewing_multiplier_residual(int a, cplx x_a_coord, cplx y, const Genus2Kernel& g2);
SewingResidual sewing_multiplier_residual(int a, cplx x_a_coord, cplx y, const SewingConfig& sew,
                                          const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b = {});

struct DomainReport {
    bool ok = false;
    cplx worst_lambda;   // lattice point closest to w
    double distance = 0; // |w - worst_lambda|
    double bound = 0;    // 2 |rho|^{1/2}
    std::string message;
};

// |w - lambda| > 2|rho|^{1/2} > 0 over all lattice points with |lambda| <= |w| + 2|rho|^{1/2} + diameter.
DomainReport domain_check(const SewingConfig& sew);

}  // namespace sewkernel

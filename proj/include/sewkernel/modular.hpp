#pragma once

#include <string>
#include <vector>

#include "sewkernel/partition.hpp"

namespace sewkernel {

using Mat4 = std::array<std::array<long, 4>, 4>;

enum class Generator { A, B, C, S, T };

struct Letter {
    Generator gen;
    bool inverse = false;
};

// A word in the generators of L = H x| Gamma_1 with its cached Sp(4, Z) matrix. The word
// g_1 g_2 ... g_n acts on points and twists by applying g_n first.
class GroupElement {
public:
    GroupElement() = default;
    explicit GroupElement(std::vector<Letter> word);

    // Uppercase letters are generators, lowercase their inverses, e.g. "ABab" or "S".
    static GroupElement parse(const std::string& word);
    static GroupElement heisenberg(long a, long b, long c);

    const std::vector<Letter>& word() const { return word_; }
    const Mat4& matrix() const { return matrix_; }
    std::string str() const;

    GroupElement operator*(const GroupElement& o) const;
    GroupElement inverse() const;

private:
    std::vector<Letter> word_;
    Mat4 matrix_{};
};

Mat4 letter_matrix(const Letter& l);
Mat4 mat4_identity();
Mat4 mat4_mul(const Mat4& x, const Mat4& y);
bool is_symplectic(const Mat4& m);

// mu(a,b,c) embedded in Sp(4, Z)
Mat4 heisenberg_matrix(long a, long b, long c);
// gamma_1 = (a1 b1; c1 d1) embedded in Sp(4, Z)
Mat4 gamma1_matrix(long a1, long b1, long c1, long d1);

// A point of the covering space. lhat = Log(-rho/K(w)^2) + 2 pi i m. rho_sheet selects the
// branch of rho^{1/2} entering the sewing, so that the lifted determinant is single valued.
struct LiftedPoint {
    cplx tau;
    cplx w;
    cplx rho;
    int m = 0;
    int rho_sheet = 0;

    cplx lhat(const SeriesBudget& b = {}) const;
    SewingConfig sewing() const;
};

LiftedPoint lift(cplx tau, cplx w, cplx rho);

// Throws DomainError if the image leaves the sewing domain.
LiftedPoint act_point(const GroupElement& g, const LiftedPoint& p, const SeriesBudget& b = {});
TwistConfig act_twist(const GroupElement& g, const TwistConfig& tw);
// Generator values composed along the word as a cocycle.
cplx chi_multiplier(const GroupElement& g, const TwistConfig& tw);

// Branch data making log rho + A_2(0) - A_1(0) equal lhat.
SewingConfig lifted_sewing(const LiftedPoint& p, const TwistConfig& tw, const SeriesBudget& b = {});

// det(I - T) on the lifted branch.
cplx lifted_det(const LiftedPoint& p, const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b = {});

// e^{2 pi i beta2 kappa} exp(kappa^2 lhat/2) (1/eta) theta[alpha1;beta1](kappa w) det(I - T)
cplx z2_lifted(const LiftedPoint& p, const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b = {});

struct InvarianceResult {
    double residual = 0.0;      // |Z(g.tw)(g.p)/(chi Z(tw)(p)) - 1|
    double det_residual = 0.0;  // |det(I - T)(g.p)/det(I - T)(p) - 1|
    cplx chi;
    cplx ratio;                 // Z(g.tw)(g.p)/Z(tw)(p)
};

// chi_scale multiplies chi, for fault injection.
InvarianceResult invariance_residual(const GroupElement& g, const LiftedPoint& p, const TwistConfig& tw, int N,
                                     int quad_M, const SeriesBudget& b = {}, double chi_scale = 1.0);

}  // namespace sewkernel

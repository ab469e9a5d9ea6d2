#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sewkernel/genus2_szego.hpp"

namespace sewkernel {

// (beta_i, z_i) insertion pairs
using InsertionList = std::vector<std::pair<cplx, cplx>>;

enum class ChargeMode { strict, lenient };

// q^{alpha^2/2}/eta exp(alpha sum beta_i z_i) prod_{r<s} K(z_r - z_s)^{beta_r beta_s}, principal powers.
// A nonzero charge sum throws in strict mode and returns 0 in lenient mode.
cplx z1_alpha_npoint(cplx alpha, const InsertionList& ins, const Tau& tau, const SeriesBudget& b = {},
                     ChargeMode mode = ChargeMode::strict);

// theta[alpha1;beta1](kappa w)/(eta K(w)^{kappa^2}), principal power of K.
cplx z1_twisted_2pt(const SewingConfig& sew, const TwistConfig& tw, const SeriesBudget& b = {});

// z1_twisted_2pt det[S_kappa(x_i, y_j)]
cplx gen1_form(const std::vector<cplx>& xs, const std::vector<cplx>& ys, const SewingConfig& sew,
               const TwistConfig& tw, const SeriesBudget& b = {});

// |LHS/RHS - 1| of theta(sum(x - y))/theta(0) prod_{i<j} K(x_i - x_j) K(y_j - y_i)/prod K(x_i - y_j) = det P_1(x_i - y_j).
double frobenius_residual(const std::vector<cplx>& xs, const std::vector<cplx>& ys, const Characteristic& c,
                          const Tau& tau, const SeriesBudget& b = {});

struct FockLabel {
    std::vector<int> k;
    std::vector<int> l;

    void validate() const;
    int s() const { return int(k.size()); }
    int t() const { return int(l.size()); }
    double wt() const;
    double twisted_wt(double kappa) const { return wt() + kappa * (s() - t()) + 0.5 * kappa * kappa; }
};

inline constexpr double max_fock_weight = 6.0;

// Labels with twisted weight <= W, ordered by twisted weight, then (s, t, k, l) lexicographically.
std::vector<FockLabel> enumerate_labels(double W, double kappa);

// (-1)^{(t1+s2) t2 + floor(p/2)} e^{i pi B kappa (s2 - t1)}
cplx fock_epsilon(int s1, int s2, int t1, int t2, int B, double kappa);
// (-1)^{s2 t2 + floor(p/2)} e^{-i pi B kappa (s2 - t1)}
cplx fock_epsilon_hat(int s1, int s2, int t1, int t2, int B, double kappa);

// det C_ab(k_a, l_b) with rows (k1, k2) and columns (l1, l2); modes must be <= C.N.
cplx block_minor_det(const BlockMatrix& C, const std::vector<int>& k1, const std::vector<int>& k2,
                     const std::vector<int>& l1, const std::vector<int>& l2);

// epsilon Z det C_ab(k_a, l_b) for the pair Psi_kappa[k1, l2], Psi_-kappa[k2, l1].
cplx fock_2pt(const FockLabel& label1, const FockLabel& label2, const BlockMatrix& C, cplx Z1, const TwistConfig& tw);
cplx fock_2pt(const FockLabel& label1, const FockLabel& label2, const SewingConfig& sew, const TwistConfig& tw,
              int N, int quad_M, const SeriesBudget& b = {});

// e^{2 pi i beta2 kappa} (e^{i pi B} rho)^{kappa^2/2} z1_twisted_2pt det(I - T)
cplx z2_fermionic(const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b = {});

// Sum over labels with twisted weight <= W of
// e^{2 pi i beta2 kappa} (-theta2)^{t-s} eps_1 rho^{wt[Psi_kappa]} fock_2pt(Psi[k,l], Psi[l,k]).
cplx fock_sum_oracle(double W, const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M,
                     const SeriesBudget& b = {});

// (-1)^{st + floor(wt)} e^{i pi B wt[Psi_kappa]}
cplx fock_epsilon1(const FockLabel& label, int B, double kappa);
// (-1)^{t + st + floor(p/2)} e^{i pi B kappa (t - s)}
cplx fock_epsilon2(const FockLabel& label, int B, double kappa);

// (1/eta) det(1 - R)^{-1/2}
cplx z2_heisenberg(const SewingConfig& sew, int N, const SeriesBudget& b = {});

// e^{i pi (mu^2 O11 + 2 mu nu O12 + nu^2 O22)} z2_heisenberg
cplx z2_mu_nu(cplx mu, cplx nu, const Mat2& Omega, const SewingConfig& sew, int N, const SeriesBudget& b = {});

// theta^(2)[(alpha1, kappa); (beta1, beta2)](Omega) z2_heisenberg
cplx z2_theta_form(const Mat2& Omega, const SewingConfig& sew, const TwistConfig& tw, int N,
                   const SeriesBudget& b = {});

struct TripleProductResult {
    double residual = 0.0;       // exact form if Omega is given, else the leading-order form
    double leading_order = 0.0;  // |det(I - T) det(I - R)^{1/2} - 1|
    cplx det_T;
    cplx det_R_sqrt;
};

TripleProductResult triple_product_residual(const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M,
                                            const SeriesBudget& b = {}, const std::optional<Mat2>& Omega = {});

// z2_fermionic det[S^(2)(x_i, y_j)]
cplx gen2_form(const std::vector<cplx>& xs, const std::vector<cplx>& ys, const SewingConfig& sew,
               const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b = {});

}  // namespace sewkernel

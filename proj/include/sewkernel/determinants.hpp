#pragma once

#include "sewkernel/szego_genus1.hpp"

namespace sewkernel {

// The requested determinant method does not apply (trace-log with spectral radius >= 1).
class MethodError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DetMethod { trace_log, lu, automatic };

struct DetResult {
    cplx value;
    int N = 0;
    DetMethod method = DetMethod::lu;
    double est_error = 0.0;
};

double spectral_radius(const MatrixXc& M);

// det(I - M). trace_log sums -Tr M^n/n until a term drops below 1e-14 of the running sum
// (at most 200 terms); automatic tries trace_log and falls back to lu.
DetResult det_I_minus(const MatrixXc& M, DetMethod method = DetMethod::automatic);
DetResult det_I_minus(const BlockMatrix& M, DetMethod method = DetMethod::automatic);

// (-1)^{k+1} (k+l-1)!/((k-1)!(l-1)!), computed in log space.
double binomial_factor(int k, int l);

// R_ab(k,l) = -rho^{(k+l)/2}/sqrt(kl) [[D(k,l,w), C(k,l)], [C(k,l), D(l,k,w)]].
BlockMatrix build_R(int N, const SewingConfig& sew, const SeriesBudget& b = {});

// det(1 - R)^{-1/2}, the square root continued along rho s, s in [0,1], from the value 1.
cplx det_inv_sqrt_I_minus_R(int N, const SewingConfig& sew, const SeriesBudget& b = {});

inline constexpr int max_minor_dim = 12;

// det(I + R) as the sum of all principal minors of R.
cplx minor_expansion_det(const MatrixXc& R);
// det [[S, U], [V, I + R]] as the sum over bordered principal minors.
cplx minor_expansion_det(const MatrixXc& S, const MatrixXc& U, const MatrixXc& V, const MatrixXc& R);

}  // namespace sewkernel

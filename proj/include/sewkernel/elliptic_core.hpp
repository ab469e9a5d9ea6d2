#pragma once

#include <array>

#include "sewkernel/common.hpp"

namespace sewkernel {

struct Tau {
    cplx value;
    cplx q;  // e^{2 pi i tau}

    explicit Tau(cplx t);
};

struct Characteristic {
    double alpha = 0.0;
    double beta = 0.0;
};

struct SeriesBudget {
    int lattice_cutoff = 6;
    int qseries_cutoff = 64;
    double rel_tol = 1e-15;

    void validate() const;
};

// Maximum number of cutoff doublings in every adaptive series.
inline constexpr int max_doublings = 4;

// theta[alpha;beta](z|tau) = sum_n exp(i pi (n+alpha)^2 tau + (n+alpha)(z + 2 pi i beta)).
cplx theta_char_g1(const Characteristic& c, cplx z, const Tau& tau, const SeriesBudget& b = {});

// Same series with complex characteristics and optional z-derivative of given order.
cplx theta_char_g1(cplx alpha, cplx beta, cplx z, const Tau& tau, const SeriesBudget& b = {},
                   int deriv = 0);

// theta_1 = theta[1/2;1/2] and its derivatives.
cplx theta1(cplx z, const Tau& tau, const SeriesBudget& b = {}, int deriv = 0);

// K(z) = theta_1(z)/theta_1'(0).
cplx prime_form_K(cplx z, const Tau& tau, const SeriesBudget& b = {});

cplx dedekind_eta(const Tau& tau, const SeriesBudget& b = {});

// E_k for even k >= 2, normalized so that P_2(z) = 1/z^2 + sum_{k>=2} (k-1) E_k z^{k-2}.
cplx eisenstein(int k, const Tau& tau, const SeriesBudget& b = {});

// P_2 = wp + E_2 and P_{k+1} = -(1/k) d/dz P_k, by row-wise summation over the lattice
// 2 pi i (Z tau + Z).
cplx weierstrass_P(int k, cplx z, const Tau& tau, const SeriesBudget& b = {});

// Nearest lattice point to z and the minimal nonzero lattice length D(q).
cplx nearest_lattice_point(cplx z, const Tau& tau);
double lattice_min_length(const Tau& tau);

// Characteristic recovered from unit multipliers: -phi = e^{2 pi i alpha}, -theta = e^{-2 pi i beta},
// alpha in (-1/2, 1/2], beta in [-1/2, 1/2).
Characteristic characteristic_from_multipliers(cplx theta, cplx phi);

// Genus-one Szego kernel theta[a;b](z)/(theta[a;b](0) K(z)).
cplx twisted_P1(cplx theta, cplx phi, cplx z, const Tau& tau, const SeriesBudget& b = {});
cplx twisted_P1(const Characteristic& c, cplx z, const Tau& tau, const SeriesBudget& b = {});

using Mat2 = std::array<std::array<cplx, 2>, 2>;

// Genus-two theta constant with real characteristics at z = 0.
cplx theta_char_g2(const std::array<double, 2>& alpha, const std::array<double, 2>& beta,
                   const Mat2& Omega, const SeriesBudget& b = {});

}  // namespace sewkernel

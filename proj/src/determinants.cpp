#include "sewkernel/determinants.hpp"

#include <Eigen/Eigenvalues>
#include <cfloat>
#include <cmath>
#include <vector>

namespace sewkernel {

double spectral_radius(const MatrixXc& M) {
    if (M.rows() == 0) return 0.0;
    Eigen::ComplexEigenSolver<MatrixXc> es(M, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

DetResult det_lu(const MatrixXc& M) {
    const Eigen::Index n = M.rows();
    MatrixXc A = MatrixXc::Identity(n, n) - M;
    Eigen::PartialPivLU<MatrixXc> lu(A);
    DetResult r;
    r.value = lu.determinant();
    r.N = int(n);
    r.method = DetMethod::lu;
    double cond = n ? A.norm() * lu.inverse().norm() : 1.0;
    r.est_error = DBL_EPSILON * double(std::max<Eigen::Index>(n, 1)) * cond * std::abs(r.value);
    return r;
}

DetResult det_trace_log(const MatrixXc& M) {
    const Eigen::Index n = M.rows();
    double sr = spectral_radius(M);
    if (!(sr < 1.0)) throw MethodError("trace_log requires spectral radius < 1");
    cplx acc = 0.0;
    MatrixXc P = M;
    double last = 0.0;
    bool done = n == 0;
    for (int k = 1; k <= 200 && !done; ++k) {
        cplx t = P.trace() / double(k);
        acc -= t;
        last = std::abs(t);
        if (last <= 1e-14 * std::abs(acc)) done = true;
        if (!done) P = P * M;
    }
    if (!done) throw MethodError("trace_log series did not settle within 200 terms");
    DetResult r;
    r.value = std::exp(acc);
    r.N = int(n);
    r.method = DetMethod::trace_log;
    r.est_error = std::abs(r.value) * (last * sr / (1.0 - sr) + DBL_EPSILON * double(std::max<Eigen::Index>(n, 1)));
    return r;
}

}  // namespace

DetResult det_I_minus(const MatrixXc& M, DetMethod method) {
    if (M.rows() != M.cols()) throw DomainError("det_I_minus: matrix must be square");
    if (!M.allFinite()) throw DomainError("det_I_minus: non-finite entries");
    switch (method) {
    case DetMethod::trace_log:
        return det_trace_log(M);
    case DetMethod::lu:
        return det_lu(M);
    case DetMethod::automatic:
        try {
            return det_trace_log(M);
        } catch (const MethodError&) {
            return det_lu(M);
        }
    }
    return det_lu(M);
}

DetResult det_I_minus(const BlockMatrix& M, DetMethod method) {
    DetResult r = det_I_minus(M.m, method);
    r.N = M.N;
    return r;
}

double binomial_factor(int k, int l) {
    if (k < 1 || l < 1) throw DomainError("binomial_factor: k, l >= 1");
    double lg = std::lgamma(double(k + l)) - std::lgamma(double(k)) - std::lgamma(double(l));
    return (k % 2 ? 1.0 : -1.0) * std::exp(lg);
}

namespace {

// rho-independent part: R = -diag(rho^{k/2}) base diag(rho^{l/2})
MatrixXc R_base(int N, const SewingConfig& sew, const SeriesBudget& b) {
    if (N < 1) throw DomainError("build_R: N >= 1");
    std::vector<cplx> E(2 * N + 1, 0.0), Pw(2 * N + 1, 0.0);
    for (int m = 2; m <= 2 * N; ++m) {
        if (m % 2 == 0) E[m] = eisenstein(m, sew.tau, b);
        Pw[m] = weierstrass_P(m, sew.w, sew.tau, b);
    }
    MatrixXc base(2 * N, 2 * N);
    for (int k = 1; k <= N; ++k)
        for (int l = 1; l <= N; ++l) {
            double s = 1.0 / std::sqrt(double(k) * l);
            base(k - 1, l - 1) = s * binomial_factor(k, l) * Pw[k + l];
            base(k - 1, N + l - 1) = s * binomial_factor(k, l) * E[k + l];
            base(N + k - 1, l - 1) = s * binomial_factor(k, l) * E[k + l];
            base(N + k - 1, N + l - 1) = s * binomial_factor(l, k) * Pw[k + l];
        }
    return base;
}

MatrixXc scale_R(const MatrixXc& base, int N, cplx log_rho) {
    MatrixXc R(2 * N, 2 * N);
    for (int i = 0; i < 2 * N; ++i)
        for (int j = 0; j < 2 * N; ++j) {
            int k = i % N + 1, l = j % N + 1;
            R(i, j) = -std::exp(0.5 * double(k + l) * log_rho) * base(i, j);
        }
    return R;
}

}  // namespace

BlockMatrix build_R(int N, const SewingConfig& sew, const SeriesBudget& b) {
    BlockMatrix R(N);
    R.m = scale_R(R_base(N, sew, b), N, sew.log_rho());
    return R;
}

cplx det_inv_sqrt_I_minus_R(int N, const SewingConfig& sew, const SeriesBudget& b) {
    MatrixXc base = R_base(N, sew, b);
    const cplx lr = sew.log_rho();
    const Eigen::Index n = 2 * N;
    auto det_at = [&](double s) {
        if (s == 0.0) return cplx(1.0);
        MatrixXc A = MatrixXc::Identity(n, n) - scale_R(base, N, std::log(s) + lr);
        return A.partialPivLu().determinant();
    };
    cplx root = 1.0, prev = 1.0;
    double s0 = 0.0;
    const int steps = 16;
    for (int j = 1; j <= steps; ++j) {
        double s1 = double(j) / steps;
        cplx d = det_at(s1);
        int depth = 0;
        while (std::abs(std::arg(d / prev)) > 0.5) {
            if (++depth > 40) throw DomainError("det(1 - R) passes through zero on the ray");
            s1 = 0.5 * (s0 + s1);
            d = det_at(s1);
        }
        cplx r = std::sqrt(d);
        if (std::abs(r - root) > std::abs(r + root)) r = -r;
        root = r;
        prev = d;
        s0 = s1;
        if (s1 < double(j) / steps) --j;
    }
    if (root == 0.0) throw DomainError("det(1 - R) vanishes");
    return 1.0 / root;
}

namespace {

template <class F>
void for_each_subindex(int P, F&& f) {
    std::vector<int> m;
    for (unsigned mask = 0; mask < (1u << P); ++mask) {
        m.clear();
        for (int i = 0; i < P; ++i)
            if (mask & (1u << i)) m.push_back(i);
        f(m);
    }
}

}  // namespace

cplx minor_expansion_det(const MatrixXc& R) {
    if (R.rows() != R.cols()) throw DomainError("minor_expansion_det: square matrix required");
    const int P = int(R.rows());
    if (P > max_minor_dim) throw DomainError("minor_expansion_det: dimension exceeds 12");
    cplx total = 0.0;
    for_each_subindex(P, [&](const std::vector<int>& m) {
        const int p = int(m.size());
        if (p == 0) {
            total += 1.0;
            return;
        }
        MatrixXc sub(p, p);
        for (int r = 0; r < p; ++r)
            for (int s = 0; s < p; ++s) sub(r, s) = R(m[r], m[s]);
        total += sub.determinant();
    });
    return total;
}

cplx minor_expansion_det(const MatrixXc& S, const MatrixXc& U, const MatrixXc& V, const MatrixXc& R) {
    const Eigen::Index n = S.rows();
    const int P = int(R.rows());
    if (S.cols() != n || R.cols() != P || U.rows() != n || U.cols() != P || V.rows() != P || V.cols() != n)
        throw DomainError("minor_expansion_det: inconsistent block shapes");
    if (P > max_minor_dim) throw DomainError("minor_expansion_det: dimension exceeds 12");
    cplx total = 0.0;
    for_each_subindex(P, [&](const std::vector<int>& m) {
        const Eigen::Index p = Eigen::Index(m.size());
        MatrixXc sub(n + p, n + p);
        sub.topLeftCorner(n, n) = S;
        for (Eigen::Index r = 0; r < p; ++r) {
            for (Eigen::Index i = 0; i < n; ++i) {
                sub(i, n + r) = U(i, m[r]);
                sub(n + r, i) = V(m[r], i);
            }
            for (Eigen::Index s = 0; s < p; ++s) sub(n + r, n + s) = R(m[r], m[s]);
        }
        total += n + p == 0 ? cplx(1.0) : sub.determinant();
    });
    return total;
}

}  // namespace sewkernel

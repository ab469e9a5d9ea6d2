#include "sewkernel/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>

namespace sewkernel {

namespace {

int parity_sign(long n) { return n % 2 ? -1 : 1; }

cplx checked_theta(const Characteristic& c, cplx z, const Tau& tau, const SeriesBudget& b) {
    cplx v = theta_char_g1(c, z, tau, b);
    double majorant = theta_char_g1(cplx(c.alpha), cplx(0.0), cplx(z.real()), Tau(I * tau.value.imag()), b).real();
    if (std::abs(v) < 1e-12 * majorant) throw DegenerateCharacteristic("theta characteristic vanishes at the argument");
    return v;
}

void check_points(const std::vector<cplx>& xs, const std::vector<cplx>& ys) {
    if (xs.empty() || xs.size() != ys.size()) throw DomainError("point lists must be nonempty and of equal length");
}

cplx det_of(const MatrixXc& m) { return m.rows() == 0 ? cplx(1.0) : m.partialPivLu().determinant(); }

cplx z2_prefactor(const SewingConfig& sew, const TwistConfig& tw) {
    const double k2 = tw.kappa * tw.kappa;
    return std::exp(two_pi_i * tw.beta2 * tw.kappa + 0.5 * k2 * (I * pi * double(tw.B) + sew.log_rho()));
}

}  // namespace

cplx z1_alpha_npoint(cplx alpha, const InsertionList& ins, const Tau& tau, const SeriesBudget& b, ChargeMode mode) {
    b.validate();
    cplx charge = 0.0;
    double scale = 1.0;
    for (const auto& [beta, z] : ins) {
        charge += beta;
        scale += std::abs(beta);
    }
    if (std::abs(charge) > 1e-12 * scale) {
        if (mode == ChargeMode::strict) throw DomainError("insertion charges must sum to zero");
        return 0.0;
    }
    cplx log_v = I * pi * alpha * alpha * tau.value - std::log(dedekind_eta(tau, b));
    for (std::size_t r = 0; r < ins.size(); ++r) {
        log_v += alpha * ins[r].first * ins[r].second;
        for (std::size_t s = r + 1; s < ins.size(); ++s)
            log_v += ins[r].first * ins[s].first * std::log(prime_form_K(ins[r].second - ins[s].second, tau, b));
    }
    return std::exp(log_v);
}

cplx z1_twisted_2pt(const SewingConfig& sew, const TwistConfig& tw, const SeriesBudget& b) {
    tw.validate();
    b.validate();
    cplx th = checked_theta(tw.char1(), tw.kappa * sew.w, sew.tau, b);
    cplx K = prime_form_K(sew.w, sew.tau, b);
    return th / dedekind_eta(sew.tau, b) * std::exp(-tw.kappa * tw.kappa * std::log(K));
}

cplx gen1_form(const std::vector<cplx>& xs, const std::vector<cplx>& ys, const SewingConfig& sew,
               const TwistConfig& tw, const SeriesBudget& b) {
    check_points(xs, ys);
    KappaKernel kk(sew, tw, b);
    const int n = int(xs.size());
    MatrixXc m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = kk.s_kappa(xs[i], ys[j]);
    return z1_twisted_2pt(sew, tw, b) * det_of(m);
}

double frobenius_residual(const std::vector<cplx>& xs, const std::vector<cplx>& ys, const Characteristic& c,
                          const Tau& tau, const SeriesBudget& b) {
    check_points(xs, ys);
    const int n = int(xs.size());
    MatrixXc m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = twisted_P1(c, xs[i] - ys[j], tau, b);
    cplx sum = 0.0;
    for (int i = 0; i < n; ++i) sum += xs[i] - ys[i];
    cplx lhs = theta_char_g1(c, sum, tau, b) / theta_char_g1(c, 0.0, tau, b);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j)
            lhs *= prime_form_K(xs[i] - xs[j], tau, b) * prime_form_K(ys[j] - ys[i], tau, b);
        for (int j = 0; j < n; ++j) lhs /= prime_form_K(xs[i] - ys[j], tau, b);
    }
    return std::abs(lhs / det_of(m) - 1.0);
}

void FockLabel::validate() const {
    for (const auto* v : {&k, &l})
        for (std::size_t i = 0; i < v->size(); ++i)
            if ((*v)[i] < 1 || (i > 0 && (*v)[i] <= (*v)[i - 1]))
                throw DomainError("Fock label modes must be positive and strictly increasing");
}

double FockLabel::wt() const {
    double s = 0.0;
    for (int x : k) s += x - 0.5;
    for (int x : l) s += x - 0.5;
    return s;
}

std::vector<FockLabel> enumerate_labels(double W, double kappa) {
    if (!(W >= 0.0) || W > max_fock_weight) throw DomainError("Fock weight cutoff must lie in [0, 6]");
    if (!(std::abs(kappa) < 0.5)) throw DomainError("kappa must lie in (-1/2, 1/2)");
    const int kmax = int(W + 2.0);
    // subsets with sum(k - 1/2) + sign kappa |set| <= W
    auto subsets = [&](double shift) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur;
        std::function<void(int, double)> rec = [&](int start, double wt) {
            out.push_back(cur);
            for (int k = start; k <= kmax; ++k) {
                double nw = wt + k - 0.5 + shift;
                if (nw > W + 1e-12) break;
                cur.push_back(k);
                rec(k + 1, nw);
                cur.pop_back();
            }
        };
        rec(1, 0.0);
        return out;
    };
    auto ks = subsets(kappa), ls = subsets(-kappa);
    std::vector<FockLabel> labels;
    for (const auto& k : ks)
        for (const auto& l : ls) {
            FockLabel f{k, l};
            if (f.twisted_wt(kappa) <= W + 1e-12) labels.push_back(std::move(f));
        }
    std::sort(labels.begin(), labels.end(), [&](const FockLabel& a, const FockLabel& b) {
        double wa = a.twisted_wt(kappa), wb = b.twisted_wt(kappa);
        if (std::abs(wa - wb) > 1e-12) return wa < wb;
        return std::make_tuple(a.s(), a.t(), a.k, a.l) < std::make_tuple(b.s(), b.t(), b.k, b.l);
    });
    return labels;
}

cplx fock_epsilon(int s1, int s2, int t1, int t2, int B, double kappa) {
    const int p = s1 + s2;
    return double(parity_sign((t1 + s2) * t2 + p / 2)) * std::exp(I * pi * double(B) * kappa * double(s2 - t1));
}

cplx fock_epsilon_hat(int s1, int s2, int t1, int t2, int B, double kappa) {
    const int p = s1 + s2;
    return double(parity_sign(s2 * t2 + p / 2)) * std::exp(-I * pi * double(B) * kappa * double(s2 - t1));
}

cplx block_minor_det(const BlockMatrix& C, const std::vector<int>& k1, const std::vector<int>& k2,
                     const std::vector<int>& l1, const std::vector<int>& l2) {
    const int p = int(k1.size() + k2.size());
    if (p != int(l1.size() + l2.size())) throw DomainError("charge conservation requires s1 + s2 = t1 + t2");
    std::vector<std::pair<int, int>> rows, cols;
    for (int k : k1) rows.push_back({1, k});
    for (int k : k2) rows.push_back({2, k});
    for (int l : l1) cols.push_back({1, l});
    for (int l : l2) cols.push_back({2, l});
    for (const auto* v : {&rows, &cols})
        for (const auto& [a, k] : *v)
            if (k < 1 || k > C.N) throw DomainError("mode index exceeds the moment truncation");
    MatrixXc m(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) m(i, j) = C(rows[i].first, rows[i].second, cols[j].first, cols[j].second);
    return det_of(m);
}

cplx fock_2pt(const FockLabel& label1, const FockLabel& label2, const BlockMatrix& C, cplx Z1, const TwistConfig& tw) {
    label1.validate();
    label2.validate();
    const int s1 = label1.s(), t2 = label1.t(), s2 = label2.s(), t1 = label2.t();
    if (s1 + s2 == 0 && t1 + t2 == 0) return Z1;
    return fock_epsilon(s1, s2, t1, t2, tw.B, tw.kappa) * Z1 * block_minor_det(C, label1.k, label2.k, label2.l, label1.l);
}

cplx fock_2pt(const FockLabel& label1, const FockLabel& label2, const SewingConfig& sew, const TwistConfig& tw,
              int N, int quad_M, const SeriesBudget& b) {
    KappaKernel kk(sew, tw, b);
    return fock_2pt(label1, label2, moment_C_all(N, kk, quad_M), z1_twisted_2pt(sew, tw, b), tw);
}

cplx z2_fermionic(const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b) {
    KappaKernel kk(sew, tw, b);
    cplx det = det_I_minus(build_T(N, kk, quad_M)).value;
    return z2_prefactor(sew, tw) * z1_twisted_2pt(sew, tw, b) * det;
}

cplx fock_epsilon1(const FockLabel& label, int B, double kappa) {
    const int s = label.s(), t = label.t();
    const double wt = label.wt();
    return double(parity_sign(s * t + long(std::floor(wt + 1e-9)))) *
           std::exp(I * pi * double(B) * label.twisted_wt(kappa));
}

cplx fock_epsilon2(const FockLabel& label, int B, double kappa) {
    const int s = label.s(), t = label.t(), p = s + t;
    return double(parity_sign(t + s * t + p / 2)) * std::exp(I * pi * double(B) * kappa * double(t - s));
}

cplx fock_sum_oracle(double W, const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M,
                     const SeriesBudget& b) {
    auto labels = enumerate_labels(W, tw.kappa);
    for (const auto& f : labels)
        for (const auto* v : {&f.k, &f.l})
            if (!v->empty() && v->back() > N) throw DomainError("moment truncation N is too small for the weight cutoff");
    KappaKernel kk(sew, tw, b);
    const BlockMatrix C = moment_C_all(N, kk, quad_M);
    const cplx Z1 = z1_twisted_2pt(sew, tw, b);
    const cplx mtheta2 = -tw.theta2();
    const cplx lr = sew.log_rho();
    cplx sum = 0.0;
    for (const auto& f : labels) {
        FockLabel first{f.k, f.l}, second{f.l, f.k};
        cplx term = std::pow(mtheta2, f.t() - f.s()) * fock_epsilon1(f, tw.B, tw.kappa) *
                    std::exp(f.twisted_wt(tw.kappa) * lr);
        if (f.s() + f.t() == 0)
            term *= Z1;
        else
            term *= fock_2pt(first, second, C, Z1, tw);
        sum += term;
    }
    return std::exp(two_pi_i * tw.beta2 * tw.kappa) * sum;
}

cplx z2_heisenberg(const SewingConfig& sew, int N, const SeriesBudget& b) {
    return det_inv_sqrt_I_minus_R(N, sew, b) / dedekind_eta(sew.tau, b);
}

cplx z2_mu_nu(cplx mu, cplx nu, const Mat2& Omega, const SewingConfig& sew, int N, const SeriesBudget& b) {
    cplx e = I * pi * (mu * mu * Omega[0][0] + 2.0 * mu * nu * Omega[0][1] + nu * nu * Omega[1][1]);
    return std::exp(e) * z2_heisenberg(sew, N, b);
}

cplx z2_theta_form(const Mat2& Omega, const SewingConfig& sew, const TwistConfig& tw, int N, const SeriesBudget& b) {
    tw.validate();
    return theta_char_g2({tw.alpha1, tw.kappa}, {tw.beta1, tw.beta2}, Omega, b) * z2_heisenberg(sew, N, b);
}

TripleProductResult triple_product_residual(const SewingConfig& sew, const TwistConfig& tw, int N, int quad_M,
                                            const SeriesBudget& b, const std::optional<Mat2>& Omega) {
    TripleProductResult r;
    KappaKernel kk(sew, tw, b);
    r.det_T = det_I_minus(build_T(N, kk, quad_M)).value;
    r.det_R_sqrt = 1.0 / det_inv_sqrt_I_minus_R(N, sew, b);
    r.leading_order = std::abs(r.det_T * r.det_R_sqrt - 1.0);
    r.residual = r.leading_order;
    if (Omega) {
        cplx th2 = theta_char_g2({tw.alpha1, tw.kappa}, {tw.beta1, tw.beta2}, *Omega, b);
        cplx rhs = z2_prefactor(sew, tw) * z1_twisted_2pt(sew, tw, b) * dedekind_eta(sew.tau, b) * r.det_T *
                   r.det_R_sqrt;
        r.residual = std::abs(th2 / rhs - 1.0);
    }
    return r;
}

cplx gen2_form(const std::vector<cplx>& xs, const std::vector<cplx>& ys, const SewingConfig& sew,
               const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b) {
    check_points(xs, ys);
    Genus2Kernel g2(sew, tw, N, quad_M, b);
    const int n = int(xs.size());
    MatrixXc m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g2.eval(xs[i], ys[j]).value;
    cplx det = N > 0 ? det_I_minus(g2.T()).value : cplx(1.0);
    return z2_prefactor(sew, tw) * z1_twisted_2pt(sew, tw, b) * det * det_of(m);
}

}  // namespace sewkernel

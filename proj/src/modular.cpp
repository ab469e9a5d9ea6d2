#include "sewkernel/modular.hpp"

#include <cctype>
#include <cmath>

namespace sewkernel {

namespace {

struct Heis {
    long a, b, c;
};

bool is_heisenberg(Generator g) { return g == Generator::A || g == Generator::B || g == Generator::C; }

Heis heis_of(const Letter& l) {
    long s = l.inverse ? -1 : 1;
    switch (l.gen) {
        case Generator::A: return {s, 0, 0};
        case Generator::B: return {0, s, 0};
        default: return {0, 0, s};
    }
}

// (a1, b1, c1, d1)
std::array<long, 4> gamma_of(const Letter& l) {
    if (l.gen == Generator::S) return l.inverse ? std::array<long, 4>{0, -1, 1, 0} : std::array<long, 4>{0, 1, -1, 0};
    return l.inverse ? std::array<long, 4>{1, -1, 0, 1} : std::array<long, 4>{1, 1, 0, 1};
}

char letter_char(const Letter& l) {
    const char* names = "ABCST";
    char c = names[int(l.gen)];
    return l.inverse ? char(std::tolower(c)) : c;
}

TwistConfig twist_letter(const Letter& l, TwistConfig tw) {
    const double a1 = tw.alpha1, b1 = tw.beta1, k = tw.kappa;
    if (is_heisenberg(l.gen)) {
        auto [a, b, c] = heis_of(l);
        tw.alpha1 = a1 - double(a) * k;
        tw.beta1 = b1 - double(b) * k;
        tw.beta2 += double(a) * b1 - double(b) * a1 - double(c) * k + 0.5 * double(a * b - c);
    } else if (l.gen == Generator::S) {
        if (l.inverse) {
            tw.alpha1 = -b1;
            tw.beta1 = a1;
        } else {
            tw.alpha1 = b1;
            tw.beta1 = -a1;
        }
    } else {
        tw.beta1 = l.inverse ? b1 + a1 + 0.5 : b1 - a1 - 0.5;
    }
    return tw;
}

cplx chi_forward(const Letter& l, const TwistConfig& tw) {
    const double a1 = tw.alpha1, b1 = tw.beta1, k = tw.kappa;
    if (is_heisenberg(l.gen)) {
        auto [a, b, c] = heis_of(l);
        return std::exp(-two_pi_i * double(b) * a1 * k + I * pi * double(a * b - c) * k * (k + 1.0));
    }
    if (l.gen == Generator::S) return std::exp(-two_pi_i * a1 * b1);
    return std::exp(-I * pi * (a1 * a1 + a1 + 1.0 / 12.0));
}

cplx chi_letter(const Letter& l, const TwistConfig& tw) {
    if (is_heisenberg(l.gen) || !l.inverse) return chi_forward(l, tw);
    Letter fwd{l.gen, false};
    return 1.0 / chi_forward(fwd, twist_letter(l, tw));
}

int round_winding(cplx d, const char* what) {
    double n = d.imag() / (2.0 * pi);
    if (std::abs(d.real()) > 1e-6 || std::abs(n - std::round(n)) > 1e-6)
        throw DomainError(std::string(what) + " is not a lattice of 2 pi i");
    return int(std::lround(n));
}

int mod2(int n) { return ((n % 2) + 2) % 2; }

LiftedPoint point_letter(const Letter& l, const LiftedPoint& p, const SeriesBudget& bud) {
    LiftedPoint q = p;
    const cplx lh = p.lhat(bud);
    cplx lh_new;
    if (is_heisenberg(l.gen)) {
        auto [a, b, c] = heis_of(l);
        q.w = p.w + two_pi_i * (double(a) * p.tau + double(b));
        lh_new = lh + two_pi_i * double(a * a) * p.tau + 2.0 * double(a) * p.w + two_pi_i * double(a * b + c);
        q.rho_sheet = mod2(p.rho_sheet + int(a + b + a * b + c));
    } else {
        auto [a1, b1, c1, d1] = gamma_of(l);
        const cplx j = double(c1) * p.tau + double(d1);
        q.tau = (double(a1) * p.tau + double(b1)) / j;
        q.w = p.w / j;
        q.rho = p.rho / (j * j);
        lh_new = lh - double(c1) * p.w * p.w / (two_pi_i * j);
        cplx log_rho = std::log(p.rho) + two_pi_i * double(p.rho_sheet) - 2.0 * std::log(j);
        q.rho_sheet = mod2(round_winding(log_rho - std::log(q.rho), "rho continuation"));
    }
    q.m = 0;
    q.m = round_winding(lh_new - q.lhat(bud), "lhat update");
    return q;
}

}  // namespace

Mat4 mat4_identity() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1;
    return m;
}

Mat4 mat4_mul(const Mat4& x, const Mat4& y) {
    Mat4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) r[i][j] += x[i][k] * y[k][j];
    return r;
}

bool is_symplectic(const Mat4& m) {
    Mat4 J{};
    J[0][2] = J[1][3] = 1;
    J[2][0] = J[3][1] = -1;
    Mat4 mt{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) mt[i][j] = m[j][i];
    return mat4_mul(mat4_mul(mt, J), m) == J;
}

Mat4 heisenberg_matrix(long a, long b, long c) {
    Mat4 m = mat4_identity();
    m[0][3] = b;
    m[1][0] = a;
    m[1][2] = b;
    m[1][3] = c;
    m[2][3] = -a;
    return m;
}

Mat4 gamma1_matrix(long a1, long b1, long c1, long d1) {
    if (a1 * d1 - b1 * c1 != 1) throw DomainError("gamma_1 must have unit determinant");
    Mat4 m = mat4_identity();
    m[0][0] = a1;
    m[0][2] = b1;
    m[2][0] = c1;
    m[2][2] = d1;
    return m;
}

Mat4 letter_matrix(const Letter& l) {
    if (is_heisenberg(l.gen)) {
        auto [a, b, c] = heis_of(l);
        return heisenberg_matrix(a, b, c);
    }
    auto [a1, b1, c1, d1] = gamma_of(l);
    return gamma1_matrix(a1, b1, c1, d1);
}

GroupElement::GroupElement(std::vector<Letter> word) : word_(std::move(word)), matrix_(mat4_identity()) {
    for (const auto& l : word_) matrix_ = mat4_mul(matrix_, letter_matrix(l));
}

GroupElement GroupElement::parse(const std::string& word) {
    std::vector<Letter> letters;
    for (char ch : word) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        const std::string names = "ABCST";
        auto pos = names.find(char(std::toupper(static_cast<unsigned char>(ch))));
        if (pos == std::string::npos) throw DomainError(std::string("unknown generator '") + ch + "'");
        letters.push_back({Generator(pos), bool(std::islower(static_cast<unsigned char>(ch)))});
    }
    return GroupElement(std::move(letters));
}

GroupElement GroupElement::heisenberg(long a, long b, long c) {
    // mu(a,b,c) = C^{c + ab} B^b A^a
    std::vector<Letter> w;
    long cc = c + a * b;
    for (long i = 0; i < std::abs(cc); ++i) w.push_back({Generator::C, cc < 0});
    for (long i = 0; i < std::abs(b); ++i) w.push_back({Generator::B, b < 0});
    for (long i = 0; i < std::abs(a); ++i) w.push_back({Generator::A, a < 0});
    GroupElement g(std::move(w));
    if (g.matrix() != heisenberg_matrix(a, b, c)) throw DomainError("Heisenberg word does not match mu(a,b,c)");
    return g;
}

std::string GroupElement::str() const {
    std::string s;
    for (const auto& l : word_) s += letter_char(l);
    return s.empty() ? "1" : s;
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
    std::vector<Letter> w = word_;
    w.insert(w.end(), o.word_.begin(), o.word_.end());
    return GroupElement(std::move(w));
}

GroupElement GroupElement::inverse() const {
    std::vector<Letter> w;
    for (auto it = word_.rbegin(); it != word_.rend(); ++it) w.push_back({it->gen, !it->inverse});
    return GroupElement(std::move(w));
}

cplx LiftedPoint::lhat(const SeriesBudget& b) const {
    cplx K = prime_form_K(w, Tau(tau), b);
    return std::log(-rho / (K * K)) + two_pi_i * double(m);
}

SewingConfig LiftedPoint::sewing() const { return SewingConfig::make(tau, w, rho, rho_sheet); }

LiftedPoint lift(cplx tau, cplx w, cplx rho) {
    LiftedPoint p{tau, w, rho, 0, 0};
    p.sewing().validate();
    return p;
}

LiftedPoint act_point(const GroupElement& g, const LiftedPoint& p, const SeriesBudget& b) {
    LiftedPoint q = p;
    const auto& w = g.word();
    for (auto it = w.rbegin(); it != w.rend(); ++it) q = point_letter(*it, q, b);
    SewingConfig sew = q.sewing();
    DomainReport rep = domain_check(sew);
    if (!rep.ok) throw DomainError("image leaves the sewing domain: " + rep.message);
    sew.validate();
    return q;
}

TwistConfig act_twist(const GroupElement& g, const TwistConfig& tw) {
    TwistConfig t = tw;
    const auto& w = g.word();
    for (auto it = w.rbegin(); it != w.rend(); ++it) t = twist_letter(*it, t);
    return t;
}

cplx chi_multiplier(const GroupElement& g, const TwistConfig& tw) {
    TwistConfig t = tw;
    cplx chi = 1.0;
    const auto& w = g.word();
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        chi *= chi_letter(*it, t);
        t = twist_letter(*it, t);
    }
    return chi;
}

SewingConfig lifted_sewing(const LiftedPoint& p, const TwistConfig& tw, const SeriesBudget& b) {
    SewingConfig sew = p.sewing();
    KappaKernel kk(sew, tw, b);
    sew.kappa_branch = round_winding(p.lhat(b) - kk.log_ratio(), "lifted branch");
    return sew;
}

cplx lifted_det(const LiftedPoint& p, const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b) {
    KappaKernel kk(lifted_sewing(p, tw, b), tw, b);
    return det_I_minus(build_T(N, kk, quad_M)).value;
}

namespace {

cplx lifted_F(const LiftedPoint& p, const TwistConfig& tw, const SeriesBudget& b) {
    tw.validate();
    const Tau t(p.tau);
    cplx th = theta_char_g1(tw.char1(), tw.kappa * p.w, t, b);
    return std::exp(two_pi_i * tw.beta2 * tw.kappa + 0.5 * tw.kappa * tw.kappa * p.lhat(b)) * th / dedekind_eta(t, b);
}

}  // namespace

cplx z2_lifted(const LiftedPoint& p, const TwistConfig& tw, int N, int quad_M, const SeriesBudget& b) {
    return lifted_F(p, tw, b) * lifted_det(p, tw, N, quad_M, b);
}

InvarianceResult invariance_residual(const GroupElement& g, const LiftedPoint& p, const TwistConfig& tw, int N,
                                     int quad_M, const SeriesBudget& b, double chi_scale) {
    InvarianceResult r;
    const LiftedPoint gp = act_point(g, p, b);
    const TwistConfig gtw = act_twist(g, tw);
    r.chi = chi_scale * chi_multiplier(g, tw);
    const cplx d0 = lifted_det(p, tw, N, quad_M, b), d1 = lifted_det(gp, gtw, N, quad_M, b);
    r.det_residual = std::abs(d1 / d0 - 1.0);
    const cplx z0 = lifted_F(p, tw, b) * d0, z1 = lifted_F(gp, gtw, b) * d1;
    r.ratio = z1 / z0;
    r.residual = std::abs(r.ratio / r.chi - 1.0);
    return r;
}

}  // namespace sewkernel

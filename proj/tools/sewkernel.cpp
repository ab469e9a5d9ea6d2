#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sewkernel/modular.hpp"

using json = nlohmann::ordered_json;
using namespace sewkernel;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_invalid = 2;
constexpr std::size_t max_grid = 10000;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

cplx to_cplx(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object() && j.contains("re")) return {j.at("re").get<double>(), j.value("im", 0.0)};
    throw ConfigError("complex values are numbers, [re, im] or {\"re\", \"im\"}");
}

json from_cplx(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

struct Params {
    cplx tau{0.1, 1.1};
    cplx w{1.3, 2.9};
    cplx rho = std::polar(1e-3, 0.7);
    TwistConfig tw{0.21, -0.13, 0.17, 0.23, 1};
    int N = 12;
    int quad_M = 128;
    int rho_sheet = 0;
    int m = 0;
    std::optional<Mat2> Omega;
    // operation-specific
    cplx x{0.6, -1.3};
    cplx y{-1.1, 0.8};
    int a = 1;
    double radius_frac = 0.5;
    double W = 4.0;
    int n = 2;
    unsigned seed = 1;
    std::string generator = "T";
    double chi_scale = 1.0;
    double tolerance = 1e-6;
};

const std::vector<std::string> param_keys = {"tau", "w", "rho", "alpha1", "beta1", "beta2", "kappa", "B",
                                             "N", "quad_M", "rho_sheet", "m", "Omega", "x", "y", "a",
                                             "radius_frac", "W", "n", "seed", "generator", "chi_scale",
                                             "tolerance"};

void apply_param(Params& p, const std::string& key, const json& v) {
    if (key == "tau") p.tau = to_cplx(v);
    else if (key == "w") p.w = to_cplx(v);
    else if (key == "rho") p.rho = to_cplx(v);
    else if (key == "alpha1") p.tw.alpha1 = v.get<double>();
    else if (key == "beta1") p.tw.beta1 = v.get<double>();
    else if (key == "beta2") p.tw.beta2 = v.get<double>();
    else if (key == "kappa") p.tw.kappa = v.get<double>();
    else if (key == "B") p.tw.B = v.get<int>();
    else if (key == "N") p.N = v.get<int>();
    else if (key == "quad_M") p.quad_M = v.get<int>();
    else if (key == "rho_sheet") p.rho_sheet = v.get<int>();
    else if (key == "m") p.m = v.get<int>();
    else if (key == "Omega") {
        if (!v.is_array() || v.size() != 2 || v[0].size() != 2 || v[1].size() != 2)
            throw ConfigError("Omega must be a 2x2 array of complex values");
        Mat2 o;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) o[i][j] = to_cplx(v[i][j]);
        p.Omega = o;
    } else if (key == "x") p.x = to_cplx(v);
    else if (key == "y") p.y = to_cplx(v);
    else if (key == "a") p.a = v.get<int>();
    else if (key == "radius_frac") p.radius_frac = v.get<double>();
    else if (key == "W") p.W = v.get<double>();
    else if (key == "n") p.n = v.get<int>();
    else if (key == "seed") p.seed = v.get<unsigned>();
    else if (key == "generator") p.generator = v.get<std::string>();
    else if (key == "chi_scale") p.chi_scale = v.get<double>();
    else if (key == "tolerance") p.tolerance = v.get<double>();
    else throw ConfigError("unknown parameter '" + key + "'");
}

Params parse_params(const json& cfg) {
    Params p;
    if (cfg.contains("params")) {
        if (!cfg["params"].is_object()) throw ConfigError("params must be an object");
        for (const auto& [k, v] : cfg["params"].items()) apply_param(p, k, v);
    }
    return p;
}

SewingConfig sewing(const Params& p) {
    SewingConfig s = SewingConfig::make(p.tau, p.w, p.rho, p.rho_sheet);
    DomainReport rep = domain_check(s);
    if (!rep.ok) throw DomainError(rep.message);
    s.validate();
    p.tw.validate();
    if (p.N < 1) throw DomainError("N must be >= 1");
    return s;
}

LiftedPoint lifted(const Params& p) {
    LiftedPoint q = lift(p.tau, p.w, p.rho);
    q.m = p.m;
    q.rho_sheet = p.rho_sheet;
    return q;
}

json branch_record(const Params& p) { return {{"B", p.tw.B}, {"rho_sheet", p.rho_sheet}, {"m", p.m}}; }

struct Outcome {
    std::optional<cplx> value;
    std::optional<double> residual;
    json trace = json::array();
    json extra = json::object();
};

Outcome eval_target(const std::string& target, const Params& p) {
    Outcome o;
    if (target == "z2_fermionic") {
        o.value = z2_fermionic(sewing(p), p.tw, p.N, p.quad_M);
    } else if (target == "z1_twisted_2pt") {
        o.value = z1_twisted_2pt(sewing(p), p.tw);
    } else if (target == "z2_heisenberg") {
        o.value = z2_heisenberg(sewing(p), p.N);
    } else if (target == "det_I_minus_T") {
        DetResult d = det_I_minus(build_T(p.N, sewing(p), p.tw, p.quad_M));
        o.value = d.value;
        o.extra["est_error"] = d.est_error;
        o.extra["method"] = d.method == DetMethod::lu ? "lu" : "trace_log";
    } else if (target == "det_inv_sqrt_I_minus_R") {
        o.value = det_inv_sqrt_I_minus_R(p.N, sewing(p));
    } else if (target == "s_kappa") {
        o.value = s_kappa(p.x, p.y, sewing(p), p.tw);
    } else if (target == "s2_eval") {
        o.value = s2_eval(p.x, p.y, sewing(p), p.tw, p.N, p.quad_M).value;
    } else if (target == "fock_sum_oracle") {
        o.value = fock_sum_oracle(p.W, sewing(p), p.tw, p.N, p.quad_M);
    } else if (target == "z2_lifted") {
        sewing(p);
        o.value = z2_lifted(lifted(p), p.tw, p.N, p.quad_M);
    } else if (target == "z2_theta_form") {
        if (!p.Omega) throw ConfigError("z2_theta_form needs params.Omega");
        o.value = z2_theta_form(*p.Omega, sewing(p), p.tw, p.N);
    } else if (target == "chi_multiplier") {
        p.tw.validate();
        o.value = chi_multiplier(GroupElement::parse(p.generator), p.tw);
    } else {
        throw ConfigError("unknown eval target '" + target + "'");
    }
    return o;
}

Outcome check_target(const std::string& target, const Params& p) {
    Outcome o;
    if (target == "frobenius") {
        if (p.n < 1) throw DomainError("n must be >= 1");
        const Tau t(p.tau);
        std::mt19937 gen(p.seed);
        std::uniform_real_distribution<double> u(0.05, 0.95);
        std::vector<cplx> pts;
        while (int(pts.size()) < 2 * p.n) {
            cplx z = two_pi_i * (u(gen) * p.tau + u(gen));
            if (std::all_of(pts.begin(), pts.end(), [&](cplx q) { return std::abs(q - z) > 0.3; })) pts.push_back(z);
        }
        std::vector<cplx> xs(pts.begin(), pts.begin() + p.n), ys(pts.begin() + p.n, pts.end());
        o.residual = frobenius_residual(xs, ys, p.tw.char1(), t);
    } else if (target == "triple_product") {
        auto r = triple_product_residual(sewing(p), p.tw, p.N, p.quad_M, {}, p.Omega);
        o.residual = r.residual;
        o.extra["leading_order"] = r.leading_order;
        o.extra["det_I_minus_T"] = from_cplx(r.det_T);
        o.extra["det_I_minus_R_sqrt"] = from_cplx(r.det_R_sqrt);
        o.extra["form"] = p.Omega ? "exact" : "leading_order";
    } else if (target == "sewing") {
        SewingConfig s = sewing(p);
        const double inner = std::abs(s.rho) / s.radius(bar(p.a)), outer = s.radius(p.a);
        const double r = std::exp(std::log(inner) + p.radius_frac * (std::log(outer) - std::log(inner)));
        const cplx za = std::polar(r, std::arg(p.x));
        for (int N : {p.N, p.N + 8}) {
            SewingResidual res = sewing_multiplier_residual(p.a, za, p.y, s, p.tw, N, p.quad_M);
            o.trace.push_back({{"N", N}, {"residual", res.residual}, {"residual_alt", res.residual_alt}});
            if (N == p.N) {
                o.residual = res.residual;
                o.extra["winding"] = res.winding;
                o.extra["exponent"] = res.exponent;
            }
        }
    } else if (target == "invariance") {
        sewing(p);
        InvarianceResult r =
            invariance_residual(GroupElement::parse(p.generator), lifted(p), p.tw, p.N, p.quad_M, {}, p.chi_scale);
        o.residual = r.residual;
        o.extra["det_residual"] = r.det_residual;
        o.extra["chi"] = from_cplx(r.chi);
        o.extra["ratio"] = from_cplx(r.ratio);
    } else if (target == "fock_sum") {
        SewingConfig s = sewing(p);
        const cplx z = z2_fermionic(s, p.tw, p.N, p.quad_M);
        for (double W = 1.0; W <= p.W + 1e-12; W += 1.0) {
            double dev = std::abs(z / fock_sum_oracle(W, s, p.tw, p.N, p.quad_M) - 1.0);
            o.trace.push_back({{"W", W}, {"residual", dev}});
            o.residual = dev;
        }
    } else if (target == "lattice_sum") {
        SewingConfig s = sewing(p);
        cplx sum = 0.0;
        for (int n = -30; n <= 30; ++n) {
            double mu = n + p.tw.alpha1;
            if (std::abs(mu) > 30.0) continue;
            sum += std::exp(two_pi_i * mu * p.tw.beta1) *
                   z1_alpha_npoint(mu, {{p.tw.kappa, s.w}, {-p.tw.kappa, 0.0}}, s.tau);
        }
        cplx z = z1_twisted_2pt(s, p.tw);
        o.residual = std::abs(z - sum) / std::abs(sum);
    } else {
        throw ConfigError("unknown check '" + target + "'");
    }
    return o;
}

bool is_check(const std::string& command) { return command == "check"; }

// ---- sweeps

struct Axis {
    std::string name;
    std::vector<double> values;
};

Axis parse_axis(const json& j) {
    Axis ax;
    ax.name = j.at("name").get<std::string>();
    if (j.contains("values")) {
        ax.values = j["values"].get<std::vector<double>>();
    } else {
        const double a = j.at("start").get<double>(), b = j.at("stop").get<double>();
        const int n = j.at("count").get<int>();
        const bool log = j.value("scale", std::string("linear")) == "log";
        if (log && (a <= 0.0 || b <= 0.0)) throw ConfigError("log axes need positive bounds");
        for (int i = 0; i < n; ++i) {
            double t = n == 1 ? 0.0 : double(i) / (n - 1);
            ax.values.push_back(log ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a));
        }
    }
    if (ax.values.empty()) throw ConfigError("sweep axis '" + ax.name + "' is empty");
    return ax;
}

void apply_axis(Params& p, const std::string& name, double v) {
    if (name == "rho_abs") p.rho = std::polar(v, std::arg(p.rho));
    else if (name == "rho_arg") p.rho = std::polar(std::abs(p.rho), v);
    else if (name == "tau_re") p.tau.real(v);
    else if (name == "tau_im") p.tau.imag(v);
    else if (name == "w_re") p.w.real(v);
    else if (name == "w_im") p.w.imag(v);
    else if (name == "alpha1") p.tw.alpha1 = v;
    else if (name == "beta1") p.tw.beta1 = v;
    else if (name == "beta2") p.tw.beta2 = v;
    else if (name == "kappa") p.tw.kappa = v;
    else if (name == "N") p.N = int(v);
    else throw ConfigError("unknown sweep axis '" + name + "'");
}

unsigned thread_cap() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* e = std::getenv("SEWKERNEL_THREADS")) {
        int v = std::atoi(e);
        if (v >= 1) n = std::min(n, unsigned(v));
    }
    return n;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

// ---- driver

struct Options {
    std::string command;
    std::string config;
    std::string out;
    std::string format = "json";
    bool timing = false;
};

void emit(const Options& opt, const std::string& text) {
    if (opt.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + opt.out);
    f << text;
}

int emit_error(const Options& opt, const std::string& kind, const std::string& msg) {
    json j{{"schema", 1}, {"command", opt.command}, {"status", "error"}, {"error", {{"kind", kind}, {"message", msg}}}};
    std::string text = opt.format == "csv" ? "status,kind,message\nerror," + kind + ",\"" + msg + "\"\n" : j.dump(2) + "\n";
    try {
        emit(opt, text);
    } catch (...) {
        std::cerr << text;
    }
    std::cerr << "sewkernel: " << kind << ": " << msg << "\n";
    return exit_invalid;
}

int run_single(const Options& opt, const json& cfg) {
    const std::string target = cfg.at("target").get<std::string>();
    Params p = parse_params(cfg);
    auto t0 = std::chrono::steady_clock::now();
    Outcome o = is_check(opt.command) ? check_target(target, p) : eval_target(target, p);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = true;
    if (is_check(opt.command)) pass = o.residual && std::isfinite(*o.residual) && *o.residual < p.tolerance;
    if (o.value && !std::isfinite(std::abs(*o.value))) throw BudgetExhausted("non-finite result");
    if (opt.format == "csv") {
        std::ostringstream s;
        s << "target,value_re,value_im,residual,tolerance,status,N,quad_M,B,rho_sheet,m\n";
        s << target << "," << (o.value ? fmt(o.value->real()) : "") << "," << (o.value ? fmt(o.value->imag()) : "")
          << "," << (o.residual ? fmt(*o.residual) : "") << "," << (is_check(opt.command) ? fmt(p.tolerance) : "")
          << "," << (pass ? "pass" : "fail") << "," << p.N << "," << p.quad_M << "," << p.tw.B << ","
          << p.rho_sheet << "," << p.m << "\n";
        emit(opt, s.str());
    } else {
        json j{{"schema", 1}, {"command", opt.command}, {"target", target}, {"inputs", cfg}};
        if (o.value) j["value"] = from_cplx(*o.value);
        if (o.residual) {
            j["residual"] = *o.residual;
            j["tolerance"] = p.tolerance;
        }
        if (!o.trace.empty()) j["refinement"] = o.trace;
        if (!o.extra.empty()) j["details"] = o.extra;
        j["truncation"] = {{"N", p.N}, {"quad_M", p.quad_M}};
        j["branch"] = branch_record(p);
        j["status"] = pass ? "pass" : "fail";
        if (opt.timing) j["timing_s"] = secs;
        emit(opt, j.dump(2) + "\n");
    }
    return pass ? exit_ok : exit_check_failed;
}

int run_sweep(const Options& opt, const json& cfg) {
    const std::string target = cfg.at("target").get<std::string>();
    const std::string mode = cfg.value("mode", std::string("eval"));
    if (mode != "eval" && mode != "check") throw ConfigError("sweep mode must be eval or check");
    const json& sw = cfg.at("sweep");
    std::vector<Axis> axes;
    for (const auto& a : sw.at("axes")) axes.push_back(parse_axis(a));
    if (axes.empty() || axes.size() > 2) throw ConfigError("sweeps take one or two axes");
    std::size_t total = 1;
    for (const auto& a : axes) {
        total *= a.values.size();
        if (total > max_grid) throw ConfigError("sweep grid exceeds 10^4 points");
    }
    const Params base = parse_params(cfg);
    struct Row {
        std::vector<double> coords;
        Outcome o;
        std::string error;
    };
    std::vector<Row> rows(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t r = i;
        std::vector<double> c(axes.size());
        for (int k = int(axes.size()) - 1; k >= 0; --k) {
            c[k] = axes[k].values[r % axes[k].values.size()];
            r /= axes[k].values.size();
        }
        rows[i].coords = c;
        Params p = base;
        for (std::size_t k = 0; k < axes.size(); ++k) apply_axis(p, axes[k].name, c[k]);
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            Params p = base;
            for (std::size_t k = 0; k < axes.size(); ++k) apply_axis(p, axes[k].name, rows[i].coords[k]);
            try {
                rows[i].o = mode == "check" ? check_target(target, p) : eval_target(target, p);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                rows[i].error = e.what();
            }
        }
    };
    // validate the target on the calling thread before fanning out
    {
        Params p = base;
        for (std::size_t k = 0; k < axes.size(); ++k) apply_axis(p, axes[k].name, rows[0].coords[k]);
        if (mode == "check") {
            static const std::vector<std::string> checks = {"frobenius", "triple_product", "sewing", "invariance", "fock_sum", "lattice_sum"};
            if (std::find(checks.begin(), checks.end(), target) == checks.end()) throw ConfigError("unknown check '" + target + "'");
        } else {
            static const std::vector<std::string> evals = {"z2_fermionic", "z1_twisted_2pt", "z2_heisenberg", "det_I_minus_T", "det_inv_sqrt_I_minus_R",
                                                           "s_kappa", "s2_eval", "fock_sum_oracle", "z2_lifted", "z2_theta_form", "chi_multiplier"};
            if (std::find(evals.begin(), evals.end(), target) == evals.end()) throw ConfigError("unknown eval target '" + target + "'");
        }
    }
    const unsigned nt = std::min<std::size_t>(thread_cap(), total);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::ostringstream s;
    for (const auto& a : axes) s << a.name << ",";
    s << "value_re,value_im,residual,status\n";
    bool all_ok = true;
    const double tol = base.tolerance;
    for (const auto& r : rows) {
        for (double c : r.coords) s << fmt(c) << ",";
        if (!r.error.empty()) {
            all_ok = false;
            s << ",,,error: " << r.error << "\n";
            continue;
        }
        bool ok = mode != "check" || (r.o.residual && *r.o.residual < tol);
        all_ok = all_ok && ok;
        s << (r.o.value ? fmt(r.o.value->real()) : "") << "," << (r.o.value ? fmt(r.o.value->imag()) : "") << ","
          << (r.o.residual ? fmt(*r.o.residual) : "") << "," << (ok ? "ok" : "fail") << "\n";
    }
    if (opt.format == "json") {
        json j{{"schema", 1}, {"command", "sweep"}, {"target", target}, {"inputs", cfg}, {"branch", branch_record(base)},
               {"table_csv", s.str()}};
        emit(opt, j.dump(2) + "\n");
    } else {
        emit(opt, s.str());
    }
    return all_ok ? exit_ok : exit_check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sewkernel: genus-two Szego kernel and partition function evaluator"};
    app.require_subcommand(1, 1);
    Options opt;
    for (const char* name : {"eval", "check", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config, "JSON run configuration")->required();
        sub->add_option("--out", opt.out, "output path (default stdout)");
        sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--timing", opt.timing, "include wall-clock timing in JSON output");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), exit_invalid);
    }
    opt.command = app.get_subcommands().front()->get_name();

    json cfg;
    try {
        std::ifstream f(opt.config);
        if (!f) throw ConfigError("cannot read config file " + opt.config);
        cfg = json::parse(f);
        if (!cfg.is_object() || !cfg.contains("target")) throw ConfigError("config needs a \"target\" field");
        return opt.command == "sweep" ? run_sweep(opt, cfg) : run_single(opt, cfg);
    } catch (const json::exception& e) {
        return emit_error(opt, "config", e.what());
    } catch (const ConfigError& e) {
        return emit_error(opt, "config", e.what());
    } catch (const DomainError& e) {
        return emit_error(opt, "domain", e.what());
    } catch (const DegenerateCharacteristic& e) {
        return emit_error(opt, "degenerate_characteristic", e.what());
    } catch (const PoleProximity& e) {
        return emit_error(opt, "pole_proximity", e.what());
    } catch (const std::exception& e) {
        emit_error(opt, "numerical", e.what());
        return exit_check_failed;
    }
}

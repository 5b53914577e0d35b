// nhfloquet command-line front end.
//
// Exit codes: 0 ok, 2 configuration error, 3 numeric failure, 4 unsupported family.

#include <nhfloquet/nhfloquet.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

using namespace nhfloquet;

namespace {

constexpr int kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitUnsupported = 4;

struct Common {
    std::string preset, config, r, rho, mode = "both", out, format;
    double omega = 0, T = 0, rtol = 0;
    int grid = 0, threads = 0;
};

void add_model_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--preset", c.preset, "named model preset");
    cmd->add_option("--config", c.config, "JSON model config file");
    cmd->add_option("--r", c.r, "preset parameter r (complex literal)");
    cmd->add_option("--rho", c.rho, "preset parameter rho (complex literal)");
    auto* om = cmd->add_option("--omega", c.omega, "driving frequency");
    auto* tt = cmd->add_option("--T", c.T, "driving period");
    om->excludes(tt);
}

void add_output_options(CLI::App* cmd, Common& c, const std::string& default_format) {
    c.format = default_format;
    cmd->add_option("--out", c.out, "output path (default stdout)");
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

DriveSpec build_model(const Common& c) {
    if (c.preset.empty() == c.config.empty()) throw Error(ErrorCode::ConfigError, "give exactly one of --preset, --config");
    nlohmann::json j;
    if (!c.config.empty()) {
        std::ifstream in(c.config);
        if (!in) throw Error(ErrorCode::ConfigError, "cannot open config '" + c.config + "'");
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ConfigError, std::string("config parse error: ") + e.what());
        }
        if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
    } else {
        j["preset"] = c.preset;
    }
    if (!c.r.empty() || !c.rho.empty()) {
        if (!j.contains("preset")) throw Error(ErrorCode::ConfigError, "--r/--rho apply to presets only");
        if (!c.r.empty()) j["r"] = c.r;
        if (!c.rho.empty()) j["rho"] = c.rho;
    }
    if (c.omega != 0 || c.T != 0) {
        j.erase("omega");
        j.erase("T");
        if (c.omega != 0) j["omega"] = c.omega;
        if (c.T != 0) j["T"] = c.T;
    }
    return model_from_json(j);
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
        }
    }
    std::ostream& os() { return file_ ? static_cast<std::ostream&>(*file_) : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

int thread_count(int requested) {
    if (requested < 0) throw Error(ErrorCode::ConfigError, "--threads must be non-negative");
    return requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct ModeChoice {
    std::vector<std::pair<std::string, Mode>> modes;
    bool airy_names = false;
};

ModeChoice parse_mode(const std::string& m, const DriveSpec& spec) {
    ModeChoice mc;
    if (m == "ai" || m == "bi") {
        if (classify_solvable(spec).family != SolvableFamily::H12_Airy)
            throw Error(ErrorCode::UnsupportedFamily, "--mode ai|bi needs the Airy drive");
        mc.airy_names = true;
        mc.modes.push_back({m, m == "ai" ? Mode::Plus : Mode::Minus});
    } else if (m == "plus") {
        mc.modes.push_back({"plus", Mode::Plus});
    } else if (m == "minus") {
        mc.modes.push_back({"minus", Mode::Minus});
    } else if (m == "both") {
        bool airy = classify_solvable(spec).family == SolvableFamily::H12_Airy;
        mc.airy_names = airy;
        mc.modes.push_back({airy ? "ai" : "plus", Mode::Plus});
        mc.modes.push_back({airy ? "bi" : "minus", Mode::Minus});
    } else {
        throw Error(ErrorCode::ConfigError, "--mode must be plus, minus, both, ai or bi");
    }
    return mc;
}

double quad_rtol(double r) { return r > 0 ? r : PrecisionTraits<quad>::default_rtol; }

// Trajectories for several modes, one thread per mode when allowed.
std::vector<Trajectory<double>> mode_trajectories(const DriveSpec& spec, const FloquetSolution& F,
                                                  const ModeChoice& mc, const std::vector<double>& grid, double rtol,
                                                  int threads) {
    std::vector<Trajectory<double>> out(mc.modes.size());
    std::vector<std::exception_ptr> err(mc.modes.size());
    auto job = [&](std::size_t k) {
        try {
            out[k] = cyclic_trajectory(spec, F, mc.modes[k].second, grid, rtol);
        } catch (...) {
            err[k] = std::current_exception();
        }
    };
    if (threads > 1 && mc.modes.size() > 1) {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < mc.modes.size(); ++k) pool.emplace_back(job, k);
        for (auto& t : pool) t.join();
    } else {
        for (std::size_t k = 0; k < mc.modes.size(); ++k) job(k);
    }
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string f17(double x) { return format_double(x); }

cplx psi_of(const StateVector& v) { return v.b / v.a; }

// ------------------------------------------------------------ commands

int cmd_evolve(const Common& c) {
    DriveSpec spec = build_model(c);
    make_options<quad>(quad_rtol(c.rtol));
    ModeChoice mc = parse_mode(c.mode, spec);
    int n = c.grid > 0 ? c.grid : 4000;
    FloquetSolution F = floquet_solve(spec);
    auto grid = uniform_grid(0.0, spec.period(), n);
    auto trs = mode_trajectories(spec, F, mc, grid, quad_rtol(c.rtol), thread_count(c.threads));
    Output out(c.out);
    std::ostream& os = out.os();
    os << "mode,t,re_a,im_a,re_b,im_b,re_psi,im_psi,re_psi_plus,im_psi_plus,re_psi_minus,im_psi_minus,d_plus,d_minus\n";
    for (std::size_t m = 0; m < trs.size(); ++m) {
        std::optional<InstantEigensystem> prev;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const StateVector& s = trs[m].s[k];
            InstantEigensystem es = instantaneous_eigensystem(f_at(spec, grid[k]), prev);
            prev = es;
            cplx psi = psi_of(s), pp = psi_of(es.v_plus), pm = psi_of(es.v_minus);
            os << mc.modes[m].first << ',' << f17(grid[k]) << ',' << f17(s.a.real()) << ',' << f17(s.a.imag()) << ','
               << f17(s.b.real()) << ',' << f17(s.b.imag()) << ',' << f17(psi.real()) << ',' << f17(psi.imag()) << ','
               << f17(pp.real()) << ',' << f17(pp.imag()) << ',' << f17(pm.real()) << ',' << f17(pm.imag()) << ','
               << f17(ray_distance(s, es.v_plus)) << ',' << f17(ray_distance(s, es.v_minus)) << '\n';
        }
    }
    return kExitOk;
}

int cmd_monodromy(const Common& c) {
    DriveSpec spec = build_model(c);
    FloquetOptions fo;
    if (c.rtol > 0) {
        fo.monodromy.precision = Precision::Quad;
        fo.monodromy.rtol_quad = c.rtol;
        make_options<quad>(c.rtol);
    }
    bool used_quad = false;
    FloquetSolution F = floquet_solve(spec, fo, &used_quad);
    Output out(c.out);
    JsonWriter w(out.os());
    w.begin_object();
    w.key("model");
    write_model_json(w, spec);
    w.field("phi_plus", F.phi_plus).field("phi_minus", F.phi_minus);
    w.field("classification", class_name(F.classification));
    w.key("U").begin_array();
    for (int i = 0; i < 2; ++i) {
        w.begin_array();
        for (int j = 0; j < 2; ++j) w.value(F.U(i, j));
        w.end_array();
    }
    w.end_array();
    w.key("modes").begin_object();
    w.key("plus").begin_array().value(F.mode_plus.a).value(F.mode_plus.b).end_array();
    w.key("minus").begin_array().value(F.mode_minus.a).value(F.mode_minus.b).end_array();
    w.end_object();
    w.field("det_U", F.U.det());
    w.field("precision", used_quad ? "quad" : "double");
    FamilyInfo fi = classify_solvable(spec);
    w.field("family", family_name(fi.family));
    if (fi.family != SolvableFamily::NotSolvable) {
        auto [ap, am] = analytic_eigenphases(spec);
        double d1 = std::max(phase_distance(F.phi_plus, ap), phase_distance(F.phi_minus, am));
        double d2 = std::max(phase_distance(F.phi_plus, am), phase_distance(F.phi_minus, ap));
        w.key("analytic").begin_object();
        w.field("phi_plus", ap).field("phi_minus", am).field("delta", std::min(d1, d2));
        w.end_object();
    }
    w.end_object();
    w.finish();
    return kExitOk;
}

int cmd_exponent(const Common& c) {
    DriveSpec spec = build_model(c);
    ExponentForm form = exponent_form(spec);
    int n = c.grid > 0 ? c.grid : 1024;
    CriticalExponent G(form);
    CriticalExponent Q(form, CriticalExponent::Method::Quadrature);
    Output out(c.out);
    std::ostream& os = out.os();
    if (c.format == "json") {
        JsonWriter w(os);
        w.begin_object();
        w.field("kind", kind_name(form.kind));
        w.field("closed_form", G.closed_form());
        if (G.has_anchor()) w.field("anchor", G.anchor());
        w.field("theta0", G.theta0());
        std::vector<double> cr = stokes_crossings(G), times;
        for (double th : cr) times.push_back(th / spec.omega);
        w.key("crossings").values(cr);
        w.key("crossing_times").values(times);
        w.field("g_2pi_minus_g_0", G(2 * M_PI - 1e-15) - G(0.0));
        w.end_object();
        w.finish();
        return kExitOk;
    }
    os << "theta,re_g,im_g,re_g_quadrature,im_g_quadrature\n";
    for (int k = 0; k < n; ++k) {
        double th = 2 * M_PI * k / n;
        cplx g = G(th), q = Q(th);
        os << f17(th) << ',' << f17(g.real()) << ',' << f17(g.imag()) << ',' << f17(q.real()) << ',' << f17(q.imag())
           << '\n';
    }
    return kExitOk;
}

void write_hops(JsonWriter& w, const HopReport& r, double T) {
    w.begin_object();
    w.field("count", r.count());
    w.key("hops").begin_array();
    for (auto& h : r.hops) {
        w.begin_object();
        w.field("t", h.t).field("t_over_T", h.t / T).field("from", h.from).field("to", h.to);
        if (r.kind == HopKind::Numeric) w.field("window", h.window);
        w.end_object();
    }
    w.end_array();
    w.end_object();
}

int cmd_hops(const Common& c) {
    DriveSpec spec = build_model(c);
    make_options<quad>(quad_rtol(c.rtol));
    ModeChoice mc = parse_mode(c.mode, spec);
    int n = c.grid > 0 ? c.grid : 4000;
    FloquetSolution F = floquet_solve(spec);
    auto grid = uniform_grid(0.0, spec.period(), n);
    auto trs = mode_trajectories(spec, F, mc, grid, quad_rtol(c.rtol), thread_count(c.threads));
    const double T = spec.period();
    Output out(c.out);
    JsonWriter w(out.os());
    w.begin_object();
    w.field("T", T);
    w.key("modes").begin_array();
    for (std::size_t m = 0; m < trs.size(); ++m) {
        HopReport num = detect_hops_numeric(trs[m], spec);
        auto fd0 = following_distances(Trajectory<double>{{trs[m].t[0]}, {trs[m].s[0]}, true}, spec);
        int label0 = fd0.d_plus[0] <= fd0.d_minus[0] ? 1 : -1;
        HopMode hm = mc.airy_names ? (mc.modes[m].second == Mode::Plus ? HopMode::Ai : HopMode::Bi)
                                   : (mc.modes[m].second == Mode::Plus ? HopMode::Plus : HopMode::Minus);
        HopReport pred = predict_hops(spec, hm, label0);
        w.begin_object();
        w.field("mode", mc.modes[m].first);
        w.key("numeric");
        write_hops(w, num, T);
        w.key("predicted");
        write_hops(w, pred, T);
        w.key("crossing_times").values(pred.crossings);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    w.finish();
    return kExitOk;
}

struct PhaseArgs {
    PhaseDiagramSpec ps;
};

int cmd_phase_diagram(const Common& c, const PhaseArgs& pa) {
    if (!c.preset.empty() && c.preset != "ucf")
        throw Error(ErrorCode::UnsupportedFamily, "phase diagrams are available for the ucf family only");
    PhaseDiagramSpec ps = pa.ps;
    ps.threads = thread_count(c.threads);
    auto cells = phase_diagram(ps);
    Output out(c.out);
    write_phase_diagram_csv(out.os(), cells);
    return kExitOk;
}

int cmd_theta_crit(const Common& c) {
    cplx r = c.r.empty() ? cplx(0.1, 0) : parse_complex(c.r);
    if (r.imag() != 0) throw Error(ErrorCode::ConfigError, "theta-crit needs a real r");
    if (std::abs(r.real()) >= 1) throw Error(ErrorCode::ConfigError, "|r| >= 1 is the unstable regime");
    auto branches = tangency_solve(r);
    Output out(c.out);
    JsonWriter w(out.os());
    w.begin_object();
    w.field("r", r.real());
    w.key("branches").begin_array();
    for (auto& b : branches) {
        w.begin_object();
        w.field("rho_crit", b.rho);
        w.key("theta_crit").values(b.theta);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    w.finish();
    return kExitOk;
}

int cmd_bifurcation(const Common& c, double lo, double hi) {
    auto rs = bifurcation_scan(lo, hi);
    Output out(c.out);
    JsonWriter w(out.os());
    w.begin_object();
    w.field("r_min", lo).field("r_max", hi);
    w.key("r_star").values(rs);
    w.end_object();
    w.finish();
    return kExitOk;
}

int cmd_specfun(const Common& c, const std::string& fn, const std::vector<std::string>& args, int winding) {
    using namespace specfun;
    std::vector<cquad> a;
    for (auto& s : args) a.push_back(widen_q(parse_complex(s)));
    auto need = [&](std::size_t k) {
        if (a.size() != k)
            throw Error(ErrorCode::ConfigError, fn + " takes " + std::to_string(k) + " complex argument(s)");
    };
    auto lp = [&](const cquad& z) { return LogPoint::from(z, winding); };
    cquad v;
    if (fn == "gamma") {
        need(1);
        v = gamma_q(a[0]);
    } else if (fn == "rgamma") {
        need(1);
        v = rgamma_q(a[0]);
    } else if (fn == "kummer-m-reg") {
        need(3);
        v = kummer_m_reg_q(a[0], a[1], a[2]);
    } else if (fn == "kummer-m") {
        need(3);
        v = gamma_q(a[1]) * kummer_m_reg_q(a[0], a[1], a[2]);
    } else if (fn == "tricomi-u") {
        need(3);
        v = tricomi_u_q(a[0], a[1], lp(a[2]));
    } else if (fn == "whittaker-m") {
        need(3);
        v = whittaker_m_q(a[0], a[1], lp(a[2]));
    } else if (fn == "whittaker-w") {
        need(3);
        v = whittaker_w_q(a[0], a[1], lp(a[2]));
    } else if (fn == "bessel-j") {
        need(2);
        v = bessel_j_q(a[0], lp(a[1]));
    } else if (fn == "bessel-y") {
        need(2);
        v = bessel_y_q(a[0], lp(a[1]));
    } else if (fn == "airy-ai") {
        need(1);
        v = airy_ai_q(a[0]);
    } else if (fn == "airy-bi") {
        need(1);
        v = airy_bi_q(a[0]);
    } else if (fn == "pcf-d") {
        need(2);
        v = pcf_d_q(a[0], a[1]);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown function '" + fn + "'");
    }
    Output out(c.out);
    cplx d = to_double(v);
    if (c.format == "json") {
        JsonWriter w(out.os());
        w.begin_object().field("function", fn).field("value", d).end_object();
        w.finish();
    } else {
        out.os() << format_complex(d) << '\n';
    }
    return kExitOk;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError: return kExitConfig;
        case ErrorCode::UnsupportedFamily:
        case ErrorCode::UnsupportedHarmonics: return kExitUnsupported;
        default: return kExitNumeric;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet analysis of periodically driven non-Hermitian two-level systems"};
    app.require_subcommand(1);
    Common c;

    auto* evolve = app.add_subcommand("evolve", "cyclic-state trajectory over one period (CSV)");
    add_model_options(evolve, c);
    add_output_options(evolve, c, "csv");
    evolve->add_option("--mode", c.mode, "plus|minus|both|ai|bi");
    evolve->add_option("--grid", c.grid, "number of time steps (default 4000)");
    evolve->add_option("--rtol", c.rtol, "binary128 integrator tolerance");
    evolve->add_option("--threads", c.threads, "worker threads (default: cores)");

    auto* mono = app.add_subcommand("monodromy", "one-period operator and Floquet modes (JSON)");
    add_model_options(mono, c);
    add_output_options(mono, c, "json");
    mono->add_option("--rtol", c.rtol, "force binary128 with this tolerance");

    auto* expo = app.add_subcommand("exponent", "critical exponent g(theta), closed form and quadrature");
    add_model_options(expo, c);
    add_output_options(expo, c, "csv");
    expo->add_option("--grid", c.grid, "number of theta samples (default 1024)");

    auto* hops = app.add_subcommand("hops", "numeric and predicted hops (JSON)");
    add_model_options(hops, c);
    add_output_options(hops, c, "json");
    hops->add_option("--mode", c.mode, "plus|minus|both|ai|bi");
    hops->add_option("--grid", c.grid, "number of time steps (default 4000)");
    hops->add_option("--rtol", c.rtol, "binary128 integrator tolerance");
    hops->add_option("--threads", c.threads, "worker threads (default: cores)");

    PhaseArgs pa;
    auto* phase = app.add_subcommand("phase-diagram", "crossing counts over (Re r, Re rho) for the ucf family (CSV)");
    phase->add_option("--preset", c.preset, "model family (ucf)");
    add_output_options(phase, c, "csv");
    phase->add_option("--r-min", pa.ps.r_lo);
    phase->add_option("--r-max", pa.ps.r_hi);
    phase->add_option("--rho-min", pa.ps.rho_lo);
    phase->add_option("--rho-max", pa.ps.rho_hi);
    phase->add_option("--n-r", pa.ps.n_r);
    phase->add_option("--n-rho", pa.ps.n_rho);
    phase->add_option("--im-r", pa.ps.im_r, "fixed Im r");
    phase->add_option("--im-rho", pa.ps.im_rho, "fixed Im rho");
    phase->add_option("--theta-nodes", pa.ps.theta_nodes);
    phase->add_option("--threads", c.threads, "worker threads (default: cores)");

    auto* theta = app.add_subcommand("theta-crit", "tangency angles and rho_crit for real r (JSON)");
    theta->add_option("--r", c.r, "real r (default 0.1)");
    add_output_options(theta, c, "json");

    double blo = 0.05, bhi = 0.95;
    auto* bif = app.add_subcommand("bifurcation", "r where the off-axis tangency count changes (JSON)");
    bif->add_option("--r-min", blo);
    bif->add_option("--r-max", bhi);
    add_output_options(bif, c, "json");

    std::string fn;
    std::vector<std::string> fargs;
    int winding = 0;
    auto* sf = app.add_subcommand("specfun-eval", "evaluate one special function");
    sf->add_option("function", fn,
                   "gamma|rgamma|kummer-m|kummer-m-reg|tricomi-u|whittaker-m|whittaker-w|bessel-j|bessel-y|"
                   "airy-ai|airy-bi|pcf-d")
        ->required();
    sf->add_option("args", fargs, "complex arguments (a+bi literals)")->required();
    sf->add_option("--winding", winding, "sheet of log z for multivalued functions");
    add_output_options(sf, c, "csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*evolve) return cmd_evolve(c);
        if (*mono) return cmd_monodromy(c);
        if (*expo) return cmd_exponent(c);
        if (*hops) return cmd_hops(c);
        if (*phase) return cmd_phase_diagram(c, pa);
        if (*theta) return cmd_theta_crit(c);
        if (*bif) return cmd_bifurcation(c, blo, bhi);
        if (*sf) return cmd_specfun(c, fn, fargs, winding);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitConfig;
}

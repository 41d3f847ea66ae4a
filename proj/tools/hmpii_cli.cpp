// hmpii command line: slices, grids, boundary trace, poles, endpoints, vault atlases, bvp dumps.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hmpii/genus0.hpp"
#include "hmpii/harness.hpp"
#include "json.hpp"

using namespace hmpii;
using nlohmann::json;

namespace {

struct Flags {
    std::vector<double> k, alpha;
    std::string slice = "real";
    double im = -9.0;
    std::vector<double> window;
    std::vector<int> res;
    double delta = 0.5;
    unsigned long long seed = 1;
    int n_cheb = 200, taylor_order = 24;
    double step = 0.5;
    std::string out;
    std::vector<double> x;
};

// Bad flag combinations are fatal (exit 1), like any other setup failure.
struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> k_values(const Flags& f, std::vector<double> dflt) {
    if (!f.alpha.empty()) {
        std::vector<double> ks;
        for (double a : f.alpha) ks.push_back(a - 0.5);
        return ks;
    }
    return f.k.empty() ? dflt : f.k;
}

NumericOptions numeric(const Flags& f) {
    NumericOptions o;
    o.n_cheb = f.n_cheb;
    o.taylor_order = f.taylor_order;
    o.step = f.step;
    o.seed = f.seed;
    o.delta = f.delta;
    return o;
}

Window window4(const Flags& f, Window dflt) {
    if (f.window.empty()) return dflt;
    if (f.window.size() != 4) throw Usage("--window needs re_min,re_max,im_min,im_max");
    return {f.window[0], f.window[1], f.window[2], f.window[3]};
}

std::string k_tag(double k) {
    std::ostringstream s;
    s << k;
    return s.str();
}

// Writes to --out (or stdout). With several k the k value is spliced into the file name.
void emit_per_k(const Flags& f, const std::vector<double>& ks, const std::vector<SampleRow>& rows) {
    if (f.out.empty()) {
        if (ks.size() > 1) throw Usage("several k values need --out (one file per k)");
        write_rows_csv(std::cout, rows);
        return;
    }
    for (double k : ks) {
        std::vector<SampleRow> part;
        for (const auto& r : rows)
            if (r.k == k) part.push_back(r);
        std::string path = f.out;
        if (ks.size() > 1) {
            auto dot = path.rfind('.');
            std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
            std::string ext = dot == std::string::npos ? ".csv" : path.substr(dot);
            path = stem + "_k" + k_tag(k) + ext;
        }
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path);
        write_rows_csv(os, part);
    }
}

void emit_text(const Flags& f, const std::string& text) {
    if (f.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(f.out);
    if (!os) throw std::runtime_error("cannot open " + f.out);
    os << text;
}

int partial(const std::vector<SampleRow>& rows) {
    for (const auto& r : rows)
        if (r.flag != "ok") return 2;
    return 0;
}

json cj(cplx z) { return json::array({z.real(), z.imag()}); }

int cmd_slice(const Flags& f) {
    SliceJob job;
    job.k_list = k_values(f, {1.0, 2.0, 3.0});
    if (f.slice == "real") {
        job.mode = SliceJob::Mode::RealAxis;
    } else if (f.slice == "horizontal") {
        job.mode = SliceJob::Mode::Horizontal;
        job.im_offset = f.im;
        job.x_min = -6.0;
        job.x_max = 2.0;
    } else {
        throw Usage("--slice must be real or horizontal");
    }
    if (!f.window.empty()) {
        if (f.window.size() != 2) throw Usage("--window for a slice is x_min,x_max");
        job.x_min = f.window[0];
        job.x_max = f.window[1];
    }
    if (!f.res.empty()) job.samples = f.res[0];
    auto rows = run_slice(job, numeric(f));
    emit_per_k(f, job.k_list, rows);
    return partial(rows);
}

int cmd_grid(const Flags& f) {
    GridJob job;
    auto ks = k_values(f, {1.0});
    if (ks.size() != 1) throw Usage("grid takes a single k");
    job.k = ks[0];
    job.window = window4(f, job.window);
    if (!f.res.empty()) {
        job.res_re = f.res[0];
        job.res_im = f.res.size() > 1 ? f.res[1] : f.res[0];
    }
    auto rows = run_grid(job, numeric(f));
    emit_per_k(f, {job.k}, rows);
    return partial(rows);
}

int cmd_boundary(const Flags& f) {
    const BoundaryTrace& bt = boundary_trace();
    int n_ray = f.res.empty() ? 60 : f.res[0];
    std::ostringstream os;
    os << "curve,x_re,x_im,frak_c\n";
    char buf[256];
    auto row = [&](const char* name, cplx x, double c) {
        std::snprintf(buf, sizeof buf, "%s,%.15g,%.15g,%.6e\n", name, x.real(), x.imag(), c);
        os << buf;
    };
    // the trace ends exactly on an apex, where the cubic has a triple root
    auto fc = [](cplx x) {
        try {
            return frak_c(x);
        } catch (const Error&) {
            return std::nan("");
        }
    };
    row("apex", apex_point(true), 0.0);
    row("apex", apex_point(false), 0.0);
    row("x0", {bt.x0, 0.0}, fc(cplx(bt.x0, 0.0)));
    for (cplx x : bt.right_lower) row("right_lower", x, fc(x));
    for (cplx x : bt.right_lower) row("right_upper", std::conj(x), fc(std::conj(x)));
    for (cplx x : bt.shared_lower) row("shared_lower", x, fc(x));
    for (cplx x : bt.shared_lower) row("shared_upper", std::conj(x), fc(std::conj(x)));
    // Sigma_S rays: the left edges of the pole regions; frak_c is not evaluated on them
    for (int i = 0; i < n_ray; ++i) {
        double r = 3.0 + (30.0 - 3.0) * i / (n_ray - 1);
        row("ray_lower", std::polar(r, -2.0 * M_PI / 3.0), 0.0);
        row("ray_upper", std::polar(r, 2.0 * M_PI / 3.0), 0.0);
    }
    emit_text(f, os.str());
    return 0;
}

int cmd_poles(const Flags& f) {
    auto ks = k_values(f, {1.0});
    if (ks.size() != 1) throw Usage("poles takes a single k");
    Window w = window4(f, {-6.0, 2.0, -9.5, -8.5});
    double k = ks[0];
    auto poles = predict_poles(w, k, {std::min(0.1, f.delta / std::pow(k, 2.0 / 3.0) / 2.0)});
    json j;
    j["k"] = k;
    j["delta"] = f.delta;
    j["mask_radius"] = f.delta / std::pow(k, 2.0 / 3.0);
    j["window"] = {w.re_min, w.re_max, w.im_min, w.im_max};
    j["poles"] = json::array();
    for (cplx p : poles) j["poles"].push_back(cj(p));
    emit_text(f, j.dump(2) + "\n");
    return 0;
}

int cmd_endpoints(const Flags& f) {
    if (f.x.size() != 2) throw Usage("endpoints needs --x re,im");
    cplx x(f.x[0], f.x[1]);
    SolveInfo info;
    EndpointSet e = solve_endpoints(x, &info);
    Genus1State s = genus1_state(e, true);
    json j;
    j["x"] = cj(x);
    j["endpoints"] = {{"A", cj(e.A)}, {"B", cj(e.B)}, {"C", cj(e.C)}, {"D", cj(e.D)}};
    j["newton_iterations"] = info.iterations;
    j["residuals"] = residuals(e);
    j["spectral"] = {{"Lambda", cj(s.sc.Lambda)},
                     {"omega", s.sc.omega},
                     {"Omega", s.sc.Omega},
                     {"omega_raw", cj(s.sc.omega_raw)},
                     {"Omega_raw", cj(s.sc.Omega_raw)},
                     {"self_test", s.sc.self_test}};
    const PeriodData& p = s.pd;
    j["periods"] = {{"A_minus1", cj(p.A_minus1)}, {"A_inf", cj(p.A_inf)}, {"B", cj(p.B_period)},
                    {"K", cj(p.K)},               {"U", cj(p.U)},         {"F1", cj(p.F1)},
                    {"Q", cj(p.Q)},               {"A_Q", cj(s.AQ)},     {"Upsilon0_const", cj(p.Upsilon0_const)},
                    {"kappa", cj(p.kappa)},       {"a_period", cj(p.a_period)}};
    emit_text(f, j.dump(2) + "\n");
    return 0;
}

int cmd_vault(const Flags& f) {
    auto ks = k_values(f, {1.0});
    if (ks.size() != 1) throw Usage("vault takes a single alpha or k");
    double k = ks[0], alpha = k + 0.5;
    NumericOptions o = numeric(f);
    BvpProblem bp;
    bp.alpha = alpha;
    bp.N = o.n_cheb;
    BvpSolution s = solve_bvp(bp);
    auto [u0, up0] = eval_solution(s, 0.0);
    Window w = window4(f, {-2.0, 6.0, -0.5, 7.5});
    VaultConfig cfg;
    cfg.n = o.taylor_order;
    cfg.h = o.step;
    cfg.grid_spacing = std::min(0.5, o.step);
    cfg.seed = o.seed;
    VaultAtlas at = run_vault(w, 0.0, u0, up0, alpha, cfg);
    emit_text(f, atlas_to_json(at) + "\n");
    std::fprintf(stderr, "centers %zu, paths %d\n", at.centers.size(), at.paths);
    return 0;
}

int cmd_bvp(const Flags& f) {
    auto ks = k_values(f, {1.0});
    if (ks.size() != 1) throw Usage("bvp takes a single alpha or k");
    BvpProblem p;
    p.alpha = ks[0] + 0.5;
    p.N = f.n_cheb;
    if (!f.window.empty()) {
        if (f.window.size() != 2) throw Usage("--window for bvp is y1,y2");
        p.y1 = f.window[0];
        p.y2 = f.window[1];
    }
    BvpSolution s = solve_bvp(p);
    std::ostringstream os;
    os << "t,y_re,y_im,u_re,u_im,up_re,up_im\n";
    char buf[256];
    cplx half = (p.y2 - p.y1) / 2.0;
    for (int i = 0; i < s.grid.N; ++i) {
        cplx y = s.y_at(s.grid.t(i));
        cplx up = s.dv(i) / half;
        std::snprintf(buf, sizeof buf, "%.17g,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g\n", s.grid.t(i), y.real(), y.imag(),
                      s.v(i).real(), s.v(i).imag(), up.real(), up.imag());
        os << buf;
    }
    emit_text(f, os.str());
    std::fprintf(stderr, "newton iterations %d, residual %.3e\n", s.iterations, s.residual);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized Hastings-McLeod solutions: asymptotics vs numerics"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* sc) {
        auto* ko = sc->add_option("--k", f.k, "k values (comma separated)")->delimiter(',');
        auto* ao = sc->add_option("--alpha", f.alpha, "alpha values, alpha = k + 1/2")->delimiter(',');
        ko->excludes(ao);
        sc->add_option("--slice", f.slice, "real or horizontal");
        sc->add_option("--im", f.im, "Im x of a horizontal slice");
        sc->add_option("--window", f.window, "window (slice: x_min,x_max; grid/poles: re0,re1,im0,im1)")
            ->delimiter(',');
        sc->add_option("--res", f.res, "samples (slice) or nx,ny (grid)")->delimiter(',');
        sc->add_option("--delta", f.delta, "pole disc parameter delta");
        sc->add_option("--seed", f.seed, "vault target sampling seed");
        sc->add_option("--n-cheb", f.n_cheb, "Chebyshev nodes");
        sc->add_option("--taylor-order", f.taylor_order, "Taylor jet order n");
        sc->add_option("--step", f.step, "vault step h");
        sc->add_option("--out", f.out, "output file");
        sc->add_option("--x", f.x, "x as re,im")->delimiter(',');
    };
    std::vector<std::pair<CLI::App*, int (*)(const Flags&)>> cmds = {
        {app.add_subcommand("slice", "asymptotic vs numeric along a slice"), cmd_slice},
        {app.add_subcommand("grid", "asymptotic vs numeric on a grid"), cmd_grid},
        {app.add_subcommand("boundary", "pole-region boundary trace"), cmd_boundary},
        {app.add_subcommand("poles", "predicted poles in a window"), cmd_poles},
        {app.add_subcommand("endpoints", "genus-1 endpoints and constants"), cmd_endpoints},
        {app.add_subcommand("vault", "build and serialize a Pade atlas"), cmd_vault},
        {app.add_subcommand("bvp", "collocation solution on a real segment"), cmd_bvp},
    };
    for (auto& c : cmds) common(c.first);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    try {
        for (auto& c : cmds)
            if (*c.first) return c.second(f);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}

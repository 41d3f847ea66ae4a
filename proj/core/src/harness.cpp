#include "hmpii/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "hmpii/genus0.hpp"

namespace hmpii {

double y_scale(double k) { return std::pow(k, 2.0 / 3.0) / std::cbrt(2.0); }
cplx x_to_y(cplx x, double k) { return -y_scale(k) * x; }
cplx y_to_x(cplx y, double k) { return -y / y_scale(k); }
cplx scaled_value(cplx u, double k) { return -std::pow(2.0 * k, -1.0 / 3.0) * u; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Static-chunked loop; each index writes only its own slot, so output order is fixed.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    unsigned nt = std::max(1u, std::thread::hardware_concurrency());
    if (nt == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, n));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) f(i);
        });
    for (auto& th : pool) th.join();
}

// k-independent part of the asymptotic evaluation.
struct AsymPoint {
    Region region = Region::PoleFreeLeft;
    bool ok = false;
    std::string flag;
    cplx g0;
    Genus1State g1;
};

AsymPoint prepare_asym(cplx x) {
    AsymPoint p;
    try {
        p.region = classify_region(x);
        if (p.region == Region::ApexPoint) throw Error(ErrorKind::WrongRegion, "apex", x);
        if (is_pole_region(p.region))
            p.g1 = genus1_state(solve_endpoints(x));
        else
            p.g0 = genus0_value(x);
        p.ok = true;
    } catch (const Error& e) {
        p.flag = to_string(e.kind());
    }
    return p;
}

cplx finish_asym(const AsymPoint& p, cplx x, double k, double delta, const std::vector<cplx>& poles) {
    if (!p.ok) return {kNaN, kNaN};
    if (!is_pole_region(p.region)) return p.g0;
    if (!in_Sk(x, k, delta, poles)) throw Error(ErrorKind::NearPole, "x lies within the excised pole disc", x);
    return genus1_formula(p.g1, k);
}

Window bounding(const std::vector<cplx>& pts, double pad) {
    Window w{1e300, -1e300, 1e300, -1e300};
    for (cplx z : pts) {
        w.re_min = std::min(w.re_min, z.real());
        w.re_max = std::max(w.re_max, z.real());
        w.im_min = std::min(w.im_min, z.imag());
        w.im_max = std::max(w.im_max, z.imag());
    }
    return {w.re_min - pad, w.re_max + pad, w.im_min - pad, w.im_max + pad};
}

// Pole lists per k over the pole-region part of the sample cloud.
std::vector<cplx> poles_for(const std::vector<cplx>& xs, const std::vector<AsymPoint>& ap, double k, double delta) {
    std::vector<cplx> inside;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (ap[i].ok && is_pole_region(ap[i].region)) inside.push_back(xs[i]);
    if (inside.empty()) return {};
    return poles_near(bounding(inside, 0.0), k, delta);
}

struct Numeric {
    double k;
    bool have_bvp = false, have_atlas = false;
    BvpSolution bvp;
    VaultAtlas atlas;

    cplx at(cplx x) const {
        cplx y = x_to_y(x, k);
        if (have_bvp && x.imag() == 0.0) return scaled_value(eval_solution(bvp, y).first, k);
        if (!have_atlas) throw Error(ErrorKind::Uncovered, "no numeric backend for this point", y);
        return scaled_value(evaluate(atlas, y), k);
    }
};

std::vector<SampleRow> evaluate_points(const std::vector<cplx>& xs, const std::vector<double>& ks,
                                       const NumericOptions& opt) {
    boundary_trace();  // build the shared cache before going parallel
    std::vector<AsymPoint> ap(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { ap[i] = prepare_asym(xs[i]); });

    std::vector<SampleRow> rows;
    for (double k : ks) {
        if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
        std::vector<cplx> poles;
        std::string pole_flag;
        try {
            poles = poles_for(xs, ap, k, opt.delta);
        } catch (const Error& e) {
            pole_flag = to_string(e.kind());
        }

        Numeric num{k};
        std::vector<cplx> off_axis;
        double ymin = 0.0, ymax = 0.0;
        for (cplx x : xs) {
            cplx y = x_to_y(x, k);
            if (x.imag() == 0.0) {
                ymin = std::min(ymin, y.real());
                ymax = std::max(ymax, y.real());
            } else {
                off_axis.push_back(y);
            }
        }
        std::string num_flag;
        try {
            if (off_axis.size() < xs.size()) {
                num.bvp = real_axis_solution(k, ymin, ymax, opt);
                num.have_bvp = true;
            }
            if (!off_axis.empty()) {
                num.atlas = slice_atlas(k, off_axis, opt);
                num.have_atlas = true;
            }
        } catch (const Error& e) {
            num_flag = to_string(e.kind());
        }

        std::vector<SampleRow> part(xs.size());
        parallel_for(xs.size(), [&](std::size_t i) {
            SampleRow& r = part[i];
            r.x = xs[i];
            r.k = k;
            r.asym = r.num = {kNaN, kNaN};
            std::string flag = ap[i].ok ? "" : ap[i].flag;
            if (ap[i].ok && is_pole_region(ap[i].region) && !pole_flag.empty()) flag = pole_flag;
            if (flag.empty()) {
                try {
                    r.asym = finish_asym(ap[i], xs[i], k, opt.delta, poles);
                } catch (const Error& e) {
                    flag = to_string(e.kind());
                }
            }
            if (!num_flag.empty()) {
                if (flag.empty()) flag = num_flag;
            } else {
                try {
                    r.num = num.at(xs[i]);
                } catch (const Error& e) {
                    if (flag.empty()) flag = to_string(e.kind());
                }
            }
            r.abs_err = std::abs(r.asym - r.num);
            if (!std::isfinite(r.abs_err)) r.abs_err = kNaN;
            r.flag = flag.empty() ? "ok" : flag;
        });
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

}  // namespace

cplx asymptotic_value(cplx x, double k, double delta, const std::vector<cplx>& poles) {
    Region r = classify_region(x);
    if (!is_pole_region(r)) return genus0_value(x);
    Genus1State s = genus1_state(solve_endpoints(x));
    if (!in_Sk(x, k, delta, poles)) throw Error(ErrorKind::NearPole, "x lies within the excised pole disc", x);
    return genus1_formula(s, k);
}

BvpSolution real_axis_solution(double k, double y_min, double y_max, const NumericOptions& opt) {
    BvpProblem p;
    p.alpha = k + 0.5;
    p.y1 = std::min(-12.0, std::floor(y_min) - 1.0);
    p.y2 = std::max(12.0, std::ceil(y_max) + 1.0);
    p.N = opt.n_cheb;
    return solve_bvp(p);
}

VaultAtlas slice_atlas(double k, const std::vector<cplx>& ys, const NumericOptions& opt) {
    const double alpha = k + 0.5;
    BvpProblem p;
    p.alpha = alpha;
    p.N = opt.n_cheb;
    BvpSolution s = solve_bvp(p);
    auto [u0, up0] = eval_solution(s, 0.0);

    std::vector<cplx> pts = ys;
    pts.push_back(0.0);
    Window w = bounding(pts, 1.0);
    const double anchor_disc = 2.5, near = 1.0;
    NodeMask mask = [&](cplx y) {
        if (std::abs(y) <= anchor_disc) return true;
        for (cplx q : ys)
            if (std::abs(y - q) <= near) return true;
        Region r = classify_region(y_to_x(y, k));
        return is_pole_region(r) || r == Region::BoundaryPoint;
    };
    VaultConfig cfg;
    cfg.n = opt.taylor_order;
    cfg.h = opt.step;
    cfg.grid_spacing = std::min(0.5, opt.step);
    cfg.seed = opt.seed;
    return run_vault(w, 0.0, u0, up0, alpha, cfg, mask);
}

std::vector<cplx> poles_near(const Window& w, double k, double delta) {
    double r = delta / std::pow(k, 2.0 / 3.0);
    Window big{w.re_min - r, w.re_max + r, w.im_min - r, w.im_max + r};
    try {
        return predict_poles(big, k, {std::min(0.1, r / 2)});
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::WrongRegion) return {};
        throw;
    }
}

std::vector<SampleRow> run_slice(const SliceJob& job, const NumericOptions& opt) {
    if (job.samples < 2) throw std::invalid_argument("a slice needs at least two samples");
    std::vector<cplx> xs(job.samples);
    double im = job.mode == SliceJob::Mode::RealAxis ? 0.0 : job.im_offset;
    for (int i = 0; i < job.samples; ++i)
        xs[i] = cplx(job.x_min + (job.x_max - job.x_min) * i / (job.samples - 1), im);
    return evaluate_points(xs, job.k_list, opt);
}

std::vector<SampleRow> run_grid(const GridJob& job, const NumericOptions& opt) {
    if (job.res_re < 8 || job.res_im < 8) throw std::invalid_argument("grid resolution must be at least 8 per axis");
    std::vector<cplx> xs;
    const Window& w = job.window;
    for (int j = 0; j < job.res_im; ++j)
        for (int i = 0; i < job.res_re; ++i)
            xs.emplace_back(w.re_min + (w.re_max - w.re_min) * i / (job.res_re - 1),
                            w.im_min + (w.im_max - w.im_min) * j / (job.res_im - 1));
    return evaluate_points(xs, {job.k}, opt);
}

void write_rows_csv(std::ostream& os, const std::vector<SampleRow>& rows) {
    os << "x_re,x_im,asym_re,asym_im,num_re,num_im,abs_err,flag\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%.6e,%s\n", r.x.real(), r.x.imag(),
                      r.asym.real(), r.asym.imag(), r.num.real(), r.num.imag(), r.abs_err, r.flag.c_str());
        os << buf;
    }
}

}  // namespace hmpii

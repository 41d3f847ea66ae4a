#include "hmpii/pade_vault.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"

namespace hmpii {

TaylorJet taylor_from_ivp(cplx y0, cplx u0, cplx u0prime, double alpha, int n) {
    if (n < 2 || n % 2) throw std::invalid_argument("jet order must be even and at least 2");
    TaylorJet j;
    j.y0 = y0;
    j.alpha = alpha;
    j.c.assign(n + 1, 0.0);
    j.c[0] = u0;
    j.c[1] = u0prime;
    std::vector<cplx> sq(n + 1, 0.0);  // coefficients of u^2
    for (int k = 0; k + 2 <= n; ++k) {
        sq[k] = 0.0;
        for (int i = 0; i <= k; ++i) sq[k] += j.c[i] * j.c[k - i];
        cplx cube = 0.0;
        for (int i = 0; i <= k; ++i) cube += sq[i] * j.c[k - i];
        cplx prev = k >= 1 ? j.c[k - 1] : 0.0;
        cplx rhs = 2.0 * cube + y0 * j.c[k] + prev - (k == 0 ? alpha : 0.0);
        j.c[k + 2] = rhs / double((k + 2) * (k + 1));
        if (!std::isfinite(std::abs(j.c[k + 2])) || std::abs(j.c[k + 2]) > 1e100)
            throw Error(ErrorKind::Overflow, "Taylor coefficients diverge", y0);
    }
    return j;
}

double jet_residual(const TaylorJet& j) {
    const int n = j.order();
    double worst = 0.0;
    for (int k = 0; k + 2 <= n; ++k) {
        cplx cube = 0.0;
        double mag = 0.0;
        for (int a = 0; a <= k; ++a)
            for (int b = 0; a + b <= k; ++b) {
                cplx t = j.c[a] * j.c[b] * j.c[k - a - b];
                cube += t;
                mag += std::abs(t);
            }
        cplx prev = k >= 1 ? j.c[k - 1] : 0.0;
        cplx lhs = double((k + 2) * (k + 1)) * j.c[k + 2];
        cplx rhs = 2.0 * cube + j.y0 * j.c[k] + prev - (k == 0 ? j.alpha : 0.0);
        double ref = std::abs(lhs) + 2.0 * mag + std::abs(j.y0 * j.c[k]) + std::abs(prev) + (k == 0 ? std::abs(j.alpha) : 0.0);
        if (ref > 0) worst = std::max(worst, std::abs(lhs - rhs) / ref);
    }
    return worst;
}

cplx PadeApprox::numer(cplx h) const {
    cplx s = 0.0;
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) s = s * h + a[i];
    return s;
}

cplx PadeApprox::denom(cplx h) const {
    cplx s = 0.0;
    for (int i = static_cast<int>(b.size()) - 1; i >= 0; --i) s = s * h + b[i];
    return s;
}

cplx PadeApprox::eval(cplx h) const { return numer(h) / denom(h); }

cplx PadeApprox::deriv(cplx h) const {
    cplx da = 0.0, db = 0.0;
    for (int i = static_cast<int>(a.size()) - 1; i >= 1; --i) da = da * h + double(i) * a[i];
    for (int i = static_cast<int>(b.size()) - 1; i >= 1; --i) db = db * h + double(i) * b[i];
    cplx p = numer(h), q = denom(h);
    return (da * q - p * db) / (q * q);
}

std::vector<cplx> PadeApprox::denominator_roots() const {
    int deg = static_cast<int>(b.size()) - 1;
    while (deg > 0 && std::abs(b[deg]) < 1e-300) --deg;
    if (deg == 0) return {};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) C(i, deg - 1) = -b[i] / b[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<cplx> r(deg);
    for (int i = 0; i < deg; ++i) {
        // polish against the polynomial itself
        cplx z = es.eigenvalues()(i);
        for (int it = 0; it < 3; ++it) {
            cplx q = 0.0, dq = 0.0;
            for (int k = deg; k >= 0; --k) {
                dq = dq * z + q;
                q = q * z + b[k];
            }
            if (dq == 0.0) break;
            cplx zn = z - q / dq;
            if (!std::isfinite(zn.real()) || !std::isfinite(zn.imag())) break;
            z = zn;
        }
        r[i] = z;
    }
    return r;
}

namespace {

// Solve for b with coefficients rescaled by rho^k; returns false when the system cannot be met.
// The Toeplitz system is badly conditioned inside pole fields, so it is solved in extended precision.
bool pade_solve(const std::vector<cplx>& c, int nu, PadeApprox& out) {
    using R = long double;
    using LC = std::complex<R>;
    using Mat = Eigen::Matrix<LC, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<LC, Eigen::Dynamic, 1>;
    const int n = 2 * nu;
    R rho = 1.0L;
    {
        // radius estimate from the tail of the jet
        R m = 0.0L;
        for (int k = 1; k <= n; ++k)
            if (std::abs(c[k]) > 0) m = std::max(m, std::pow(R(std::abs(c[k])), 1.0L / k));
        if (m > 0) rho = 1.0L / m;
    }
    std::vector<LC> cs(n + 1);
    for (int k = 0; k <= n; ++k) cs[k] = LC(c[k]) * std::pow(rho, R(k));
    std::vector<LC> bs(nu + 1, LC(0));
    bs[0] = 1.0L;
    if (nu > 0) {
        Mat M(nu, nu);
        Vec rhs(nu);
        for (int r = 0; r < nu; ++r) {
            int m = nu + 1 + r;
            for (int jj = 1; jj <= nu; ++jj) M(r, jj - 1) = m - jj >= 0 ? cs[m - jj] : LC(0);
            rhs(r) = -cs[m];
        }
        if (M.cwiseAbs().maxCoeff() == 0.0L) {
            if (rhs.cwiseAbs().maxCoeff() != 0.0L) return false;
        } else {
            // accept an ill-conditioned system as long as the equations are met
            Vec x = M.fullPivLu().solve(rhs);
            R ref = rhs.norm() + M.norm() * x.norm();
            if (!x.allFinite() || (M * x - rhs).norm() > 1e-14L * ref) return false;
            for (int jj = 1; jj <= nu; ++jj) bs[jj] = x(jj - 1);
        }
    }
    std::vector<LC> bl(nu + 1);
    for (int jj = 0; jj <= nu; ++jj) bl[jj] = bs[jj] / std::pow(rho, R(jj));
    out.b.assign(nu + 1, 0.0);
    out.a.assign(nu + 1, 0.0);
    for (int jj = 0; jj <= nu; ++jj) out.b[jj] = cplx(bl[jj]);
    for (int i = 0; i <= nu; ++i) {
        LC s = 0.0L;
        for (int jj = 0; jj <= i; ++jj) s += bl[jj] * LC(c[i - jj]);
        out.a[i] = cplx(s);
    }
    for (auto v : out.b)
        if (!std::isfinite(std::abs(v))) return false;
    return true;
}

}  // namespace

PadeApprox pade_from_taylor(const TaylorJet& j, int nu) {
    if (nu < 0) nu = j.order() / 2;
    if (2 * nu > j.order()) throw std::invalid_argument("Pade type exceeds jet order");
    PadeApprox p;
    p.center = j.y0;
    for (int tries = 0; nu - tries >= 0; ++tries)
        if (pade_solve(j.c, nu - tries, p)) return p;
    throw Error(ErrorKind::SingularSystem, "Pade Toeplitz system is rank deficient", j.y0);
}

namespace {

double min_dist_sq(const std::vector<AtlasCenter>& cs, cplx y, int& idx) {
    double best = 1e300;
    idx = -1;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        double d = std::norm(cs[i].pade.center - y);
        if (d < best) {
            best = d;
            idx = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace

int nearest_center(const VaultAtlas& atlas, cplx y) {
    int idx;
    min_dist_sq(atlas.centers, y, idx);
    return idx;
}

VaultAtlas run_vault(const Window& window, cplx y0, cplx u0, cplx u0prime, double alpha, const VaultConfig& cfg,
                     const NodeMask& mask) {
    if (cfg.grid_spacing > cfg.h + 1e-15) throw std::invalid_argument("grid spacing must not exceed the step h");
    VaultAtlas at;
    at.alpha = alpha;
    at.config = cfg;
    at.window = window;
    for (double im = window.im_min; im <= window.im_max + 1e-12; im += cfg.grid_spacing)
        for (double re = window.re_min; re <= window.re_max + 1e-12; re += cfg.grid_spacing)
            if (!mask || mask({re, im})) at.nodes.emplace_back(re, im);
    std::vector<char> alive(at.nodes.size(), 1);
    std::size_t n_alive = at.nodes.size();
    const double h = cfg.h;
    auto remove_near = [&](cplx y) {
        int removed = 0;
        for (std::size_t i = 0; i < at.nodes.size(); ++i)
            if (alive[i] && std::abs(at.nodes[i] - y) <= h) {
                alive[i] = 0;
                --n_alive;
                ++removed;
            }
        return removed;
    };
    auto make_center = [&](cplx y, cplx u, cplx up, int parent) {
        TaylorJet jet = taylor_from_ivp(y, u, up, alpha, cfg.n);
        return AtlasCenter{pade_from_taylor(jet), u, up, parent};
    };
    at.centers.push_back(make_center(y0, u0, u0prime, -1));
    remove_near(y0);
    std::mt19937_64 rng(cfg.seed);
    int stall = 0;
    const double angles[] = {0.0, 22.5, -22.5, 45.0, -45.0};
    while (n_alive > 0) {
        std::uniform_int_distribution<std::size_t> pick(0, n_alive - 1);
        std::size_t r = pick(rng), ti = 0;
        for (std::size_t i = 0, seen = 0; i < at.nodes.size(); ++i)
            if (alive[i] && seen++ == r) {
                ti = i;
                break;
            }
        cplx target = at.nodes[ti];
        int cur;
        min_dist_sq(at.centers, target, cur);
        ++at.paths;
        while (alive[ti]) {
            const AtlasCenter& c = at.centers[cur];
            cplx d = target - c.pade.center;
            double len = std::min(h, std::abs(d));
            struct Cand {
                double mag;
                int order;
                cplx step, u, up;
            };
            std::vector<Cand> cands;
            for (int o = 0; o < 5; ++o) {
                cplx step = len * d / std::abs(d) * std::polar(1.0, angles[o] * std::numbers::pi / 180.0);
                cplx q = c.pade.denom(step);
                if (std::abs(q) < 1e-12) continue;
                cplx u = c.pade.eval(step), up = c.pade.deriv(step);
                if (!std::isfinite(std::abs(u)) || !std::isfinite(std::abs(up))) continue;
                cands.push_back({std::abs(u), o, step, u, up});
            }
            std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
                return x.mag != y.mag ? x.mag < y.mag : x.order < y.order;
            });
            bool placed = false;
            for (const Cand& cd : cands) {
                try {
                    cplx y = c.pade.center + cd.step;
                    at.centers.push_back(make_center(y, cd.u, cd.up, cur));
                    cur = static_cast<int>(at.centers.size()) - 1;
                    placed = true;
                    stall = remove_near(y) > 0 ? 0 : stall + 1;
                    break;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::Overflow && e.kind() != ErrorKind::SingularSystem) throw;
                }
            }
            if (!placed) throw Error(ErrorKind::Overflow, "every candidate step failed", c.pade.center);
            if (stall >= cfg.max_stall) throw Error(ErrorKind::PathStall, "no nodes removed for too many steps", target);
        }
    }
    return at;
}

cplx evaluate(const VaultAtlas& atlas, cplx y) {
    int idx;
    double d2 = min_dist_sq(atlas.centers, y, idx);
    if (idx < 0 || std::sqrt(d2) > 2.0 * atlas.config.h) throw Error(ErrorKind::Uncovered, "no center within 2h", y);
    const PadeApprox& p = atlas.centers[idx].pade;
    cplx off = y - p.center;
    cplx q = p.denom(off);
    if (std::abs(q) < 1e-12) {
        cplx best = 0.0;
        double bd = 1e300;
        for (cplx r : p.denominator_roots())
            if (std::abs(r - off) < bd) {
                bd = std::abs(r - off);
                best = r;
            }
        throw Error(ErrorKind::PoleProximity, "denominator nearly vanishes", p.center + best);
    }
    return p.numer(off) / q;
}

namespace {

nlohmann::json cjson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }
cplx from_cjson(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::string atlas_to_json(const VaultAtlas& at) {
    nlohmann::json j;
    j["version"] = 1;
    j["alpha"] = at.alpha;
    j["h"] = at.config.h;
    j["n"] = at.config.n;
    j["seed"] = at.config.seed;
    j["grid_spacing"] = at.config.grid_spacing;
    j["window"] = {at.window.re_min, at.window.re_max, at.window.im_min, at.window.im_max};
    j["paths"] = at.paths;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : at.centers) {
        nlohmann::json e;
        e["y"] = cjson(c.pade.center);
        e["u"] = cjson(c.u);
        e["up"] = cjson(c.up);
        e["parent"] = c.parent;
        e["a"] = nlohmann::json::array();
        e["b"] = nlohmann::json::array();
        for (auto v : c.pade.a) e["a"].push_back(cjson(v));
        for (auto v : c.pade.b) e["b"].push_back(cjson(v));
        cs.push_back(std::move(e));
    }
    j["centers"] = std::move(cs);
    return j.dump();
}

VaultAtlas atlas_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1) throw std::runtime_error("unsupported atlas version");
    VaultAtlas at;
    at.alpha = j.at("alpha").get<double>();
    at.config.h = j.at("h").get<double>();
    at.config.n = j.at("n").get<int>();
    at.config.seed = j.at("seed").get<unsigned long long>();
    at.config.grid_spacing = j.value("grid_spacing", at.config.h);
    if (j.contains("window")) {
        auto w = j["window"];
        at.window = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(), w.at(3).get<double>()};
    }
    at.paths = j.value("paths", 0);
    for (const auto& e : j.at("centers")) {
        AtlasCenter c;
        c.pade.center = from_cjson(e.at("y"));
        for (const auto& v : e.at("a")) c.pade.a.push_back(from_cjson(v));
        for (const auto& v : e.at("b")) c.pade.b.push_back(from_cjson(v));
        c.u = e.contains("u") ? from_cjson(e["u"]) : c.pade.a.at(0);
        c.up = e.contains("up") ? from_cjson(e["up"]) : cplx(0.0);
        c.parent = e.value("parent", -1);
        at.centers.push_back(std::move(c));
    }
    return at;
}

}  // namespace hmpii

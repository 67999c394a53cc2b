#include "stokes3d/cli_io.hpp"

#include "stokes3d/errors.hpp"
#include "stokes3d/level_sets.hpp"
#include "stokes3d/orbits.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace stokes3d {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- formatting

std::string fixed8(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8f", x);
    std::string s(buf);
    if (s == "-0.00000000") s = "0.00000000";
    return s;
}

namespace {

std::string hexfloat(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

std::string sci(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

std::string full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------- config parsing

Vec2 vec2(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw PreconditionError(what + ": expected [x, y]");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

// columns given as a list of vectors
Mat2 columns(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2) throw PreconditionError(what + ": expected two vectors");
    Mat2 M;
    M.col(0) = vec2(j[0], what);
    M.col(1) = vec2(j[1], what);
    return M;
}

Index2 index2(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw PreconditionError(what + ": expected an integer pair");
    return {j[0].get<long>(), j[1].get<long>()};
}

WeightMatrix weights(const json& j, const std::string& what) {
    WeightMatrix K;
    if (!j.is_array()) throw PreconditionError(what + ": expected a list of integer columns");
    for (const auto& c : j) {
        if (!c.is_array()) throw PreconditionError(what + ": expected integer columns");
        WeightColumn col;
        for (const auto& x : c) {
            if (!x.is_number_integer()) throw PreconditionError(what + ": non-integer weight");
            col.push_back(x.get<long>());
        }
        K.push_back(col);
    }
    return K;
}

double positive(const json& j, const char* key, double def, const std::string& where) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number()) throw PreconditionError(where + "." + key + " must be a number");
    const double x = j[key].get<double>();
    if (!(x > 0.0)) throw PreconditionError(where + "." + key + " must be positive");
    return x;
}

} // namespace

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw PreconditionError("config must be an object");
    RunConfig c;
    c.source = j;

    if (j.contains("lattice")) {
        const json& L = j["lattice"];
        if (L.contains("generators")) c.lattice = LatticeSpec::from_generators(columns(L["generators"], "lattice.generators"));
        else if (L.contains("dual")) c.lattice = LatticeSpec::from_dual(columns(L["dual"], "lattice.dual"));
        else if (L.value("type", std::string("square")) == "square") c.lattice = LatticeSpec::square();
        else throw PreconditionError("lattice: give generators, dual or type=square");
    }
    if (j.contains("params")) {
        const json& p = j["params"];
        c.params.g = p.value("g", 1.0);
        c.params.kappa = p.value("kappa", 1.0);
        if (p.contains("depth")) {
            if (p["depth"].is_string()) {
                if (p["depth"].get<std::string>() != "inf")
                    throw PreconditionError("params.depth: number or \"inf\"");
            } else c.params.depth = p["depth"].get<double>();
        }
    }
    c.params.validate();
    if (j.contains("c_star")) c.c_star = vec2(j["c_star"], "c_star");
    if (j.contains("design")) {
        const json& d = j["design"];
        for (const auto& t : d.at("targets")) c.design_targets.push_back(index2(t, "design.targets"));
        if (d.contains("knobs")) c.design_knobs = d["knobs"].get<std::vector<std::string>>();
        else c.design_knobs = {"c", "aspect"};
    }
    if (j.contains("momentum")) c.momentum = vec2(j["momentum"], "momentum");
    c.tau_res = positive(j, "tau_res", c.tau_res, "config");
    c.eps_valid = positive(j, "eps_valid", c.eps_valid, "config");
    if (j.contains("web")) {
        const json& w = j["web"];
        c.web_radius = w.value("radius", c.web_radius);
        if (c.web_radius < 0.0) throw PreconditionError("web.radius must be nonnegative");
    }
    if (j.contains("regime")) {
        const json& r = j["regime"];
        c.regime.radius = positive(r, "radius", c.regime.radius, "regime");
        c.regime.near_factor = positive(r, "near_factor", c.regime.near_factor, "regime");
        c.regime.det_floor = positive(r, "det_floor", c.regime.det_floor, "regime");
        c.regime.max_iterations = r.value("max_iterations", c.regime.max_iterations);
    }
    if (j.contains("model")) c.model = j["model"];
    if (j.contains("flow")) {
        const json& f = j["flow"];
        c.n_starts = f.value("n_starts", 0);
        c.flow_tol = positive(f, "tol", c.flow_tol, "flow");
        c.grad_tol = positive(f, "grad_tol", c.grad_tol, "flow");
        c.drift_tol = positive(f, "drift_tol", c.drift_tol, "flow");
        c.t_max = positive(f, "t_max", c.t_max, "flow");
        c.max_steps = f.value("max_steps", c.max_steps);
        if (f.contains("dt")) c.fixed_dt = positive(f, "dt", 1.0, "flow");
    }
    if (j.contains("cohomology")) {
        const json& h = j["cohomology"];
        if (h.contains("K1")) c.K1 = weights(h["K1"], "cohomology.K1");
        if (h.contains("K2")) c.K2 = weights(h["K2"], "cohomology.K2");
        if (h.contains("search")) {
            c.cup_coef_bound = h["search"].value("coef_bound", c.cup_coef_bound);
            c.cup_max_length = h["search"].value("max_length", 0);
        }
    }
    if (j.contains("straighten")) c.straighten_samples = j["straighten"].value("samples", c.straighten_samples);
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("budget")) c.budget = j["budget"].get<std::uint64_t>();
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw PreconditionError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

std::string config_hash(const RunConfig& cfg) {
    json j = cfg.source;
    j["seed"] = cfg.seed;
    j["budget"] = cfg.budget;
    j.erase("out"); // output location does not change the content
    return hex64(fnv1a(j.dump()));
}

// ---------------------------------------------------------------- resolution and cache

namespace {

struct Setup {
    Vec2 c_star;
    PhysicalParams params;
    LatticeSpec lattice;
    std::optional<Design> design;
};

Setup resolve(const RunConfig& cfg) {
    Setup s{cfg.c_star.value_or(Vec2::Zero()), cfg.params, cfg.lattice, std::nullopt};
    if (!cfg.design_targets.empty()) {
        DesignOptions o;
        o.tau = cfg.tau_res;
        o.budget = cfg.budget;
        s.design = design_resonance(cfg.design_targets, DesignKnobs::parse(cfg.design_knobs), s.c_star,
                                    cfg.params, cfg.lattice, o);
        s.c_star = s.design->c_star;
        s.params = s.design->params;
        s.lattice = s.design->lattice;
    } else if (!cfg.c_star) {
        throw PreconditionError("config needs c_star or design targets");
    }
    return s;
}

fs::path cache_dir(const RunConfig& cfg) {
    if (const char* e = std::getenv(kCacheEnv); e && *e) return fs::path(e);
    return cfg.out_dir / "cache";
}

std::string cache_key(const Setup& s, double tau, double radius) {
    std::ostringstream os;
    os << "dual " << hexfloat(s.lattice.dual(0, 0)) << ' ' << hexfloat(s.lattice.dual(1, 0)) << ' '
       << hexfloat(s.lattice.dual(0, 1)) << ' ' << hexfloat(s.lattice.dual(1, 1)) << " g "
       << hexfloat(s.params.g) << " kappa " << hexfloat(s.params.kappa) << " depth "
       << (s.params.depth ? hexfloat(*s.params.depth) : "inf") << " c " << hexfloat(s.c_star.x())
       << ' ' << hexfloat(s.c_star.y()) << " tau " << hexfloat(tau) << " radius "
       << hexfloat(radius);
    return os.str();
}

ResonantSet resonances(const RunConfig& cfg, const Setup& s, bool* hit) {
    const double radius = enumeration_radius(s.c_star, s.params, cfg.tau_res);
    const std::string key = cache_key(s, cfg.tau_res, radius);
    const fs::path file = cache_dir(cfg) / ("resonances-" + hex64(fnv1a(key)) + ".json");
    if (hit) *hit = false;
    {
        std::ifstream in(file);
        if (in) {
            try {
                const json j = json::parse(in);
                if (j.at("key").get<std::string>() == key) {
                    ResonantSet rs;
                    rs.c_star = s.c_star;
                    rs.params = s.params;
                    rs.lattice = s.lattice;
                    rs.tau = cfg.tau_res;
                    rs.enumeration_radius = radius;
                    for (const auto& k : j.at("indices"))
                        rs.vectors.push_back(make_dual(s.lattice, {k[0].get<long>(), k[1].get<long>()}));
                    rs.warnings = j.at("warnings").get<std::vector<std::string>>();
                    if (hit) *hit = true;
                    return rs;
                }
            } catch (const json::exception&) {
                // unreadable entry: recompute and overwrite
            }
        }
    }
    ResonantSet rs = resonant_set(s.c_star, s.params, s.lattice, cfg.tau_res, cfg.budget);
    json j;
    j["key"] = key;
    j["indices"] = json::array();
    for (const auto& k : rs.indices()) j["indices"].push_back({k[0], k[1]});
    j["warnings"] = rs.warnings;
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp);
        out << j.dump(1) << '\n';
    }
    fs::rename(tmp, file, ec); // a failed cache write is not an error
    return rs;
}

} // namespace

ResonantSet cached_resonant_set(const RunConfig& cfg, bool* hit) {
    return resonances(cfg, resolve(cfg), hit);
}

// ---------------------------------------------------------------- models

ModelHamiltonian parse_model_terms(const Kernel& K, const json& terms) {
    ModelHamiltonian M;
    const int n = K.size();
    if (!terms.is_array()) throw PreconditionError("model terms must be a list");
    for (const auto& t : terms) {
        Term T{std::vector<int>(std::size_t(n), 0), std::vector<int>(std::size_t(n), 0), 0.0,
               Vec2::Zero()};
        auto fill = [&](const char* key, std::vector<int>& e) {
            if (!t.contains(key)) return;
            for (const auto& f : t[key]) {
                if (!f.is_array() || f.size() != 3)
                    throw PreconditionError(std::string("model ") + key + ": entries are [k1, k2, power]");
                const int i = K.find({f[0].get<long>(), f[1].get<long>()});
                if (i < 0)
                    throw PreconditionError("model refers to a non-resonant vector (" +
                                            std::to_string(f[0].get<long>()) + "," +
                                            std::to_string(f[1].get<long>()) + ")");
                e[std::size_t(i)] += f[2].get<int>();
            }
        };
        fill("z", T.a);
        fill("zbar", T.b);
        T.coef = t.value("coef", 0.0);
        if (t.contains("dc")) T.dc = vec2(t["dc"], "model dc");
        M.terms.push_back(std::move(T));
    }
    validate_model(K, M);
    return M;
}

json model_to_json(const Kernel& K, const ModelHamiltonian& M) {
    json terms = json::array();
    for (const auto& T : M.terms) {
        json t;
        t["z"] = json::array();
        t["zbar"] = json::array();
        for (int i = 0; i < K.size(); ++i) {
            if (T.a[i]) t["z"].push_back({K.V[i].k[0], K.V[i].k[1], T.a[i]});
            if (T.b[i]) t["zbar"].push_back({K.V[i].k[0], K.V[i].k[1], T.b[i]});
        }
        t["coef"] = T.coef;
        t["dc"] = {T.dc.x(), T.dc.y()};
        terms.push_back(t);
    }
    return json{{"terms", terms}};
}

ModelHamiltonian load_model(const Kernel& K, const json& spec, std::uint64_t seed) {
    if (spec.is_null()) throw PreconditionError("config has no model");
    if (spec.contains("file")) {
        std::ifstream in(spec["file"].get<std::string>());
        if (!in) throw PreconditionError("cannot read model file " + spec["file"].get<std::string>());
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw PreconditionError(std::string("model file: ") + e.what());
        }
        return parse_model_terms(K, j.at("terms"));
    }
    if (spec.contains("terms")) return parse_model_terms(K, spec["terms"]);
    if (spec.contains("generate")) {
        const json& g = spec["generate"];
        RandomModelOptions o;
        o.degree_cap = g.value("degree_cap", o.degree_cap);
        o.action_only = g.value("action_only", o.action_only);
        o.c_dependent = g.value("c_dependent", o.c_dependent);
        o.coef_scale = g.value("coef_scale", o.coef_scale);
        o.dc_scale = g.value("dc_scale", o.dc_scale);
        std::mt19937_64 rng(g.value("seed", seed));
        ModelHamiltonian M = random_model(K, rng, o);
        validate_model(K, M);
        return M;
    }
    if (spec.contains("norm4")) return norm4_model(K, spec["norm4"].get<double>());
    throw PreconditionError("model: give file, terms, generate or norm4");
}

// ---------------------------------------------------------------- commands

namespace {

struct Context {
    RunConfig cfg;
    std::ostream& out;
    std::string hash;

    std::string stamp(const char* comment) const {
        return std::string(comment) + " stokes3d " + kVersion + " seed=" + std::to_string(cfg.seed) +
               " config=" + hash;
    }
    fs::path path(const std::string& name) const {
        fs::create_directories(cfg.out_dir);
        return cfg.out_dir / name;
    }
};

void write_file(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw PreconditionError("cannot write " + p.string());
    f << s;
}

std::string vec_str(const Vec2& v) { return "(" + full(v.x()) + ", " + full(v.y()) + ")"; }
std::string idx_str(const Index2& k) {
    return "(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + ")";
}

// ---- web

int cmd_web(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const std::vector<DualVector> V = enumerate_dual(cfg.lattice, cfg.web_radius, cfg.budget, true);
    std::ostringstream csv;
    csv << ctx.stamp("#") << " radius=" << fixed8(cfg.web_radius) << '\n';
    csv << "k1,k2,distance,omega,j1,j2\n";
    double reach = 0.0, nearest = INFINITY;
    std::vector<BifurcationLine> lines;
    for (const auto& j : V) {
        const BifurcationLine b = bifurcation_line(j, cfg.params);
        lines.push_back(b);
        reach = std::max(reach, b.offset);
        nearest = std::min(nearest, b.offset);
        csv << j.k[0] << ',' << j.k[1] << ',' << fixed8(b.offset) << ','
            << fixed8(omega(j.j, cfg.params)) << ',' << fixed8(j.j.x()) << ',' << fixed8(j.j.y())
            << '\n';
    }
    write_file(ctx.path("web.csv"), csv.str());

    // c-plane window [-L, L]^2 on a 600 px canvas
    const double L = reach > 0.0 ? 1.25 * reach : 1.0, px = 600.0;
    auto X = [&](double x) { return fixed8((x + L) / (2 * L) * px); };
    auto Y = [&](double y) { return fixed8((L - y) / (2 * L) * px); };
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n"
        << "<!--" << ctx.stamp("") << " -->\n"
        << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n"
        << "<line x1=\"" << X(-L) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(L) << "\" y2=\"" << Y(0)
        << "\" stroke=\"#bbb\"/>\n"
        << "<line x1=\"" << X(0) << "\" y1=\"" << Y(-L) << "\" x2=\"" << X(0) << "\" y2=\"" << Y(L)
        << "\" stroke=\"#bbb\"/>\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        // clip {p0 + s t} to the window, p0 = offset * normal
        const Vec2 p0 = lines[i].offset * lines[i].normal, t = perp(lines[i].normal);
        double lo = -INFINITY, hi = INFINITY;
        bool visible = true;
        for (int d = 0; d < 2; ++d) {
            if (std::abs(t[d]) < 1e-15) {
                if (std::abs(p0[d]) > L) visible = false;
                continue;
            }
            double s1 = (-L - p0[d]) / t[d], s2 = (L - p0[d]) / t[d];
            if (s1 > s2) std::swap(s1, s2);
            lo = std::max(lo, s1);
            hi = std::min(hi, s2);
        }
        if (!visible || lo >= hi) continue;
        const Vec2 a = p0 + lo * t, b = p0 + hi * t;
        svg << "<line x1=\"" << X(a.x()) << "\" y1=\"" << Y(a.y()) << "\" x2=\"" << X(b.x())
            << "\" y2=\"" << Y(b.y()) << "\" stroke=\"#1f4e9c\" stroke-width=\"0.8\"><title>k="
            << idx_str(V[i].k) << "</title></line>\n";
    }
    if (cfg.c_star)
        svg << "<circle cx=\"" << X(cfg.c_star->x()) << "\" cy=\"" << Y(cfg.c_star->y())
            << "\" r=\"3\" fill=\"#c0392b\"/>\n";
    svg << "</svg>\n";
    write_file(ctx.path("web.svg"), svg.str());

    ctx.out << "web: " << V.size() << " lines up to radius " << fixed8(cfg.web_radius);
    if (!V.empty()) ctx.out << ", nearest at distance " << fixed8(nearest);
    ctx.out << '\n';
    return 0;
}

// ---- resonances

std::string resonance_table(const Context& ctx, const ResonantSet& rs) {
    std::ostringstream csv;
    csv << ctx.stamp("#") << '\n' << "k1,k2,j1,j2,omega,residual,class\n";
    std::vector<DirectionClass> D;
    if (!rs.vectors.empty()) D = direction_classes(rs.lattice, rs.vectors);
    for (std::size_t i = 0; i < rs.vectors.size(); ++i) {
        const auto& j = rs.vectors[i];
        int cls = -1;
        for (std::size_t d = 0; d < D.size(); ++d)
            for (int m : D[d].members)
                if (m == int(i)) cls = int(d);
        csv << j.k[0] << ',' << j.k[1] << ',' << fixed8(j.j.x()) << ',' << fixed8(j.j.y()) << ','
            << fixed8(omega(j.j, rs.params)) << ',' << sci(omega(j.j, rs.params) - rs.c_star.dot(j.j))
            << ',' << cls << '\n';
    }
    return csv.str();
}

int cmd_resonances(Context& ctx) {
    const Setup s = resolve(ctx.cfg);
    bool hit = false;
    const ResonantSet rs = resonances(ctx.cfg, s, &hit);
    write_file(ctx.path("resonances.csv"), resonance_table(ctx, rs));
    ctx.out << "resonances: #V = " << rs.vectors.size() << " at c* = " << vec_str(s.c_star)
            << " (enumeration radius " << full(rs.enumeration_radius) << (hit ? ", cached" : "")
            << ")\n";
    for (const auto& w : rs.warnings) ctx.out << "warning: " << w << '\n';
    return 0;
}

// ---- design

int cmd_design(Context& ctx) {
    if (ctx.cfg.design_targets.empty()) throw PreconditionError("design needs design.targets");
    const Setup s = resolve(ctx.cfg);
    const Design& d = *s.design;
    json j;
    j["provenance"] = {{"version", kVersion}, {"seed", ctx.cfg.seed}, {"config", ctx.hash}};
    j["c_star"] = {d.c_star.x(), d.c_star.y()};
    j["params"] = {{"g", d.params.g}, {"kappa", d.params.kappa}};
    if (d.params.depth) j["params"]["depth"] = *d.params.depth;
    else j["params"]["depth"] = "inf";
    j["lattice"]["dual"] = {{d.lattice.dual(0, 0), d.lattice.dual(1, 0)},
                            {d.lattice.dual(0, 1), d.lattice.dual(1, 1)}};
    j["lattice"]["generators"] = {{d.lattice.W(0, 0), d.lattice.W(1, 0)},
                                  {d.lattice.W(0, 1), d.lattice.W(1, 1)}};
    j["iterations"] = d.iterations;
    j["residuals"] = d.residuals;
    const ResonantSet rs = resonances(ctx.cfg, s, nullptr);
    j["resonant"] = json::array();
    for (const auto& k : rs.indices()) j["resonant"].push_back({k[0], k[1]});
    write_file(ctx.path("design.json"), j.dump(2) + '\n');
    ctx.out << "design: c* = " << vec_str(d.c_star) << ", #V = " << rs.vectors.size() << ", "
            << d.iterations << " iterations\n";
    return 0;
}

// ---- classify

struct Classified {
    Setup setup;
    ResonantSet rs;
    std::optional<Kernel> K;
    std::optional<ConeClassification> cc;
    std::optional<int> bound;
    std::string message;
};

std::string verdict_message(Verdict v) {
    switch (v) {
    case Verdict::OutsideCone: return "no Stokes wave with this momentum";
    case Verdict::ZeroMomentum: return "u=0";
    case Verdict::BoundaryCone: return "momentum on the cone boundary; only waves of the boundary classes";
    case Verdict::InteriorNoncollinear: return "Stokes waves exist; noncollinear momentum";
    case Verdict::InteriorCollinearUnique: return "Stokes waves exist; 2D branch plus 3D waves";
    case Verdict::InteriorCollinearDouble: return "Stokes waves exist; multiplicity indeterminate";
    }
    return "";
}

Classified classify(const Context& ctx) {
    Classified C{resolve(ctx.cfg), {}, std::nullopt, std::nullopt, std::nullopt, {}};
    C.rs = resonances(ctx.cfg, C.setup, nullptr);
    if (C.rs.vectors.empty()) {
        C.message = "no bifurcation at this speed";
        return C;
    }
    C.K = Kernel::from(C.rs);
    if (!ctx.cfg.momentum) throw PreconditionError("classify needs a momentum");
    ClassifyOptions o;
    o.eps_valid = ctx.cfg.eps_valid;
    C.cc = classify_momentum(*ctx.cfg.momentum, C.K->V, C.K->dirs, C.K->c_star, o);
    const Verdict v = C.cc->verdict;
    if (v == Verdict::InteriorNoncollinear || v == Verdict::InteriorCollinearUnique)
        C.bound = critical_value_bound(*C.K, *C.cc);
    C.message = verdict_message(v);
    return C;
}

std::string classification_text(const Context& ctx, const Classified& C) {
    std::ostringstream os;
    os << "resonant vectors: " << C.rs.vectors.size() << '\n';
    for (const auto& j : C.rs.vectors) os << "  k = " << idx_str(j.k) << ", j = " << vec_str(j.j) << '\n';
    if (!C.cc) {
        os << "verdict: " << C.message << '\n';
        return os.str();
    }
    const auto& cc = *C.cc;
    os << "direction classes: " << C.K->dirs.size() << '\n';
    os << "momentum: " << vec_str(cc.a) << '\n';
    os << "verdict: " << to_string(cc.verdict) << '\n';
    os << "message: " << C.message << '\n';
    os << "dims: V- " << cc.dim_minus << ", V0 " << cc.dim_zero << ", V+ " << cc.dim_plus << '\n';
    os << "topology: " << cc.topology.name() << "  " << cc.topology.label() << '\n';
    if (cc.j0) os << "collinear vector: " << idx_str(*cc.j0) << '\n';
    os << "bound: ";
    if (C.bound) os << *C.bound << '\n';
    else if (cc.multiplicity_bound) os << *cc.multiplicity_bound << '\n';
    else os << "indeterminate\n";
    for (const auto& w : cc.warnings) os << "warning: " << w << '\n';
    for (const auto& w : C.rs.warnings) os << "warning: " << w << '\n';
    (void)ctx;
    return os.str();
}

int cmd_classify(Context& ctx) {
    const Classified C = classify(ctx);
    const std::string text = classification_text(ctx, C);
    write_file(ctx.path("classification.txt"), ctx.stamp("#") + '\n' + text);
    ctx.out << text;
    return 0;
}

// ---- cuplength

std::string cup_text(const Context& ctx, const WeightMatrix& K1, const WeightMatrix& K2) {
    const int nvars = int(!K1.empty() ? K1[0].size() : K2.at(0).size());
    std::ostringstream os;
    auto mat = [](const WeightMatrix& K) {
        std::string s = "[";
        for (std::size_t i = 0; i < K.size(); ++i) {
            s += i ? " (" : "(";
            for (std::size_t r = 0; r < K[i].size(); ++r) s += (r ? "," : "") + std::to_string(K[i][r]);
            s += ")";
        }
        return s + "]";
    };
    os << "K1 = " << mat(K1) << ", K2 = " << mat(K2) << ", d = " << nvars << '\n';
    const Witness W = witness_class(K1, K2, nvars);
    os << "ideal: " << W.ideal.str() << '\n';
    os << "witness: " << W.f.str() << '\n';
    const Membership& m = W.certificate;
    if (!W.noncollinear) {
        os << "certificate: hypothesis violated (column " << W.offending->first + 1
           << " of K1 and column " << W.offending->second + 1 << " of K2 are collinear)\n";
    }
    if (m.member) {
        os << "membership: " << W.f.str() << " IN ideal\n";
        for (std::size_t i = 0; i < m.multipliers.size(); ++i)
            os << "  q" << i + 1 << " = " << m.multipliers[i].str() << '\n';
    } else {
        if (W.f.degree() == 0) os << "certificate: " << W.f.str() << " not in ideal\n";
        else os << "certificate: " << W.f.str() << " NOT IN ideal; rank witness attached\n";
        os << "slice degree " << m.witness_degree << ": rank " << m.slice_rank << ", augmented rank "
           << m.augmented_rank << '\n';
        os << "functional:";
        if (m.functional.empty()) os << " evaluation at the constant monomial";
        for (const auto& [e, q] : m.functional) {
            os << ' ' << Polynomial::monomial(e).str() << " -> " << q.get_str() << ';';
        }
        os << '\n';
        os << "lower bound: n1 + n2 - 2 = " << K1.size() + K2.size() - 2 << '\n';
    }
    if (ctx.cfg.cup_max_length > 0 && W.noncollinear) {
        const CupSearch S = cuplength_search(W.ideal, ctx.cfg.cup_coef_bound, ctx.cfg.cup_max_length);
        os << "search bound: length " << S.length << " (coefficients in [-" << ctx.cfg.cup_coef_bound
           << "," << ctx.cfg.cup_coef_bound << "], at most " << ctx.cfg.cup_max_length
           << " factors, " << S.candidates_tested << " candidates), product " << S.product.str() << '\n';
    }
    return os.str();
}

std::pair<WeightMatrix, WeightMatrix> cup_weights(const Context& ctx) {
    if (!ctx.cfg.K1.empty() || !ctx.cfg.K2.empty()) return {ctx.cfg.K1, ctx.cfg.K2};
    const Classified C = classify(ctx);
    if (!C.cc) throw PreconditionError("cuplength: " + C.message);
    return split_weights(*C.K, *C.cc);
}

int cmd_cuplength(Context& ctx) {
    const auto [K1, K2] = cup_weights(ctx);
    const std::string text = cup_text(ctx, K1, K2);
    write_file(ctx.path("cuplength.txt"), ctx.stamp("#") + '\n' + text);
    ctx.out << text;
    return 0;
}

// ---- straighten

struct Kit {
    Classified C;
    ModelHamiltonian M;
};

Kit kit(const Context& ctx, bool need_momentum) {
    Kit k;
    if (need_momentum) k.C = classify(ctx);
    else {
        k.C.setup = resolve(ctx.cfg);
        k.C.rs = resonances(ctx.cfg, k.C.setup, nullptr);
        if (!k.C.rs.vectors.empty()) k.C.K = Kernel::from(k.C.rs);
    }
    if (!k.C.K) throw PreconditionError("empty resonant set: no bifurcation at this speed");
    k.M = load_model(*k.C.K, ctx.cfg.model, ctx.cfg.seed);
    return k;
}

// Sample kernel point in regime r (0 far, 1 near, 2 on a plane) with norm `scale`.
KernelPoint regime_sample(const Kernel& K, int r, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, int(K.dirs.size()) - 1);
    KernelPoint v(K.size());
    const int d = pick(rng);
    for (int i = 0; i < K.size(); ++i) {
        const double w = K.dir_of[i] == d ? 1.0 : (r == 0 ? 1.0 : r == 1 ? 1e-3 : 0.0);
        const double x = N(rng);
        v.z[i] = w * cplx(x, N(rng));
    }
    v *= scale / std::sqrt(norm2(K, v));
    return v;
}

int cmd_straighten(Context& ctx) {
    Kit k = kit(ctx, false);
    const Kernel& K = *k.C.K;
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> U(0.02, 0.2);
    MoserOptions mo;
    mo.radius = ctx.cfg.regime.radius;
    mo.regime = ctx.cfg.regime;
    std::ostringstream csv;
    csv << ctx.stamp("#") << '\n' << "sample,regime,norm,residual\n";
    double worst = 0.0;
    const bool identity = k.M.c_independent();
    static const char* names[] = {"far", "near", "plane"};
    for (int s = 0; s < ctx.cfg.straighten_samples; ++s) {
        const int r = s % 3;
        const double scale = U(rng) * ctx.cfg.regime.radius;
        const KernelPoint v = regime_sample(K, r, scale, rng);
        const KernelPoint z = moser_straighten(K, k.M, v, mo);
        const double res = (reduced_momentum_I(K, k.M, z) - momentum_cI(K, v)).norm() / norm2(K, v);
        worst = std::max(worst, res);
        csv << s << ',' << names[r] << ',' << fixed8(std::sqrt(norm2(K, v))) << ',' << sci(res) << '\n';
    }
    std::string summary = "max residual ";
    if (identity) summary += "0 (identity)";
    else summary += sci(worst) + " (relative to ||v||^2, " + std::to_string(ctx.cfg.straighten_samples) + " samples)";
    csv << "# " << summary << '\n';
    write_file(ctx.path("straighten.csv"), csv.str());
    ctx.out << "straighten: " << summary << '\n';
    return 0;
}

// ---- flow

struct FlowReport {
    std::string table, log, footer;
};

FlowReport flow_report(const Context& ctx, const Kit& k) {
    const Kernel& K = *k.C.K;
    const ConeClassification& cc = *k.C.cc;
    OrbitSearchOptions o;
    o.n_starts = ctx.cfg.n_starts > 0 ? ctx.cfg.n_starts : 10 * K.size();
    o.tol = ctx.cfg.flow_tol;
    o.grad_tol = ctx.cfg.grad_tol;
    o.t_max = ctx.cfg.t_max;
    o.max_steps = ctx.cfg.max_steps;
    o.seed = ctx.cfg.seed;
    o.regime = ctx.cfg.regime;
    o.fixed_dt = ctx.cfg.fixed_dt;
    o.drift_tol = ctx.cfg.drift_tol;
    const OrbitSearchResult R = find_critical_orbits(K, k.M, cc.a, cc, o);
    if (R.converged == 0) {
        std::string msg = "no start reached a stationary orbit";
        if (!R.diagnostics.empty()) msg += "; " + R.diagnostics.front();
        throw NumericalError(msg);
    }
    FlowReport F;
    std::ostringstream t;
    t << ctx.stamp("#") << '\n' << "id,type,H";
    for (const auto& j : K.V) t << ",|z_" << j.k[0] << '_' << j.k[1] << '|';
    t << ",residual,hits\n";
    for (std::size_t i = 0; i < R.orbits.size(); ++i) {
        const auto& orb = R.orbits[i];
        t << i + 1 << ',' << to_string(orb.type) << ',' << fixed8(orb.H);
        for (double m : orb.moduli) t << ',' << fixed8(m);
        t << ',' << sci(orb.residual) << ',' << orb.hits << '\n';
    }
    const int bound = k.C.bound.value_or(0);
    int found = 0;
    if (cc.verdict == Verdict::InteriorCollinearUnique) found = R.three_d_values_off_2d(R.value_width);
    else found = int(R.critical_values.size());
    std::ostringstream foot;
    if (k.C.bound)
        foot << "found " << found << " ≥ " << bound << " (bound " << bound << "): "
             << (found >= bound ? "PASS" : "FAIL");
    else foot << "found " << found << " (bound indeterminate)";
    F.footer = foot.str();
    t << "# " << F.footer << '\n';
    F.table = t.str();

    std::ostringstream log;
    log << ctx.stamp("#") << '\n';
    log << "verdict: " << to_string(cc.verdict) << '\n';
    log << "starts: " << o.n_starts << ", converged " << R.converged << ", failed " << R.failed << '\n';
    if (R.level_2d) log << "2D level: " << full(*R.level_2d) << '\n';
    log << "critical values (width " << sci(R.value_width) << "):";
    for (double v : R.critical_values) log << ' ' << full(v);
    log << '\n';
    for (const auto& d : R.diagnostics) log << d << '\n';
    log << F.footer << '\n';
    F.log = log.str();
    return F;
}

int cmd_flow(Context& ctx) {
    const Kit k = kit(ctx, true);
    if (!k.C.cc) throw PreconditionError("flow: " + k.C.message);
    const FlowReport F = flow_report(ctx, k);
    write_file(ctx.path("orbits.csv"), F.table);
    write_file(ctx.path("flow_log.txt"), F.log);
    write_file(ctx.path("model.json"), model_to_json(*k.C.K, k.M).dump(1) + '\n');

    // one trajectory dump from the first seed
    const Kernel& K = *k.C.K;
    std::mt19937_64 rng(ctx.cfg.seed);
    KernelPoint v = project_momentum(K, k.M, random_level_point(K, k.C.cc->a, rng), k.C.cc->a, 8,
                                     ctx.cfg.regime);
    FlowOptions fo;
    fo.t_end = 10.0;
    fo.record_every = 1;
    fo.fixed_dt = ctx.cfg.fixed_dt;
    fo.drift_tol = ctx.cfg.drift_tol;
    fo.regime = ctx.cfg.regime;
    const FlowResult tr = run_flow(K, k.M, v, fo);
    std::ostringstream csv;
    csv << ctx.stamp("#") << '\n' << "t,H,I1,I2";
    for (const auto& j : K.V) csv << ",|z_" << j.k[0] << '_' << j.k[1] << '|';
    csv << '\n';
    for (const auto& s : tr.trajectory) {
        csv << sci(s.t) << ',' << sci(s.H) << ',' << sci(s.I.x()) << ',' << sci(s.I.y());
        for (double m : s.moduli) csv << ',' << sci(m);
        csv << '\n';
    }
    write_file(ctx.path("trajectory.csv"), csv.str());
    ctx.out << F.table;
    return 0;
}

// ---- report

int cmd_report(Context& ctx) {
    std::ostringstream md;
    md << "# stokes3d report\n\n## Provenance\n\n"
       << "- version: " << kVersion << '\n'
       << "- config hash: " << ctx.hash << '\n'
       << "- seed: " << ctx.cfg.seed << '\n'
       << "- Eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION
       << ", Boost " << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.'
       << BOOST_VERSION % 100 << ", GMP " << gmp_version << "\n\n";

    const Classified C = classify(ctx);
    md << "## Resonance table\n\n```\n" << resonance_table(ctx, C.rs) << "```\n\n";
    md << "## Classification\n\n```\n" << classification_text(ctx, C) << "```\n\n";
    if (!C.cc) {
        write_file(ctx.path("report.md"), md.str());
        ctx.out << "report: " << C.message << '\n';
        return 0;
    }
    const Verdict v = C.cc->verdict;
    const bool interior = v == Verdict::InteriorNoncollinear || v == Verdict::InteriorCollinearUnique ||
                          v == Verdict::InteriorCollinearDouble;
    if (interior) {
        auto [K1, K2] = ctx.cfg.K1.empty() && ctx.cfg.K2.empty()
                            ? split_weights(*C.K, *C.cc)
                            : std::make_pair(ctx.cfg.K1, ctx.cfg.K2);
        md << "## Cohomology certificate\n\n```\n" << cup_text(ctx, K1, K2) << "```\n\n";
    }
    if (!ctx.cfg.model.is_null() && interior) {
        Kit k{C, load_model(*C.K, ctx.cfg.model, ctx.cfg.seed)};
        md << "## Orbit table\n\n```\n" << flow_report(ctx, k).table << "```\n";
    }
    write_file(ctx.path("report.md"), md.str());
    ctx.out << "report: " << (ctx.cfg.out_dir / "report.md").string() << '\n';
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Three-dimensional Stokes wave bifurcation toolkit"};
    app.require_subcommand(1, 1);
    std::string config;
    std::optional<std::uint64_t> seed, budget;
    std::optional<std::string> out_dir;
    app.add_option("--config", config, "JSON configuration file")->required();
    app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (default out)");
    app.add_option("--budget", budget, "candidate budget of lattice enumerations");
    app.fallthrough();
    using Cmd = int (*)(Context&);
    const std::vector<std::pair<std::string, Cmd>> cmds = {
        {"web", cmd_web},           {"resonances", cmd_resonances}, {"design", cmd_design},
        {"classify", cmd_classify}, {"cuplength", cmd_cuplength},   {"straighten", cmd_straighten},
        {"flow", cmd_flow},         {"report", cmd_report}};
    const char* help[] = {"bifurcation web (CSV + SVG)", "resonant set table", "resonance design",
                          "momentum classification",     "cohomology certificate",
                          "straightening residuals",     "critical orbit search",
                          "full report"};
    for (std::size_t i = 0; i < cmds.size(); ++i) app.add_subcommand(cmds[i].first, help[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : int(ExitCode::Precondition);
    }
    try {
        RunConfig cfg = load_config(config);
        if (seed) cfg.seed = *seed;
        if (budget) cfg.budget = *budget;
        if (out_dir) cfg.out_dir = *out_dir;
        Context ctx{cfg, out, config_hash(cfg)};
        for (const auto& [name, fn] : cmds)
            if (app.got_subcommand(name)) return fn(ctx);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return int(e.code());
    } catch (const nlohmann::json::exception& e) {
        err << "error: config: " << e.what() << '\n';
        return int(ExitCode::Precondition);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return int(ExitCode::Numerical);
    }
    return int(ExitCode::Precondition);
}

} // namespace stokes3d

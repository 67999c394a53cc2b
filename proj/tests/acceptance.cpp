// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any criterion fails.

#include "oracles.hpp"

#include "stokes3d/cohomology.hpp"
#include "stokes3d/errors.hpp"
#include "stokes3d/level_sets.hpp"
#include "stokes3d/orbits.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace stokes3d;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s < limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %d [%s]: %s (%s; %.2f s of %.0f s)\n", id, name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), s, limit_s);
    std::fflush(stdout);
}

Kernel desk() {
    DesignKnobs k = DesignKnobs::parse({"c", "aspect"});
    const Design d = design_resonance({{1, 1}, {1, -1}, {2, 0}}, k, Vec2(1.5, 0), PhysicalParams{},
                                      LatticeSpec::square());
    return Kernel::from(resonant_set(d.c_star, d.params, d.lattice));
}

KernelPoint gaussian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0, 1);
    KernelPoint v(n);
    for (auto& z : v.z) {
        const double x = N(rng);
        z = cplx(x, N(rng));
    }
    return v;
}

KernelPoint scaled(const Kernel& K, KernelPoint v, double norm) {
    v *= norm / std::sqrt(norm2(K, v));
    return v;
}

// Random index set of size n with at most two members per direction.
std::vector<Index2> random_indices(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> U(-3, 3);
    for (;;) {
        std::vector<Index2> idx;
        while (int(idx.size()) < n) {
            const long a = U(rng), b = U(rng);
            const Index2 k{a, b};
            if ((!a && !b) || std::find(idx.begin(), idx.end(), k) != idx.end()) continue;
            idx.push_back(k);
        }
        bool ok = true;
        for (const auto& k : idx) {
            int par = 0;
            for (const auto& q : idx)
                if (k[0] * q[1] - k[1] * q[0] == 0) ++par;
            if (par > 2) ok = false;
        }
        if (ok) return idx;
    }
}

Outcome determinant_identity() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> U(-0.3, 0.3);
    double worst = 0.0, worst_plane = 0.0;
    int samples = 0;
    for (int cfg = 0; cfg < 40; ++cfg) {
        Mat2 W;
        W << 1 + U(rng), U(rng), U(rng), 1 + U(rng);
        const LatticeSpec L = LatticeSpec::from_generators(W);
        const Kernel K = Kernel::from_indices(L, random_indices(3 + cfg % 4, rng), Vec2(1.5, 0));
        std::vector<Vec2> js;
        for (const auto& j : K.V) js.push_back(j.j);
        for (int s = 0; s < 25; ++s, ++samples) {
            const KernelPoint v = gaussian(K.size(), rng);
            const auto r = det_identity(K, v);
            const auto ref = oracle::det_pair(js, v.z);
            const double n4 = std::pow(norm2(K, v), 2);
            worst = std::max({worst, std::abs(r.det - r.formula) / n4, std::abs(r.det - ref.direct) / n4});
            // the same point pushed into one plane V_jhat
            KernelPoint p = v;
            const int d = s % int(K.dirs.size());
            for (int i = 0; i < K.size(); ++i)
                if (K.dir_of[i] != d) p.z[i] = 0.0;
            p = scaled(K, p, 1.0);
            worst_plane = std::max(worst_plane, std::abs(det_identity(K, p).det));
        }
    }
    std::ostringstream os;
    os << samples << " points, max |det - formula| / ||v||^4 = " << worst
       << ", max |det| on planes = " << worst_plane;
    return {worst <= 1e-10 && worst_plane < 1e-14, os.str()};
}

Outcome resonance_completeness() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> U(-1, 1);
    int mismatches = 0, nonempty = 0, max_class = 0;
    for (int t = 0; t < 100; ++t) {
        Mat2 W;
        W << 1 + 0.3 * U(rng), 0.3 * U(rng), 0.3 * U(rng), 1 + 0.3 * U(rng);
        const LatticeSpec L = LatticeSpec::from_generators(W);
        PhysicalParams p;
        p.g = 1.0 + 0.5 * U(rng);
        p.kappa = 1.0 + 0.5 * U(rng);
        if (t % 3 == 0) p.depth = 1.5 + U(rng);
        // speeds on a bifurcation line, slid along it, so the set is rarely empty
        const long k1 = 1 + t % 2, k2 = t % 5 - 2;
        const DualVector j = make_dual(L, {k1, k2});
        const Vec2 u = j.unit();
        const Vec2 c = omega(j.j, p) / j.norm() * u + 0.5 * U(rng) * perp(u);
        const ResonantSet rs = resonant_set(c, p, L, 1e-9);
        const auto idx = rs.indices();
        const std::set<Index2> got(idx.begin(), idx.end());
        const auto ref = oracle::brute_resonant(L.W, c, p.g, p.kappa, p.depth.value_or(0.0), 1e-9,
                                                2 * rs.enumeration_radius);
        if (got != ref) ++mismatches;
        if (!got.empty()) {
            ++nonempty;
            for (const auto& D : direction_classes(L, rs.vectors))
                max_class = std::max(max_class, int(D.members.size()));
        }
    }
    std::ostringstream os;
    os << "100 configurations, " << nonempty << " nonempty, " << mismatches
       << " mismatches vs brute force at twice the radius, largest class " << max_class;
    return {mismatches == 0 && max_class <= 2, os.str()};
}

Outcome cohomology_certificates() {
    std::mt19937_64 rng(303);
    std::uniform_int_distribution<long> W(-3, 3);
    std::uniform_int_distribution<int> N(1, 4);
    int verified = 0, tested = 0;
    auto col = [&] {
        WeightColumn c;
        do {
            const long x = W(rng);
            c = {x, W(rng)};
        } while (c[0] == 0 && c[1] == 0);
        return c;
    };
    auto value = [](const std::map<Exponent, mpq_class>& y, const Polynomial& p) {
        mpq_class s = 0;
        for (const auto& [e, c] : p.terms())
            if (auto it = y.find(e); it != y.end()) s += it->second * c;
        return s;
    };
    while (tested < 100) {
        WeightMatrix K1, K2;
        const int n1 = N(rng), n2 = N(rng);
        for (int i = 0; i < n1; ++i) K1.push_back(col());
        for (int i = 0; i < n2; ++i) K2.push_back(col());
        if (collinear_pair(K1, K2)) continue;
        ++tested;
        const Witness w = witness_class(K1, K2, 2);
        const Membership& m = w.certificate;
        if (m.member) continue;
        // independent check: y kills g * x^i y^j for every generator, y(f) != 0
        bool ok = value(m.functional, w.f.component(m.witness_degree)) != 0;
        for (const auto& g : w.ideal.generators) {
            const int r = m.witness_degree - g.degree();
            for (int i = 0; ok && r >= 0 && i <= r; ++i)
                ok = value(m.functional, g * Polynomial::monomial({i, r - i})) == 0;
        }
        if (ok) ++verified;
    }
    const Witness bad = witness_class({{1, 0}, {0, 1}}, {{1, 0}}, 2);
    bool bad_member = bad.certificate.member;
    if (bad_member) {
        Polynomial s(2);
        for (std::size_t i = 0; i < bad.ideal.generators.size(); ++i)
            s = s + bad.certificate.multipliers[i] * bad.ideal.generators[i];
        bad_member = s == bad.f;
    }
    int table_ok = 0;
    for (int t = 0; t < 20; ++t) {
        WeightMatrix K1, K2;
        const int n1 = 1 + t % 4, n2 = 1 + (t / 4) % 4;
        do {
            K1.clear();
            K2.clear();
            for (int i = 0; i < n1; ++i) K1.push_back(col());
            for (int i = 0; i < n2; ++i) K2.push_back(col());
        } while (collinear_pair(K1, K2));
        if (cuplength_lower_bound(K1, K2, 2) == n1 + n2 - 2) ++table_ok;
    }
    std::ostringstream os;
    os << verified << "/100 certificates verified, collinear counterexample "
       << (bad_member ? "in the ideal" : "NOT in the ideal") << ", cuplength table " << table_ok
       << "/20";
    return {verified == 100 && bad_member && table_ok == 20, os.str()};
}

Outcome multiplicity() {
    const Kernel K = desk();
    const Vec2 a_col(-0.01, 0), a_non(-0.01, -0.003);
    const auto cc_col = classify_momentum(a_col, K.V, K.dirs, K.c_star);
    const auto cc_non = classify_momentum(a_non, K.V, K.dirs, K.c_star);
    const int b_col = critical_value_bound(K, cc_col), b_non = critical_value_bound(K, cc_non);
    std::mt19937_64 rng(404);
    int col_ok = 0, non_ok = 0;
    for (int m = 0; m < 20; ++m) {
        const ModelHamiltonian M = random_model(K, rng);
        OrbitSearchOptions o;
        o.seed = 1000 + m;
        const auto R = find_critical_orbits(K, M, a_col, cc_col, o);
        if (R.three_d_values_off_2d(R.value_width) >= b_col) ++col_ok;
        const auto S = find_critical_orbits(K, M, a_non, cc_non, o);
        if (int(S.critical_values.size()) >= b_non) ++non_ok;
    }
    RandomModelOptions ao;
    ao.action_only = true;
    int oracle_ok = 0, oracle_total = 0;
    double worst = 0.0;
    for (int m = 0; m < 10; ++m) {
        const ModelHamiltonian M = random_model(K, rng, ao);
        for (const auto& [a, cc] : {std::pair{a_col, cc_col}, std::pair{a_non, cc_non}}) {
            ++oracle_total;
            const auto R = find_critical_orbits(K, M, a, cc);
            const auto pts = oracle::ActionOracle(K, M, a).critical_points();
            bool ok = !pts.empty() && !R.orbits.empty();
            for (const auto& orb : R.orbits) {
                double best = INFINITY;
                for (const auto& p : pts) {
                    double d = 0.0;
                    for (int i = 0; i < K.size(); ++i)
                        d = std::max(d, std::abs(orb.moduli[i] - std::sqrt(p.x[i])));
                    best = std::min(best, d);
                }
                worst = std::max(worst, best);
                ok = ok && best <= 1e-5;
            }
            // the oracle's extreme values must be found
            for (double h : {pts.front().H, pts.back().H}) {
                bool hit = R.level_2d && std::abs(*R.level_2d - h) <= 1e-5 * std::abs(h);
                for (double c : R.critical_values) hit = hit || std::abs(c - h) <= 1e-5 * std::abs(h);
                ok = ok && hit;
            }
            if (ok) ++oracle_ok;
        }
    }
    std::ostringstream os;
    os << "collinear " << col_ok << "/20 with >= " << b_col << " 3D value off the 2D level, noncollinear "
       << non_ok << "/20 with >= " << b_non << " values, oracle " << oracle_ok << "/" << oracle_total
       << " (max moduli gap " << worst << ")";
    return {col_ok == 20 && non_ok == 20 && oracle_ok == oracle_total, os.str()};
}

Outcome flow_contracts() {
    const Kernel K = desk();
    std::mt19937_64 rng(505);
    FlowOptions fo;
    fo.t_end = 10.0;
    fo.drift_tol = 1e-8;
    fo.record_every = 1;
    double drift = 0.0, dis_err = 0.0, rise = 0.0;
    int plane_ok = 0;
    const int starts = 100;
    for (int s = 0; s < starts; ++s) {
        const ModelHamiltonian M = random_model(K, rng);
        KernelPoint v = scaled(K, gaussian(K.size(), rng), 0.05 + 0.001 * s);
        const bool plane = s % 10 == 0;
        const int d = s % int(K.dirs.size());
        if (plane) {
            for (int i = 0; i < K.size(); ++i)
                if (K.dir_of[i] != d) v.z[i] = 0.0;
        }
        const FlowResult F = run_flow(K, M, v, fo);
        drift = std::max(drift, F.max_drift);
        const double scale = std::pow(norm2(K, v), 2);
        for (std::size_t i = 1; i < F.trajectory.size(); ++i)
            rise = std::max(rise, (F.trajectory[i].H - F.trajectory[i - 1].H) / scale);
        // stationary starts dissipate nothing; compare against a rounding floor
        dis_err = std::max(dis_err, std::abs((F.H0 - F.H) - F.dissipation) /
                                        std::max(F.dissipation, 1e-12 * scale));
        if (plane) {
            bool ok = true;
            for (int i = 0; i < K.size(); ++i)
                if (K.dir_of[i] != d && F.v.z[i] != cplx(0, 0)) ok = false;
            plane_ok += ok;
        }
    }
    std::ostringstream os;
    os << starts << " starts, max drift " << drift << ", max relative H rise " << rise
       << ", max relative dissipation mismatch " << dis_err << ", plane invariance " << plane_ok << "/10";
    return {drift <= 1e-8 && rise <= 1e-9 && dis_err <= 1e-5 && plane_ok == 10, os.str()};
}

Outcome straightening() {
    const Kernel K = desk();
    std::mt19937_64 rng(606);
    double worst = 0.0;
    int counts[3] = {0, 0, 0};
    for (int s = 0; s < 100; ++s) {
        const ModelHamiltonian M = random_model(K, rng);
        KernelPoint v = scaled(K, gaussian(K.size(), rng), 0.02 + 0.002 * s);
        const int r = s % 3, d = s % int(K.dirs.size());
        for (int i = 0; i < K.size(); ++i)
            if (K.dir_of[i] != d) v.z[i] *= (r == 0 ? 1.0 : r == 1 ? 1e-3 : 0.0);
        const Regime g = choose_frame(K, v).regime;
        counts[g == Regime::Far ? 0 : g == Regime::Near ? 1 : 2]++;
        const KernelPoint z = moser_straighten(K, M, v);
        worst = std::max(worst, (reduced_momentum_I(K, M, z) - momentum_cI(K, v)).norm() / norm2(K, v));
    }
    const ModelHamiltonian C = norm4_model(K, 0.5);
    bool identity = true;
    for (int s = 0; s < 20; ++s) {
        const KernelPoint v = scaled(K, gaussian(K.size(), rng), 0.1);
        const KernelPoint z = moser_straighten(K, C, v);
        for (int i = 0; i < K.size(); ++i) identity = identity && z.z[i] == v.z[i];
    }
    std::ostringstream os;
    os << "100 samples (far " << counts[0] << ", near " << counts[1] << ", on-plane " << counts[2]
       << "), max residual / ||v||^2 = " << worst << ", identity for c-independent "
       << (identity ? "exact" : "violated");
    return {worst <= 1e-6 && identity && counts[0] && counts[1] && counts[2], os.str()};
}

Outcome branch_2d_amplitude() {
    const Kernel K = desk();
    double worst = 0.0;
    for (double s : {1e-4, 1e-3, 1e-2, 5e-2}) {
        const Vec2 a(-s, 0);
        const KernelPoint b = branch_2d(K, a);
        const int i0 = K.find({2, 0});
        const double eps = std::sqrt(2 * a.norm() / K.len[i0]);
        worst = std::max(worst, std::abs(std::abs(b.z[i0]) - eps) / eps);
        for (int i = 0; i < K.size(); ++i)
            if (i != i0 && b.z[i] != cplx(0, 0)) worst = INFINITY;
    }
    std::ostringstream os;
    os << "max relative amplitude error " << worst;
    return {worst <= 1e-12, os.str()};
}

Outcome multiplier_bound() {
    const Kernel K = desk();
    const Vec2 c = K.c_star;
    const PhysicalParams p;
    const auto V = enumerate_dual(K.lattice, 100.0, kDefaultBudget);
    double Kmax = 0.0, tail = 0.0;
    const double onset = 2 * c.squaredNorm() / p.kappa;
    long used = 0;
    for (const auto& j : V) {
        if (K.find(j.k) >= 0 || K.find({-j.k[0], -j.k[1]}) >= 0) continue;
        const double r = linearized_multipliers(c, j, p).ratio;
        Kmax = std::max(Kmax, r);
        if (j.norm() >= onset) tail = std::max(tail, r);
        ++used;
    }
    std::ostringstream os;
    os << used << " non-resonant vectors, K = " << Kmax << ", tail max " << tail
       << " (analytic tail bound " << 2 / p.kappa << " for |j| >= " << onset << ")";
    return {std::isfinite(Kmax) && tail <= 2 / p.kappa, os.str()};
}

} // namespace

int main() {
    criterion(1, "determinant identity", 1, determinant_identity);
    criterion(2, "resonance completeness", 30, resonance_completeness);
    criterion(3, "cohomology certificates", 10, cohomology_certificates);
    criterion(4, "multiplicity at desk scale", 300, multiplicity);
    criterion(5, "flow contracts", 120, flow_contracts);
    criterion(6, "straightening", 60, straightening);
    criterion(7, "2D branch amplitude", 1, branch_2d_amplitude);
    criterion(8, "multiplier bound", 5, multiplier_bound);
    return failures == 0 ? 0 : 1;
}

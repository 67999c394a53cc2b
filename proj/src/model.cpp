#include "stokes3d/model.hpp"

#include "stokes3d/errors.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace stokes3d {

int Term::degree() const {
    return std::accumulate(a.begin(), a.end(), 0) + std::accumulate(b.begin(), b.end(), 0);
}

bool ModelHamiltonian::c_independent() const {
    for (const auto& t : terms)
        if (!t.dc.isZero()) return false;
    return true;
}

bool ModelHamiltonian::action_only() const {
    for (const auto& t : terms)
        if (!t.action_only()) return false;
    return true;
}

void validate_model(const Kernel& K, const ModelHamiltonian& M, double tol) {
    const int n = K.size();
    for (std::size_t t = 0; t < M.terms.size(); ++t) {
        const Term& T = M.terms[t];
        const std::string tag = "model term " + std::to_string(t + 1) + ": ";
        if (int(T.a.size()) != n || int(T.b.size()) != n)
            throw PreconditionError(tag + "exponent length differs from #V");
        long s0 = 0, s1 = 0;
        std::set<int> classes;
        for (int j = 0; j < n; ++j) {
            if (T.a[j] < 0 || T.b[j] < 0) throw PreconditionError(tag + "negative exponent");
            s0 += long(T.a[j] - T.b[j]) * K.V[j].k[0];
            s1 += long(T.a[j] - T.b[j]) * K.V[j].k[1];
            if (T.a[j] + T.b[j] > 0) classes.insert(K.dir_of[j]);
        }
        if (s0 != 0 || s1 != 0) throw PreconditionError(tag + "not invariant under translations");
        if (T.degree() < 3) throw PreconditionError(tag + "degree below 3");
        if (classes.size() == 1 && !T.dc.isZero()) {
            const Vec2& u = K.dirs[*classes.begin()].direction;
            if (std::abs(perp(u).dot(T.dc)) > tol * T.dc.norm())
                throw PreconditionError(tag + "c-dependence of a single-direction term must be "
                                              "parallel to that direction");
        }
    }
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> invariant_monomials(const Kernel& K,
                                                                               int degree_cap) {
    const int n = K.size();
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    std::vector<int> e(std::size_t(2 * n), 0); // (a_0..a_{n-1}, b_0..b_{n-1})
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == 2 * n) {
            const int deg = degree_cap - left;
            if (deg < 3) return;
            long s0 = 0, s1 = 0;
            for (int j = 0; j < n; ++j) {
                s0 += long(e[j] - e[n + j]) * K.V[j].k[0];
                s1 += long(e[j] - e[n + j]) * K.V[j].k[1];
            }
            if (s0 || s1) return;
            std::vector<int> a(e.begin(), e.begin() + n), b(e.begin() + n, e.end());
            if (b < a) return; // keep one of each conjugate pair
            out.emplace_back(a, b);
            return;
        }
        for (int x = 0; x <= left; ++x) {
            e[i] = x;
            rec(i + 1, left - x);
        }
        e[i] = 0;
    };
    rec(0, degree_cap);
    return out;
}

namespace {

cplx ipow(cplx z, int p) {
    cplx r(1.0, 0.0);
    for (int i = 0; i < p; ++i) r *= z;
    return r;
}

// value of the monomial and, per j, (d/d alpha_j + i d/d beta_j) of Re(m)
void monomial(const Term& T, const KernelPoint& v, cplx& m, std::vector<cplx>& g) {
    const int n = v.size();
    std::vector<cplx> f(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) f[j] = ipow(v.z[j], T.a[j]) * ipow(std::conj(v.z[j]), T.b[j]);
    m = cplx(1.0, 0.0);
    for (int j = 0; j < n; ++j) m *= f[j];
    g.assign(std::size_t(n), cplx(0.0, 0.0));
    for (int j = 0; j < n; ++j) {
        if (T.a[j] + T.b[j] == 0) continue;
        cplx rest(1.0, 0.0);
        for (int i = 0; i < n; ++i)
            if (i != j) rest *= f[i];
        const cplx z = v.z[j], zb = std::conj(v.z[j]);
        // Wirtinger derivatives of z^a zbar^b
        const cplx dz = T.a[j] ? double(T.a[j]) * ipow(z, T.a[j] - 1) * ipow(zb, T.b[j]) : 0.0;
        const cplx dzb = T.b[j] ? double(T.b[j]) * ipow(z, T.a[j]) * ipow(zb, T.b[j] - 1) : 0.0;
        // Re(m)_alpha + i Re(m)_beta = dm/dzbar + conj(dm/dz)
        g[j] = rest * dzb + std::conj(rest * dz);
    }
}

} // namespace

ModelEval evaluate(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v) {
    const int n = v.size();
    ModelEval E;
    E.grad0 = KernelPoint(n);
    E.grad1 = {KernelPoint(n), KernelPoint(n)};
    cplx m;
    std::vector<cplx> g;
    for (const auto& T : M.terms) {
        monomial(T, v, m, g);
        const double re = m.real();
        E.G0 += T.coef * re;
        E.G1 += T.dc * re;
        for (int j = 0; j < n; ++j) {
            const cplx gj = g[j] / K.len[j];
            E.grad0.z[j] += T.coef * gj;
            if (T.dc.x() != 0.0) E.grad1[0].z[j] += T.dc.x() * gj;
            if (T.dc.y() != 0.0) E.grad1[1].z[j] += T.dc.y() * gj;
        }
    }
    return E;
}

double model_G(const Kernel& K, const ModelHamiltonian& M, const Vec2& c, const KernelPoint& v) {
    const ModelEval E = evaluate(K, M, v);
    return E.G0 + (c - K.c_star).dot(E.G1);
}

ModelHamiltonian random_model(const Kernel& K, std::mt19937_64& rng,
                              const RandomModelOptions& opt) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ModelHamiltonian M;
    const int n = K.size();
    for (const auto& [a, b] : invariant_monomials(K, opt.degree_cap)) {
        if (opt.action_only && a != b) continue;
        Term T{a, b, opt.coef_scale * U(rng), Vec2::Zero()};
        if (opt.c_dependent) {
            std::set<int> classes;
            for (int j = 0; j < n; ++j)
                if (a[j] + b[j] > 0) classes.insert(K.dir_of[j]);
            if (classes.size() == 1) T.dc = opt.dc_scale * U(rng) * K.dirs[*classes.begin()].direction;
            else {
                const double x = U(rng);
                T.dc = opt.dc_scale * Vec2(x, U(rng));
            }
        }
        M.terms.push_back(std::move(T));
    }
    return M;
}

ModelHamiltonian norm4_model(const Kernel& K, double gamma) {
    // ||v||^4 = sum_{i,j} |i||j| |z_i|^2 |z_j|^2
    ModelHamiltonian M;
    const int n = K.size();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            std::vector<int> e(std::size_t(n), 0);
            e[i] += 1;
            e[j] += 1;
            const double w = (i == j ? 1.0 : 2.0) * K.len[i] * K.len[j];
            M.terms.push_back({e, e, gamma * w, Vec2::Zero()});
        }
    return M;
}

} // namespace stokes3d

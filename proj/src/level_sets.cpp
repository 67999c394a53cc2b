#include "stokes3d/level_sets.hpp"

#include "stokes3d/errors.hpp"

#include <cmath>

namespace stokes3d {

namespace {

void check_momentum(const Kernel& K, const Vec2& a) {
    if (a.isZero()) throw PreconditionError("momentum a must be nonzero");
    if (a.dot(K.c_star) >= 0.0) throw PreconditionError("a.c* >= 0: a is not in the cone");
    if (cone(K.dirs, K.c_star).locate(a) == ConeSide::Outside)
        throw PreconditionError("momentum lies outside the resonance cone");
}

} // namespace

LevelSetResidual level_set_membership(const Kernel& K, const KernelPoint& v, const Vec2& a,
                                      double tol) {
    check_momentum(K, a);
    const auto n = class_norms(K, v);
    const Vec2 ap = perp(a);
    const double ac = std::abs(a.dot(K.c_star));
    double B = 0.0, Kv = 0.0;
    for (std::size_t d = 0; d < n.size(); ++d) {
        const Vec2& u = K.dirs[d].direction;
        B += K.c_star.dot(u) * n[d];
        Kv += u.dot(ap) * n[d];
    }
    B /= 2.0 * ac;
    const double res = std::max(std::abs(B - 1.0), std::abs(Kv) / a.norm());
    return {B, Kv, res, res <= tol};
}

Splitting split(const Kernel& K, const Vec2& a, double tol) {
    Splitting s;
    const Vec2 ap = perp(a);
    for (const auto& d : K.dirs) {
        const double x = d.direction.dot(ap);
        const bool zero = std::abs(x) <= tol * a.norm();
        s.sign.push_back(zero ? 0 : (x < 0 ? -1 : 1));
        s.weight.push_back(std::abs(x));
    }
    return s;
}

double triple_norm2(const Kernel& K, const Splitting& s, const KernelPoint& v) {
    const auto n = class_norms(K, v);
    double t = 0.0;
    for (std::size_t d = 0; d < n.size(); ++d) t += (s.sign[d] == 0 ? 1.0 : 0.5) * n[d];
    return t;
}

KernelPoint psi(const Kernel& K, const Splitting& s, const KernelPoint& v) {
    KernelPoint w = v;
    for (int i = 0; i < v.size(); ++i) {
        const int d = K.dir_of[i];
        if (s.sign[d] != 0) w.z[i] /= std::sqrt(s.weight[d]);
    }
    return w;
}

KernelPoint psi_inverse(const Kernel& K, const Splitting& s, const KernelPoint& v) {
    KernelPoint w = v;
    for (int i = 0; i < v.size(); ++i) {
        const int d = K.dir_of[i];
        if (s.sign[d] != 0) w.z[i] *= std::sqrt(s.weight[d]);
    }
    return w;
}

namespace {

double B_of(const Kernel& K, const Vec2& a, const KernelPoint& v) {
    const auto n = class_norms(K, v);
    double B = 0.0;
    for (std::size_t d = 0; d < n.size(); ++d) B += K.c_star.dot(K.dirs[d].direction) * n[d];
    return B / (2.0 * std::abs(a.dot(K.c_star)));
}

} // namespace

KernelPoint xi_map(const Kernel& K, const Vec2& a, const KernelPoint& v) {
    check_momentum(K, a);
    if (norm2(K, v) == 0.0) throw PreconditionError("xi_map of the zero vector");
    const Splitting s = split(K, a);
    const KernelPoint p = psi(K, s, v);
    const double g = std::sqrt(triple_norm2(K, s, v) / B_of(K, a, p));
    return g * p;
}

KernelPoint xi_inverse(const Kernel& K, const Vec2& a, const KernelPoint& w) {
    check_momentum(K, a);
    if (norm2(K, w) == 0.0) throw PreconditionError("xi_inverse of the zero vector");
    const Splitting s = split(K, a);
    const KernelPoint u = psi_inverse(K, s, w);
    // B(xi(v)) = |||v|||^2 and u = g(v) v
    return std::sqrt(B_of(K, a, w) / triple_norm2(K, s, u)) * u;
}

KernelPoint join_parametrize(const Kernel& K, const Vec2& a, const KernelPoint& v1,
                             const KernelPoint& v0, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("join parameter t outside [0,1]");
    check_momentum(K, a);
    const Splitting s = split(K, a);
    double nm = 0.0, np = 0.0, n0 = 0.0, stray1 = 0.0, stray0 = 0.0;
    const auto c1 = class_norms(K, v1);
    const auto c0 = class_norms(K, v0);
    for (std::size_t d = 0; d < c1.size(); ++d) {
        if (s.sign[d] < 0) nm += c1[d];
        if (s.sign[d] > 0) np += c1[d];
        if (s.sign[d] == 0) stray1 += c1[d];
        if (s.sign[d] == 0) n0 += c0[d];
        else stray0 += c0[d];
    }
    const double tol = 1e-12;
    if (t < 1.0 && (std::abs(nm - 1.0) > tol || std::abs(np - 1.0) > tol || stray1 > tol))
        throw PreconditionError("v1 must have unit components on V- and V+ only");
    if (t > 0.0 && (std::abs(n0 - 1.0) > tol || stray0 > tol))
        throw PreconditionError("v0 must be a unit vector of V0");
    KernelPoint f = std::sqrt(1.0 - t * t) * v1;
    if (t > 0.0) f += t * v0;
    return xi_map(K, a, f);
}

KernelPoint branch_2d(const Kernel& K, const Vec2& a) {
    check_momentum(K, a);
    const Splitting s = split(K, a);
    int d0 = -1;
    for (std::size_t d = 0; d < s.sign.size(); ++d)
        if (s.sign[d] == 0) d0 = int(d);
    if (d0 < 0) throw PreconditionError("a is not parallel to any resonant direction");
    if (K.dirs[d0].members.size() != 1)
        throw PreconditionError("direction parallel to a holds two resonant vectors");
    if (K.dirs[d0].direction.dot(a) >= 0.0)
        throw PreconditionError("a points along +jhat; momentum requires -jhat");
    KernelPoint v(K.size());
    v.z[K.dirs[d0].members.front()] = 1.0;
    v *= 1.0 / std::sqrt(B_of(K, a, v));
    return v;
}

} // namespace stokes3d

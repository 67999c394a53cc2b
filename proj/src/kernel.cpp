#include "stokes3d/kernel.hpp"

#include "stokes3d/errors.hpp"

#include <cmath>
#include <limits>

namespace stokes3d {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

void finish(Kernel& K) {
    K.len.clear();
    K.unit.clear();
    for (const auto& v : K.V) {
        K.len.push_back(v.norm());
        K.unit.push_back(v.unit());
    }
    K.dirs = direction_classes(K.lattice, K.V);
    K.dir_of.assign(K.V.size(), -1);
    for (int d = 0; d < int(K.dirs.size()); ++d)
        for (int m : K.dirs[d].members) K.dir_of[m] = d;
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < K.dirs.size(); ++a)
        for (std::size_t b = 0; b < K.dirs.size(); ++b)
            if (a != b) {
                const double s = cross(K.dirs[a].direction, K.dirs[b].direction);
                delta = std::min(delta, s * s);
            }
    K.delta = std::isfinite(delta) ? delta : 1.0;
}

} // namespace

Kernel Kernel::from(const ResonantSet& rs) {
    Kernel K;
    K.c_star = rs.c_star;
    K.lattice = rs.lattice;
    K.V = rs.vectors;
    finish(K);
    return K;
}

Kernel Kernel::from_indices(const LatticeSpec& L, const std::vector<Index2>& idx,
                            const Vec2& c_star) {
    Kernel K;
    K.c_star = c_star;
    K.lattice = L;
    for (const auto& k : idx) K.V.push_back(make_dual(L, k));
    finish(K);
    return K;
}

int Kernel::find(const Index2& k) const {
    for (int i = 0; i < size(); ++i)
        if (V[i].k == k) return i;
    return -1;
}

KernelPoint& KernelPoint::operator+=(const KernelPoint& o) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += o.z[i];
    return *this;
}

KernelPoint& KernelPoint::operator*=(double s) {
    for (auto& c : z) c *= s;
    return *this;
}

KernelPoint operator+(KernelPoint a, const KernelPoint& b) { return a += b; }
KernelPoint operator-(KernelPoint a, const KernelPoint& b) {
    for (std::size_t i = 0; i < a.z.size(); ++i) a.z[i] -= b.z[i];
    return a;
}
KernelPoint operator*(double s, KernelPoint a) { return a *= s; }

GroupElement GroupElement::operator*(const GroupElement& o) const {
    // T_theta R = R T_{-theta}
    GroupElement g;
    g.theta = (o.reversal ? -theta : theta) + o.theta;
    g.reversal = reversal != o.reversal;
    return g;
}

KernelPoint act(const Kernel& K, const GroupElement& g, const KernelPoint& v) {
    KernelPoint w(v.size());
    for (int i = 0; i < v.size(); ++i) {
        const double ph = K.V[i].j.dot(g.theta);
        cplx z = std::polar(1.0, -ph) * v.z[i];
        w.z[i] = g.reversal ? std::conj(z) : z;
    }
    return w;
}

double inner(const Kernel& K, const KernelPoint& v, const KernelPoint& w) {
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) s += K.len[i] * std::real(v.z[i] * std::conj(w.z[i]));
    return s;
}

double norm2(const Kernel& K, const KernelPoint& v) { return inner(K, v, v); }

std::vector<double> class_norms(const Kernel& K, const KernelPoint& v) {
    std::vector<double> n(K.dirs.size(), 0.0);
    for (int i = 0; i < v.size(); ++i) n[K.dir_of[i]] += K.len[i] * std::norm(v.z[i]);
    return n;
}

Vec2 momentum_cI(const Kernel& K, const KernelPoint& v) {
    Vec2 s = Vec2::Zero();
    for (int i = 0; i < v.size(); ++i) s += K.V[i].j * std::norm(v.z[i]);
    return -0.5 * s;
}

KernelPoint grad_cI(const Kernel& K, const KernelPoint& v, const Vec2& e) {
    KernelPoint g(v.size());
    for (int i = 0; i < v.size(); ++i) g.z[i] = -K.unit[i].dot(e) * v.z[i];
    return g;
}

std::array<KernelPoint, 2> grad_cI(const Kernel& K, const KernelPoint& v) {
    return {grad_cI(K, v, Vec2(1, 0)), grad_cI(K, v, Vec2(0, 1))};
}

double cA_entry(const Kernel& K, const std::vector<double>& n, const Vec2& e1, const Vec2& e2) {
    double s = 0.0;
    for (std::size_t d = 0; d < K.dirs.size(); ++d) {
        const Vec2& u = K.dirs[d].direction;
        s += u.dot(e1) * u.dot(e2) * n[d];
    }
    return s;
}

Mat2 matrix_cA(const Kernel& K, const KernelPoint& v) {
    const auto n = class_norms(K, v);
    Mat2 A = Mat2::Zero();
    for (std::size_t d = 0; d < K.dirs.size(); ++d) {
        const Vec2& u = K.dirs[d].direction;
        A += n[d] * u * u.transpose();
    }
    return A;
}

DetIdentity det_identity(const Kernel& K, const KernelPoint& v) {
    const auto n = class_norms(K, v);
    double f = 0.0;
    for (std::size_t a = 0; a < K.dirs.size(); ++a)
        for (std::size_t b = 0; b < K.dirs.size(); ++b) {
            const double c = cross(K.dirs[a].direction, K.dirs[b].direction);
            f += c * c * n[a] * n[b];
        }
    return {matrix_cA(K, v).determinant(), 0.5 * f};
}

bool in_plane(const Kernel& K, const KernelPoint& v, int dir) {
    for (int i = 0; i < v.size(); ++i)
        if (K.dir_of[i] != dir && v.z[i] != cplx(0.0, 0.0)) return false;
    return true;
}

PlaneDistance distance_to_planes(const Kernel& K, const KernelPoint& v) {
    const auto n = class_norms(K, v);
    PlaneDistance best{std::numeric_limits<double>::infinity(), 0, false};
    for (int d = 0; d < int(K.dirs.size()); ++d) {
        double off = 0.0;
        for (int e = 0; e < int(n.size()); ++e)
            if (e != d) off += n[e];
        if (off < best.d) best = {off, d, false};
    }
    best.d = std::sqrt(best.d);
    best.exact = in_plane(K, v, best.dir);
    return best;
}

std::vector<double> to_real(const KernelPoint& v) {
    std::vector<double> x(2 * v.z.size());
    for (std::size_t i = 0; i < v.z.size(); ++i) {
        x[2 * i] = v.z[i].real();
        x[2 * i + 1] = v.z[i].imag();
    }
    return x;
}

KernelPoint from_real(const std::vector<double>& x, int n) {
    KernelPoint v(n);
    for (int i = 0; i < n; ++i) v.z[i] = cplx(x[2 * i], x[2 * i + 1]);
    return v;
}

} // namespace stokes3d

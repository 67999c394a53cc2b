#pragma once

#include "stokes3d/geometry.hpp"
#include "stokes3d/lattice.hpp"

#include <array>
#include <complex>
#include <vector>

namespace stokes3d {

using cplx = std::complex<double>;

// Resonant kernel: the vectors of V, their direction classes and the speed c*.
struct Kernel {
    Vec2 c_star = Vec2::Zero();
    LatticeSpec lattice;
    std::vector<DualVector> V;
    std::vector<double> len;   // |j|
    std::vector<Vec2> unit;    // jhat
    std::vector<DirectionClass> dirs;
    std::vector<int> dir_of;   // class id of each vector
    double delta = 1.0;        // min (jhat'.jhat_perp)^2 over non-parallel pairs

    static Kernel from(const ResonantSet& rs);
    static Kernel from_indices(const LatticeSpec& L, const std::vector<Index2>& idx,
                               const Vec2& c_star);

    int size() const { return int(V.size()); }
    int find(const Index2& k) const; // -1 if absent
};

inline Vec2 perp(const Vec2& u) { return Vec2(-u.y(), u.x()); }

struct KernelPoint {
    std::vector<cplx> z;

    KernelPoint() = default;
    explicit KernelPoint(int n) : z(std::size_t(n), cplx(0.0, 0.0)) {}

    int size() const { return int(z.size()); }
    KernelPoint& operator+=(const KernelPoint& o);
    KernelPoint& operator*=(double s);
};

KernelPoint operator+(KernelPoint a, const KernelPoint& b);
KernelPoint operator-(KernelPoint a, const KernelPoint& b);
KernelPoint operator*(double s, KernelPoint a);

// Element of the translation torus extended by the reversal.
struct GroupElement {
    Vec2 theta = Vec2::Zero();
    bool reversal = false;

    // (g1 * g2) acts as act(g1, act(g2, .))
    GroupElement operator*(const GroupElement& o) const;
};

KernelPoint act(const Kernel& K, const GroupElement& g, const KernelPoint& v);

// <v, w> = Re sum |j| z_j conj(w_j)
double inner(const Kernel& K, const KernelPoint& v, const KernelPoint& w);
double norm2(const Kernel& K, const KernelPoint& v);

// ||Pi_jhat v||^2 per direction class
std::vector<double> class_norms(const Kernel& K, const KernelPoint& v);

Vec2 momentum_cI(const Kernel& K, const KernelPoint& v);
// sum_i e_i grad cI_i (e need not be a unit vector)
KernelPoint grad_cI(const Kernel& K, const KernelPoint& v, const Vec2& e);
std::array<KernelPoint, 2> grad_cI(const Kernel& K, const KernelPoint& v);

Mat2 matrix_cA(const Kernel& K, const KernelPoint& v);
// e1^T cA e2 evaluated directly from the class norms
double cA_entry(const Kernel& K, const std::vector<double>& n, const Vec2& e1, const Vec2& e2);

struct DetIdentity {
    double det;
    double formula;
};
DetIdentity det_identity(const Kernel& K, const KernelPoint& v);

// d(v, V^2d) = min over classes of ||Pi_jhat_perp v||, with the minimizing class.
struct PlaneDistance {
    double d;
    int dir;
    bool exact; // off-class amplitudes are exactly zero
};
PlaneDistance distance_to_planes(const Kernel& K, const KernelPoint& v);

// Exact membership of v in V_jhat (all amplitudes off class `dir` are zero).
bool in_plane(const Kernel& K, const KernelPoint& v, int dir);

// Real vector layout (alpha_0, beta_0, alpha_1, ...) used by the integrators.
std::vector<double> to_real(const KernelPoint& v);
KernelPoint from_real(const std::vector<double>& x, int n);

} // namespace stokes3d

#pragma once

#include "stokes3d/kernel.hpp"

#include <vector>

namespace stokes3d {

// The momentum level set cI^{-1}(a) = {B = 1, K = 0} with
//   B(v) = (2|a.c*|)^{-1} sum (c*.jhat) ||Pi_jhat v||^2,   K(v) = sum (jhat.a_perp) ||Pi_jhat v||^2.
struct LevelSetResidual {
    double B;
    double K;
    double residual; // max(|B - 1|, |K| / |a|)
    bool member;
};

LevelSetResidual level_set_membership(const Kernel& K, const KernelPoint& v, const Vec2& a,
                                      double tol = 1e-10);

// Split of the direction classes by the sign of jhat.a_perp.
struct Splitting {
    std::vector<int> sign;     // -1, 0, +1 per class
    std::vector<double> weight; // |jhat.a_perp| per class
};

Splitting split(const Kernel& K, const Vec2& a, double tol = 1e-12);

// |||v|||^2 = 1/2 ||Pi_- v||^2 + 1/2 ||Pi_+ v||^2 + ||Pi_0 v||^2
double triple_norm2(const Kernel& K, const Splitting& s, const KernelPoint& v);

KernelPoint psi(const Kernel& K, const Splitting& s, const KernelPoint& v);
KernelPoint psi_inverse(const Kernel& K, const Splitting& s, const KernelPoint& v);

// xi(v) = g(v) psi(v), g(v) = |||v||| / sqrt(B(psi v)); maps Sigma onto cI^{-1}(a).
KernelPoint xi_map(const Kernel& K, const Vec2& a, const KernelPoint& v);
KernelPoint xi_inverse(const Kernel& K, const Vec2& a, const KernelPoint& w);

// xi(sqrt(1-t^2) v1 + t v0) for v1 with ||Pi_- v1|| = ||Pi_+ v1|| = 1 and v0 a unit vector of V0.
KernelPoint join_parametrize(const Kernel& K, const Vec2& a, const KernelPoint& v1,
                             const KernelPoint& v0, double t);

// Kernel point with all mass on the single member of the class parallel to a, placed on
// cI^{-1}(a) by solving B = 1.
KernelPoint branch_2d(const Kernel& K, const Vec2& a);

} // namespace stokes3d

#pragma once

#include "stokes3d/kernel.hpp"

#include <array>
#include <random>
#include <string>
#include <vector>

namespace stokes3d {

// One real term (coef + (c - c*).dc) Re(prod_j z_j^{a_j} conj(z_j)^{b_j}).
// Real coefficients keep the model reversible; Re() keeps it real valued, so the
// conjugate monomial is represented by the same term.
struct Term {
    std::vector<int> a, b;
    double coef = 0.0;
    Vec2 dc = Vec2::Zero();

    int degree() const;
    bool action_only() const { return a == b; }
};

struct ModelHamiltonian {
    std::vector<Term> terms;

    bool c_independent() const;
    bool action_only() const;
};

// Checks torus invariance sum (a_j - b_j) k_j = 0, degree >= 3 and that the c-dependence of
// any term supported on a single direction class points along that class.
void validate_model(const Kernel& K, const ModelHamiltonian& M, double tol = 1e-12);

// Exponent pairs (a, b) with 3 <= degree <= cap and sum (a_j - b_j) k_j = 0, one per
// conjugate pair.
std::vector<std::pair<std::vector<int>, std::vector<int>>> invariant_monomials(const Kernel& K,
                                                                               int degree_cap);

struct ModelEval {
    double G0 = 0.0;           // c-independent part
    Vec2 G1 = Vec2::Zero();    // d_c G
    KernelPoint grad0;         // gradient of G0 for the weighted product
    std::array<KernelPoint, 2> grad1;
};

ModelEval evaluate(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v);

// G(c, v) = G0(v) + (c - c*).G1(v)
double model_G(const Kernel& K, const ModelHamiltonian& M, const Vec2& c, const KernelPoint& v);

struct RandomModelOptions {
    int degree_cap = 4;
    bool action_only = false;
    bool c_dependent = true;
    double coef_scale = 1.0;
    double dc_scale = 0.5;
};

ModelHamiltonian random_model(const Kernel& K, std::mt19937_64& rng,
                              const RandomModelOptions& opt = {});

// gamma ||v||^4 written in monomials
ModelHamiltonian norm4_model(const Kernel& K, double gamma);

} // namespace stokes3d

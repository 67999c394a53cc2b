#pragma once

#include "stokes3d/dynamics.hpp"
#include "stokes3d/geometry.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace stokes3d {

enum class OrbitType { TwoD, ThreeD };

struct CriticalOrbit {
    KernelPoint representative;
    double H = 0.0;
    Vec2 momentum = Vec2::Zero();
    std::vector<double> moduli; // |z_j| in resonant-set order
    std::vector<double> phases; // phases of the model's phase-dependent monomials
    OrbitType type = OrbitType::ThreeD;
    int dir = -1;               // class of a 2D orbit
    double residual = 0.0;      // ||grad_v Phi(c(v), v)||
    int hits = 0;
};

struct OrbitSearchOptions {
    int n_starts = 30;
    double tol = 1e-7;       // relative clustering scale (width 10 tol)
    double grad_tol = 1e-12; // stationarity threshold for ||grad_v Phi||
    double t_max = 1e7;
    long max_steps = 200000;
    bool both_directions = true; // alternate descent and backward runs
    double fixed_dt = 0.0;       // forwarded to run_flow
    double drift_tol = 1e-6;
    std::uint64_t seed = 42;
    RegimeOptions regime;
};

struct OrbitSearchResult {
    std::vector<CriticalOrbit> orbits;      // sorted by H, then fingerprint
    std::vector<double> critical_values;    // distinct, ascending
    std::optional<double> level_2d;         // H on the 2D circle (collinear-unique)
    double value_width = 0.0;               // clustering width used for critical values
    int converged = 0;
    int failed = 0;
    std::vector<std::string> diagnostics;

    // distinct critical values of 3D orbits away from the 2D level
    int three_d_values_off_2d(double width) const;
};

// Random point of Sigma mapped onto cI^{-1}(a).
KernelPoint random_level_point(const Kernel& K, const Vec2& a, std::mt19937_64& rng);

OrbitSearchResult find_critical_orbits(const Kernel& K, const ModelHamiltonian& M, const Vec2& a,
                                       const ConeClassification& cc,
                                       const OrbitSearchOptions& opt = {});

std::string to_string(OrbitType t);

} // namespace stokes3d

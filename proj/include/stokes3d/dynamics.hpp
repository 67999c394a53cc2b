#pragma once

#include "stokes3d/model.hpp"

#include <string>
#include <vector>

namespace stokes3d {

enum class Regime { Origin, Far, Near, OnPlane };
std::string to_string(Regime r);

// Orthonormal frame used for the speed and multiplier solves. In the near regime and on a
// plane V_jhat the frame is (jhat, jhat_perp) of the closest class.
struct Frame {
    Regime regime = Regime::Origin;
    int dir = -1;
    Vec2 e1 = Vec2(1, 0);
    Vec2 e2 = Vec2(0, 1);
    double dist = 0.0; // d(v, V^2d)
    double norm = 0.0; // ||v||
};

struct RegimeOptions {
    double radius = 1.0;        // speed / multiplier regime radius in ||v||
    double near_factor = 1.0;   // near when d(v, V^2d) < near_factor sqrt(delta/4) ||v||
    int max_iterations = 100;
    double det_floor = 1e-10;   // relative conditioning floor of A(t, v)
};

Frame choose_frame(const Kernel& K, const KernelPoint& v, const RegimeOptions& opt = {});

struct SpeedResult {
    Vec2 c = Vec2::Zero();
    Regime regime = Regime::Origin;
    int dir = -1;
    int iterations = 0;
    double residual = 0.0;
    double contraction = 0.0;
};

// Solves cA(v)(c - c*) + Gt(c, v) = 0 with Gt_i = dG(c, v)[grad cI_i].
SpeedResult speed(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v,
                  const RegimeOptions& opt = {});

Vec2 reduced_momentum_I(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v);
double reduced_H(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v,
                 const RegimeOptions& opt = {});

// grad_v Phi(c, v) for Phi = (c - c*).cI + G
KernelPoint grad_Phi(const Kernel& K, const ModelHamiltonian& M, const Vec2& c,
                     const KernelPoint& v);

// A(t, v)_{ik} = dI(t)_k[grad cI_i] with I(t) = t I + (1 - t) cI.
Mat2 matrix_A(const Kernel& K, const ModelHamiltonian& M, double t, const KernelPoint& v);

// Solves A(t, v)^T mu = b.
Vec2 mu_solve(const Kernel& K, const ModelHamiltonian& M, double t, const KernelPoint& v,
              const Vec2& b, const RegimeOptions& opt = {});

struct MoserOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    double min_dt = 1e-10;
    int max_steps = 100000;
    double radius = 1.0;
    RegimeOptions regime;
};

KernelPoint moser_straighten(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v,
                             const MoserOptions& opt = {});

// Newton correction onto I = target along span(grad cI_1, grad cI_2).
KernelPoint project_momentum(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v,
                             const Vec2& target, int iterations = 4,
                             const RegimeOptions& opt = {});

struct FlowOptions {
    double t_end = 10.0;
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    double dt0 = 1e-2;
    double fixed_dt = 0.0;       // > 0 replaces adaptive stepping by RK4 with this step
    double drift_tol = 1e-6;
    int reproject_iterations = 3;
    double grad_tol = 0.0;       // stop once ||grad_v Phi|| < grad_tol
    long max_steps = 2000000;
    int direction = 1;           // +1 decreases H, -1 runs the field backwards
    double h_tol = 1e-9;         // allowed H increase relative to ||v0||^4
    int record_every = 0;        // keep every n-th accepted step (0 = none)
    RegimeOptions regime;
};

struct FlowSample {
    double t;
    double H;
    Vec2 I;
    std::vector<double> moduli;
};

struct FlowResult {
    KernelPoint v;
    double t = 0.0;
    double H0 = 0.0, H = 0.0;
    Vec2 I0 = Vec2::Zero(), I = Vec2::Zero();
    double dissipation = 0.0; // integral of ||grad_v Phi||^2
    double max_drift = 0.0;
    double grad_norm = 0.0;
    bool converged = false;
    long steps = 0;
    std::vector<FlowSample> trajectory;
};

// Integrates Y(v) = -grad_v Phi(c(v), v) + mu(v).grad cI(v), A(v)^T mu = dI[grad_v Phi].
FlowResult run_flow(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v0,
                    const FlowOptions& opt = {});

} // namespace stokes3d

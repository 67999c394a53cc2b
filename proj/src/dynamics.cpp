#include "stokes3d/dynamics.hpp"

#include "stokes3d/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <sstream>

namespace stokes3d {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

std::string to_string(Regime r) {
    switch (r) {
    case Regime::Origin: return "origin";
    case Regime::Far: return "far";
    case Regime::Near: return "near";
    case Regime::OnPlane: return "on-plane";
    }
    return "?";
}

Frame choose_frame(const Kernel& K, const KernelPoint& v, const RegimeOptions& opt) {
    Frame F;
    F.norm = std::sqrt(norm2(K, v));
    if (F.norm > opt.radius) {
        std::ostringstream os;
        os << "||v|| = " << F.norm << " exceeds the regime radius " << opt.radius;
        throw PreconditionError(os.str());
    }
    if (F.norm == 0.0) return F;
    const PlaneDistance pd = distance_to_planes(K, v);
    F.dist = pd.d;
    if (pd.exact) F.regime = Regime::OnPlane;
    else if (pd.d < opt.near_factor * std::sqrt(K.delta / 4.0) * F.norm) F.regime = Regime::Near;
    else F.regime = Regime::Far;
    if (F.regime != Regime::Far) {
        F.dir = pd.dir;
        F.e1 = K.dirs[pd.dir].direction;
        F.e2 = perp(F.e1);
    }
    return F;
}

namespace {

// Everything the speed and multiplier solves need at one point.
struct Local {
    Frame F;
    std::vector<double> n;
    ModelEval E;
    std::array<KernelPoint, 2> w; // grad cI along e1, e2
    Mat2 cA;                      // in the frame
    Mat2 Q;                       // columns e1, e2
};

Local prepare(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v,
              const RegimeOptions& opt) {
    Local L;
    L.F = choose_frame(K, v, opt);
    L.n = class_norms(K, v);
    L.E = evaluate(K, M, v);
    L.Q.col(0) = L.F.e1;
    L.Q.col(1) = L.F.e2;
    L.w = {grad_cI(K, v, L.F.e1), grad_cI(K, v, L.F.e2)};
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) L.cA(p, q) = cA_entry(K, L.n, L.Q.col(p), L.Q.col(q));
    return L;
}

KernelPoint grad_G1_along(const ModelEval& E, const Vec2& e) {
    return e.x() * E.grad1[0] + e.y() * E.grad1[1];
}

SpeedResult speed_local(const Kernel& K, const Local& L, const RegimeOptions& opt) {
    SpeedResult S;
    S.regime = L.F.regime;
    S.dir = L.F.dir;
    S.c = K.c_star;
    if (L.F.regime == Regime::Origin) return S;
    // Gt(y) = s0 + B y in the frame, with c - c* = Q y
    Vec2 s0;
    Mat2 S1;
    for (int p = 0; p < 2; ++p) {
        s0[p] = inner(K, L.E.grad0, L.w[p]);
        for (int k = 0; k < 2; ++k) S1(p, k) = inner(K, L.E.grad1[k], L.w[p]);
    }
    const Mat2 B = S1 * L.Q;
    Vec2 y = Vec2::Zero();
    if (L.F.regime == Regime::OnPlane) {
        // scalar equation along jhat, c_perp pinned to c*_perp
        const double a11 = L.cA(0, 0);
        S.contraction = std::abs(B(0, 0) / a11);
        if (S.contraction >= 1.0)
            throw NumericalError("speed map does not contract on V_jhat; reduce the radius");
        double y1 = 0.0, last = INFINITY;
        for (S.iterations = 1; S.iterations <= opt.max_iterations; ++S.iterations) {
            const double next = -(s0[0] + B(0, 0) * y1) / a11;
            const double step = std::abs(next - y1);
            // a contraction shrinks its steps; a stall means rounding level
            const bool done = step <= 4e-16 * std::abs(next) || (S.iterations > 2 && step >= last);
            y1 = next;
            last = step;
            if (done) break;
        }
        y = Vec2(y1, 0.0);
        S.residual = std::abs(a11 * y1 + s0[0] + B(0, 0) * y1);
    } else {
        const Mat2 Ainv = L.cA.inverse();
        S.contraction = (Ainv * B).norm();
        if (!(S.contraction < 1.0)) {
            std::ostringstream os;
            os << "speed map does not contract (ratio " << S.contraction
               << "); reduce the regime radius";
            throw NumericalError(os.str());
        }
        double last = INFINITY;
        for (S.iterations = 1; S.iterations <= opt.max_iterations; ++S.iterations) {
            const Vec2 next = -Ainv * (s0 + B * y);
            const double step = (next - y).norm();
            const bool done = step <= 4e-16 * next.norm() || (S.iterations > 2 && step >= last);
            y = next;
            last = step;
            if (done) break;
        }
        S.residual = (L.cA * y + s0 + B * y).norm();
    }
    if (S.iterations > opt.max_iterations) {
        std::ostringstream os;
        os << "speed fixed point did not converge in " << opt.max_iterations
           << " iterations, residual " << S.residual;
        throw NumericalError(os.str());
    }
    S.c = K.c_star + L.Q * y;
    return S;
}

// A(t) in the frame: A_pq = dI(t)_{e_q}[grad cI_{e_p}]
Mat2 A_local(const Kernel& K, const Local& L, double t) {
    Mat2 A = L.cA;
    if (t != 0.0)
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                A(p, q) += t * inner(K, grad_G1_along(L.E, L.Q.col(q)), L.w[p]);
    return A;
}

// Solves A(t)^T mu = b with b given in the frame; returns mu in the standard basis.
Vec2 mu_local(const Kernel& K, const Local& L, double t, const Vec2& bf,
              const RegimeOptions& opt) {
    if (L.F.regime == Regime::Origin) return Vec2::Zero();
    const Mat2 A = A_local(K, L, t);
    const double v2 = L.F.norm * L.F.norm;
    if (L.F.regime == Regime::OnPlane) {
        // rank one: only the jhat component of mu acts on V_jhat
        if (std::abs(bf[1]) > 1e-9 * bf.norm() + 1e-14 * v2) {
            std::ostringstream os;
            os << "structural decay violated: b_perp = " << bf[1] << " on V_jhat";
            throw PreconditionError(os.str());
        }
        if (!(std::abs(A(0, 0)) > opt.det_floor * v2))
            throw NumericalError("A(t, v) degenerate along jhat");
        return L.Q * Vec2(bf[0] / A(0, 0), 0.0);
    }
    const double det = A.determinant();
    if (!(std::abs(det) > opt.det_floor * v2 * L.F.dist * L.F.dist)) {
        std::ostringstream os;
        os << "A(t, v) ill conditioned: det = " << det << ", ||v|| = " << L.F.norm
           << ", d(v, V2d) = " << L.F.dist;
        throw NumericalError(os.str());
    }
    return L.Q * A.transpose().partialPivLu().solve(bf);
}

Vec2 to_frame(const Local& L, const Vec2& b) { return L.Q.transpose() * b; }

} // namespace

SpeedResult speed(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v,
                  const RegimeOptions& opt) {
    return speed_local(K, prepare(K, M, v, opt), opt);
}

Vec2 reduced_momentum_I(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v) {
    return momentum_cI(K, v) + evaluate(K, M, v).G1;
}

double reduced_H(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v,
                 const RegimeOptions& opt) {
    const Local L = prepare(K, M, v, opt);
    const Vec2 c = speed_local(K, L, opt).c;
    const Vec2 cI = momentum_cI(K, v);
    const Vec2 dc = c - K.c_star;
    const double Phi = dc.dot(cI) + L.E.G0 + dc.dot(L.E.G1);
    return Phi - c.dot(cI + L.E.G1);
}

KernelPoint grad_Phi(const Kernel& K, const ModelHamiltonian& M, const Vec2& c,
                     const KernelPoint& v) {
    const ModelEval E = evaluate(K, M, v);
    const Vec2 dc = c - K.c_star;
    return grad_cI(K, v, dc) + E.grad0 + grad_G1_along(E, dc);
}

Mat2 matrix_A(const Kernel& K, const ModelHamiltonian& M, double t, const KernelPoint& v) {
    const ModelEval E = evaluate(K, M, v);
    const auto g = grad_cI(K, v);
    Mat2 A;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            A(i, k) = inner(K, g[k], g[i]) + t * inner(K, E.grad1[k], g[i]);
    return A;
}

Vec2 mu_solve(const Kernel& K, const ModelHamiltonian& M, double t, const KernelPoint& v,
              const Vec2& b, const RegimeOptions& opt) {
    const Local L = prepare(K, M, v, opt);
    return mu_local(K, L, t, to_frame(L, b), opt);
}

KernelPoint moser_straighten(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v,
                             const MoserOptions& opt) {
    const double nv = std::sqrt(norm2(K, v));
    if (nv > opt.radius) throw PreconditionError("point outside the straightening radius");
    if (M.c_independent() || nv == 0.0) return v; // I = cI, the field vanishes
    const int n = K.size();
    // d zeta/dt = mu(t, zeta).grad cI(zeta),  A(t, zeta)^T mu = cI(zeta) - I(zeta)
    auto rhs = [&](const State& x, State& dxdt, double t) {
        const KernelPoint z = from_real(x, n);
        const Local L = prepare(K, M, z, opt.regime);
        const Vec2 bf(-L.Q.col(0).dot(L.E.G1), -L.Q.col(1).dot(L.E.G1));
        const Vec2 mu = mu_local(K, L, t, bf, opt.regime);
        dxdt = to_real(grad_cI(K, z, mu));
    };
    auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol,
                                           odeint::runge_kutta_cash_karp54<State>());
    State x = to_real(v);
    double t = 0.0, dt = 1e-2;
    int steps = 0;
    while (t < 1.0) {
        if (++steps > opt.max_steps) throw NumericalError("straightening step budget exhausted");
        dt = std::min(dt, 1.0 - t);
        if (stepper.try_step(rhs, x, t, dt) == odeint::fail && dt < opt.min_dt) {
            std::ostringstream os;
            os << "straightening step size collapsed at t = " << t << "; state:";
            for (double c : x) os << ' ' << c;
            throw NumericalError(os.str());
        }
    }
    return from_real(x, n);
}

KernelPoint project_momentum(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v,
                             const Vec2& target, int iterations, const RegimeOptions& opt) {
    KernelPoint w = v;
    for (int it = 0; it < iterations; ++it) {
        const Vec2 r = target - reduced_momentum_I(K, M, w);
        if (r.norm() <= 1e-15 * target.norm()) break;
        w += grad_cI(K, w, mu_solve(K, M, 1.0, w, r, opt));
    }
    return w;
}

namespace {

struct FlowField {
    const Kernel& K;
    const ModelHamiltonian& M;
    RegimeOptions regime;
    int sign;

    // Y and ||grad Phi||^2; also reports the speed
    void operator()(const State& x, State& dxdt, double) const {
        const int n = K.size();
        const KernelPoint v = from_real(x, n);
        double g2 = 0.0;
        const KernelPoint Y = field(v, g2);
        dxdt = to_real(Y);
        dxdt.push_back(g2);
    }

    KernelPoint field(const KernelPoint& v, double& g2) const {
        const Local L = prepare(K, M, v, regime);
        const SpeedResult S = speed_local(K, L, regime);
        const Vec2 dc = S.c - K.c_star;
        const KernelPoint gP = grad_cI(K, v, dc) + L.E.grad0 + grad_G1_along(L.E, dc);
        g2 = norm2(K, gP);
        // b = dI[grad Phi] in the frame
        Vec2 bf;
        for (int q = 0; q < 2; ++q) {
            const Vec2 e = L.Q.col(q);
            bf[q] = inner(K, grad_cI(K, v, e) + grad_G1_along(L.E, e), gP);
        }
        const Vec2 mu = mu_local(K, L, 1.0, bf, regime);
        KernelPoint Y = grad_cI(K, v, mu) - gP;
        if (sign < 0) Y *= -1.0;
        return Y;
    }
};

std::vector<double> moduli(const KernelPoint& v) {
    std::vector<double> m;
    for (const auto& z : v.z) m.push_back(std::abs(z));
    return m;
}

} // namespace

FlowResult run_flow(const Kernel& K, const ModelHamiltonian& M, const KernelPoint& v0,
                    const FlowOptions& opt) {
    const int n = K.size();
    FlowField Y{K, M, opt.regime, opt.direction >= 0 ? 1 : -1};
    FlowResult R;
    R.v = v0;
    R.I0 = reduced_momentum_I(K, M, v0);
    R.H0 = reduced_H(K, M, v0, opt.regime);
    const double v4 = std::pow(norm2(K, v0), 2);
    const double htol = opt.h_tol * v4 + 1e-300;

    State x = to_real(v0);
    x.push_back(0.0);
    double t = 0.0, dt = opt.fixed_dt > 0.0 ? opt.fixed_dt : opt.dt0;
    double Hprev = R.H0;
    auto record = [&](const KernelPoint& v, double H) {
        R.trajectory.push_back({t, H, reduced_momentum_I(K, M, v), moduli(v)});
    };
    if (opt.record_every > 0) record(v0, R.H0);

    auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol,
                                           odeint::runge_kutta_cash_karp54<State>());
    odeint::runge_kutta4<State> rk4;
    try {
        double g2 = 0.0;
        Y.field(v0, g2);
        R.grad_norm = std::sqrt(g2);
        while (t < opt.t_end) {
            if (opt.grad_tol > 0.0 && R.grad_norm < opt.grad_tol) {
                R.converged = true;
                break;
            }
            if (R.steps >= opt.max_steps) break;
            dt = std::min(dt, opt.t_end - t);
            if (opt.fixed_dt > 0.0) {
                try {
                    rk4.do_step(Y, x, t, dt);
                } catch (const PreconditionError& e) {
                    std::ostringstream os;
                    os << "fixed step " << dt << " broke momentum conservation at t = " << t << " ("
                       << e.what() << ")";
                    throw NumericalError(os.str());
                }
                t += dt;
            } else if (stepper.try_step(Y, x, t, dt) == odeint::fail) {
                if (dt < 1e-14 * std::max(1.0, t))
                    throw NumericalError("flow step size collapsed");
                continue;
            }
            ++R.steps;
            // back onto the momentum level
            State xs(x.begin(), x.end() - 1);
            KernelPoint v = from_real(xs, n);
            try {
                v = project_momentum(K, M, v, R.I0, opt.reproject_iterations, opt.regime);
            } catch (const PreconditionError& e) {
                std::ostringstream os;
                os << "momentum drift " << (reduced_momentum_I(K, M, v) - R.I0).norm() << " at t = " << t
                   << " could not be reprojected (" << e.what() << ")";
                throw NumericalError(os.str());
            }
            const double drift = (reduced_momentum_I(K, M, v) - R.I0).norm();
            R.max_drift = std::max(R.max_drift, drift);
            if (!(drift <= opt.drift_tol)) {
                std::ostringstream os;
                os << "momentum drift " << drift << " at t = " << t << " exceeds " << opt.drift_tol;
                throw NumericalError(os.str());
            }
            const double H = reduced_H(K, M, v, opt.regime);
            if (Y.sign * (H - Hprev) > htol) {
                std::ostringstream os;
                os << "H moved against the flow by " << Y.sign * (H - Hprev) << " at t = " << t;
                throw NumericalError(os.str());
            }
            Hprev = H;
            const double q = x.back();
            x = to_real(v);
            x.push_back(q);
            Y.field(v, g2);
            R.grad_norm = std::sqrt(g2);
            if (opt.record_every > 0 && R.steps % opt.record_every == 0) record(v, H);
        }
    } catch (const PreconditionError& e) {
        throw NumericalError(std::string("flow left its domain: ") + e.what());
    }
    R.t = t;
    R.dissipation = x.back();
    x.pop_back();
    R.v = from_real(x, n);
    R.I = reduced_momentum_I(K, M, R.v);
    R.H = reduced_H(K, M, R.v, opt.regime);
    if (opt.record_every > 0 && (R.trajectory.empty() || R.trajectory.back().t != t))
        record(R.v, R.H);
    return R;
}

} // namespace stokes3d

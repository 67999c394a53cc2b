#include "stokes3d/lattice.hpp"

#include "stokes3d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace stokes3d {

void PhysicalParams::validate() const {
    if (!(g > 0.0) || !std::isfinite(g)) throw PreconditionError("gravity must be positive");
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw PreconditionError("surface tension must be positive");
    if (depth && !(*depth > 0.0)) throw PreconditionError("depth must be positive or infinite");
}

double PhysicalParams::depth_factor(double t) const {
    return depth ? std::tanh(*depth * t) : 1.0;
}

LatticeSpec LatticeSpec::from_generators(const Mat2& W) {
    if (std::abs(W.determinant()) < 1e-300 || !W.allFinite())
        throw PreconditionError("lattice generator matrix is singular");
    LatticeSpec L;
    L.W = W;
    L.dual = W.inverse().transpose();
    return L;
}

LatticeSpec LatticeSpec::from_dual(const Mat2& D) {
    if (std::abs(D.determinant()) < 1e-300 || !D.allFinite())
        throw PreconditionError("dual generator matrix is singular");
    LatticeSpec L;
    L.dual = D;
    L.W = D.transpose().inverse();
    return L;
}

DualVector make_dual(const LatticeSpec& L, const Index2& k) { return {k, L.embed(k)}; }

std::vector<Index2> ResonantSet::indices() const {
    std::vector<Index2> out;
    for (const auto& v : vectors) out.push_back(v.k);
    return out;
}

double omega(const Vec2& xi, const PhysicalParams& p) {
    const double t = xi.norm();
    if (t == 0.0) return 0.0;
    return std::sqrt((p.g + p.kappa * t * t) * t * p.depth_factor(t));
}

BifurcationLine bifurcation_line(const DualVector& j, const PhysicalParams& p) {
    const double n = j.norm();
    if (n == 0.0) throw PreconditionError("bifurcation line of the zero vector");
    return {j.j / n, omega(j.j, p) / n};
}

double enumeration_radius(const Vec2& c_star, const PhysicalParams& p, double tau) {
    // For |j| >= 1: omega(j)/|j| >= sqrt(kappa |j| tanh(h)), while resonance forces
    // omega(j)/|j| <= |c*| + tau.
    const double ch = p.depth_factor(1.0);
    const double s = c_star.norm() + tau;
    return std::max(1.0, s * s / (p.kappa * ch));
}

std::vector<DualVector> enumerate_dual(const LatticeSpec& L, double radius, std::uint64_t budget,
                                       bool strict) {
    std::vector<DualVector> out;
    if (!(radius > 0.0)) return out;
    // k = W^T j, so |k_i| <= |W column i| * radius
    const long b0 = static_cast<long>(std::floor(L.W.col(0).norm() * radius)) + 1;
    const long b1 = static_cast<long>(std::floor(L.W.col(1).norm() * radius)) + 1;
    const double box = double(2 * b0 + 1) * double(2 * b1 + 1);
    if (box > double(budget)) {
        std::ostringstream os;
        os << "enumeration of " << box << " index candidates exceeds budget " << budget;
        throw BudgetError(os.str());
    }
    const double lim = strict ? radius * (1.0 - 1e-12) : radius * (1.0 + 1e-12);
    for (long a = -b0; a <= b0; ++a) {
        for (long b = -b1; b <= b1; ++b) {
            if (a == 0 && b == 0) continue;
            const Index2 k{a, b};
            const Vec2 j = L.embed(k);
            const double n = j.norm();
            if (strict ? n < lim : n <= lim) out.push_back({k, j});
        }
    }
    return out; // loop order is already lexicographic in k
}

ResonantSet resonant_set(const Vec2& c_star, const PhysicalParams& p, const LatticeSpec& L,
                         double tau, std::uint64_t budget) {
    p.validate();
    if (!(tau >= 0.0)) throw PreconditionError("resonance tolerance must be nonnegative");
    ResonantSet rs;
    rs.c_star = c_star;
    rs.params = p;
    rs.lattice = L;
    rs.tau = tau;
    if (tau == 0.0)
        rs.warnings.push_back("tau_res = 0 with floating parameters: exact resonance is "
                              "generically unattainable");
    rs.enumeration_radius = enumeration_radius(c_star, p, tau);
    for (const auto& dv : enumerate_dual(L, rs.enumeration_radius, budget)) {
        if (std::abs(omega(dv.j, p) - c_star.dot(dv.j)) <= tau) rs.vectors.push_back(dv);
    }
    return rs;
}

double Mj(const DualVector& j, const PhysicalParams& p) {
    const double t = j.norm();
    if (t == 0.0) throw PreconditionError("M_j of the zero vector");
    return std::pow(p.g + p.kappa * t * t, -0.25) * std::pow(t * p.depth_factor(t), 0.25);
}

Multiplier linearized_multipliers(const Vec2& c_star, const DualVector& j, const PhysicalParams& p,
                                  double tau) {
    const double t = j.norm();
    if (t == 0.0) throw PreconditionError("multiplier of the zero vector");
    const double w = omega(j.j, p);
    const double cj = c_star.dot(j.j);
    const double m = cj - w;
    if (std::abs(m) <= tau) throw PreconditionError("kernel direction: j is resonant for c*");
    return {m, t * t * t / std::abs(cj * cj - w * w)};
}

DesignKnobs DesignKnobs::parse(const std::vector<std::string>& names) {
    DesignKnobs k;
    k.c = false;
    for (const auto& n : names) {
        if (n == "c" || n == "c*" || n == "c_star") k.c = true;
        else if (n == "kappa") k.kappa = true;
        else if (n == "g") k.g = true;
        else if (n == "scale") k.scale = true;
        else if (n == "aspect") k.aspect = true;
        else throw PreconditionError("unknown design knob '" + n + "'");
    }
    return k;
}

namespace {

long primitive_key_gcd(const Index2& k) { return std::gcd(std::abs(k[0]), std::abs(k[1])); }

struct DesignState {
    Vec2 c;
    PhysicalParams p;
    Mat2 dual;
};

// Positive knobs are carried as logarithms so Newton never leaves the admissible range.
DesignState unpack(const Eigen::VectorXd& x, const DesignKnobs& kn, const DesignState& base) {
    DesignState s = base;
    int i = 0;
    if (kn.c) {
        s.c = Vec2(x[0], x[1]);
        i = 2;
    }
    if (kn.kappa) s.p.kappa = std::exp(x[i++]);
    if (kn.g) s.p.g = std::exp(x[i++]);
    if (kn.scale) s.dual *= std::exp(x[i++]);
    if (kn.aspect) s.dual.col(1) *= std::exp(x[i++]);
    return s;
}

Eigen::VectorXd residuals(const DesignState& s, const std::vector<Index2>& t) {
    Eigen::VectorXd r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Vec2 j = s.dual * Vec2(double(t[i][0]), double(t[i][1]));
        r[i] = omega(j, s.p) - s.c.dot(j);
    }
    return r;
}

} // namespace

Design design_resonance(const std::vector<Index2>& targets, const DesignKnobs& knobs,
                        const Vec2& c_star0, const PhysicalParams& p0, const LatticeSpec& L0,
                        const DesignOptions& opt) {
    p0.validate();
    if (targets.empty()) throw PreconditionError("no design targets");
    for (std::size_t a = 0; a < targets.size(); ++a) {
        if (targets[a][0] == 0 && targets[a][1] == 0) throw PreconditionError("zero target");
        for (std::size_t b = a + 1; b < targets.size(); ++b)
            if (targets[a] == targets[b]) throw PreconditionError("duplicate design targets");
    }
    // at most two resonant vectors per direction
    std::map<Index2, int> per_direction;
    for (const auto& k : targets) {
        const long g = primitive_key_gcd(k);
        if (++per_direction[{k[0] / g, k[1] / g}] > 2)
            throw PreconditionError("infeasible targets: three collinear resonant vectors");
    }
    const int m = knobs.count();
    if (m < int(targets.size()))
        throw PreconditionError("fewer free knobs than target constraints");

    DesignState base{c_star0, p0, L0.dual};
    if (knobs.c && c_star0.isZero()) {
        Vec2 c = Vec2::Zero();
        for (const auto& k : targets) {
            const Vec2 j = L0.embed(k);
            c += omega(j, p0) * j / j.squaredNorm();
        }
        base.c = c / double(targets.size());
    }
    Eigen::VectorXd x(m);
    {
        int i = 0;
        if (knobs.c) {
            x[0] = base.c.x();
            x[1] = base.c.y();
            i = 2;
        }
        if (knobs.kappa) x[i++] = std::log(p0.kappa);
        if (knobs.g) x[i++] = std::log(p0.g);
        if (knobs.scale) x[i++] = 0.0;
        if (knobs.aspect) x[i++] = 0.0;
        // scale and aspect are relative to the starting dual matrix
    }

    Eigen::VectorXd r = residuals(unpack(x, knobs, base), targets);
    int it = 0;
    for (; it < opt.max_iterations && r.lpNorm<Eigen::Infinity>() > opt.residual_tol; ++it) {
        Eigen::MatrixXd J(targets.size(), m);
        for (int c = 0; c < m; ++c) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[c]));
            Eigen::VectorXd xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            J.col(c) = (residuals(unpack(xp, knobs, base), targets) -
                        residuals(unpack(xm, knobs, base), targets)) / (2 * h);
        }
        const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-r);
        double lambda = 1.0;
        bool improved = false;
        while (lambda > 1e-10) {
            const Eigen::VectorXd xn = x + lambda * step;
            const Eigen::VectorXd rn = residuals(unpack(xn, knobs, base), targets);
            if (rn.allFinite() && rn.norm() < r.norm()) {
                x = xn;
                r = rn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    if (r.lpNorm<Eigen::Infinity>() > opt.residual_tol) {
        std::ostringstream os;
        os << "design_resonance did not converge after " << it << " iterations; residuals:";
        for (int i = 0; i < r.size(); ++i) os << ' ' << r[i];
        throw NumericalError(os.str());
    }

    const DesignState s = unpack(x, knobs, base);
    Design d;
    d.c_star = s.c;
    d.params = s.p;
    d.lattice = LatticeSpec::from_dual(s.dual);
    d.iterations = it;
    d.residuals.assign(r.data(), r.data() + r.size());

    auto want = targets;
    std::sort(want.begin(), want.end());
    const auto got = resonant_set(d.c_star, d.params, d.lattice, opt.tau, opt.budget).indices();
    if (got != want) {
        std::ostringstream os;
        os << "designed parameters resonate on a different set:";
        for (const auto& k : got) os << " (" << k[0] << ',' << k[1] << ')';
        throw PreconditionError(os.str());
    }
    return d;
}

} // namespace stokes3d

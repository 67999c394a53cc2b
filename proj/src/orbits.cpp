#include "stokes3d/orbits.hpp"

#include "stokes3d/errors.hpp"
#include "stokes3d/level_sets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace stokes3d {

std::string to_string(OrbitType t) { return t == OrbitType::TwoD ? "2D" : "3D"; }

KernelPoint random_level_point(const Kernel& K, const Vec2& a, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Splitting s = split(K, a);
    KernelPoint part[3] = {KernelPoint(K.size()), KernelPoint(K.size()), KernelPoint(K.size())};
    for (int i = 0; i < K.size(); ++i) part[s.sign[K.dir_of[i]] + 1].z[i] = cplx(N(rng), N(rng));
    bool present[3];
    for (int p = 0; p < 3; ++p) {
        const double nn = norm2(K, part[p]);
        present[p] = nn > 0.0;
        if (present[p]) part[p] *= 1.0 / std::sqrt(nn);
    }
    double t = 0.0;
    if (!present[0] || !present[2]) t = 1.0;
    else if (present[1]) t = U(rng);
    return join_parametrize(K, a, part[0] + part[2], part[1], t);
}

namespace {

struct PhaseMonomial {
    std::vector<int> a, b;
    int degree;
};

std::vector<PhaseMonomial> phase_set(const ModelHamiltonian& M) {
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
    std::vector<PhaseMonomial> out;
    for (const auto& T : M.terms) {
        if (T.action_only()) continue;
        auto key = T.b < T.a ? std::make_pair(T.b, T.a) : std::make_pair(T.a, T.b);
        if (seen.insert(key).second) out.push_back({key.first, key.second, T.degree()});
    }
    return out;
}

double wrap(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    x = std::fmod(x, two_pi);
    if (x <= -std::numbers::pi) x += two_pi;
    if (x > std::numbers::pi) x -= two_pi;
    return x;
}

std::vector<double> phases(const std::vector<PhaseMonomial>& P, const KernelPoint& v, double nv,
                           double rel) {
    std::vector<double> ph, neg;
    for (const auto& m : P) {
        cplx val(1.0, 0.0);
        for (int j = 0; j < v.size(); ++j) {
            for (int k = 0; k < m.a[j]; ++k) val *= v.z[j];
            for (int k = 0; k < m.b[j]; ++k) val *= std::conj(v.z[j]);
        }
        const double p = std::abs(val) > rel * std::pow(nv, m.degree) ? std::arg(val) : 0.0;
        ph.push_back(wrap(p));
        neg.push_back(wrap(-p));
    }
    // reversal conjugates every phase
    return std::min(ph, neg);
}

bool close(const std::vector<double>& x, const std::vector<double>& y, double w, bool angular) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = angular ? std::abs(wrap(x[i] - y[i])) : std::abs(x[i] - y[i]);
        if (d > w) return false;
    }
    return true;
}

} // namespace

int OrbitSearchResult::three_d_values_off_2d(double width) const {
    std::vector<double> vals;
    for (const auto& o : orbits)
        if (o.type == OrbitType::ThreeD && (!level_2d || std::abs(o.H - *level_2d) > width))
            vals.push_back(o.H);
    std::sort(vals.begin(), vals.end());
    int count = 0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (i == 0 || vals[i] - vals[i - 1] > width) ++count;
    return count;
}

OrbitSearchResult find_critical_orbits(const Kernel& K, const ModelHamiltonian& M, const Vec2& a,
                                       const ConeClassification& cc,
                                       const OrbitSearchOptions& opt) {
    if (cc.verdict != Verdict::InteriorNoncollinear &&
        cc.verdict != Verdict::InteriorCollinearUnique &&
        cc.verdict != Verdict::InteriorCollinearDouble)
        throw PreconditionError("orbit search needs an interior momentum, got " +
                                to_string(cc.verdict));
    if (opt.n_starts < 10 * K.size())
        throw PreconditionError("orbit search needs at least 10 starts per resonant vector");
    validate_model(K, M);

    OrbitSearchResult R;
    const auto P = phase_set(M);
    const double w = 10.0 * opt.tol;
    if (cc.verdict == Verdict::InteriorCollinearUnique) {
        const KernelPoint b = project_momentum(K, M, branch_2d(K, a), a, 8, opt.regime);
        R.level_2d = reduced_H(K, M, b, opt.regime);
    }

    std::mt19937_64 rng(opt.seed);
    for (int s = 0; s < opt.n_starts; ++s) {
        FlowOptions fo;
        fo.t_end = opt.t_max;
        fo.grad_tol = opt.grad_tol;
        fo.max_steps = opt.max_steps;
        fo.direction = (opt.both_directions && s % 2 == 1) ? -1 : 1;
        fo.regime = opt.regime;
        fo.fixed_dt = opt.fixed_dt;
        fo.drift_tol = opt.drift_tol;
        std::ostringstream tag;
        tag << "start " << s << " (" << (fo.direction > 0 ? "descent" : "ascent") << "): ";
        try {
            KernelPoint v = random_level_point(K, a, rng);
            v = project_momentum(K, M, v, a, 8, opt.regime);
            const FlowResult F = run_flow(K, M, v, fo);
            if (!F.converged) {
                ++R.failed;
                std::ostringstream os;
                os << tag.str() << "not stationary after t = " << F.t << ", ||grad Phi|| = "
                   << F.grad_norm;
                R.diagnostics.push_back(os.str());
                continue;
            }
            ++R.converged;
            CriticalOrbit o;
            o.representative = F.v;
            o.H = F.H;
            o.momentum = F.I;
            o.residual = F.grad_norm;
            o.hits = 1;
            const double nv = std::sqrt(norm2(K, F.v));
            for (const auto& z : F.v.z) o.moduli.push_back(std::abs(z));
            o.phases = phases(P, F.v, nv, w);
            for (int d = 0; d < int(K.dirs.size()); ++d) {
                double off = 0.0;
                for (int i = 0; i < K.size(); ++i)
                    if (K.dir_of[i] != d) off = std::max(off, o.moduli[i]);
                if (off <= w * nv) {
                    o.type = OrbitType::TwoD;
                    o.dir = d;
                }
            }
            const double wm = w * nv, wH = w * nv * nv * nv * nv;
            bool merged = false;
            for (auto& e : R.orbits) {
                if (!close(e.moduli, o.moduli, wm, false) || !close(e.phases, o.phases, 1e2 * w, true))
                    continue;
                if (std::abs(e.H - o.H) > wH) {
                    std::ostringstream os;
                    os << "fingerprint collision at distinct critical values " << e.H << " and "
                       << o.H << "; clustering width too coarse";
                    throw NumericalError(os.str());
                }
                ++e.hits;
                e.residual = std::max(e.residual, o.residual);
                merged = true;
                break;
            }
            if (!merged) R.orbits.push_back(std::move(o));
        } catch (const NumericalError& e) {
            ++R.failed;
            R.diagnostics.push_back(tag.str() + e.what());
        }
    }
    std::sort(R.orbits.begin(), R.orbits.end(), [](const CriticalOrbit& x, const CriticalOrbit& y) {
        if (x.H != y.H) return x.H < y.H;
        return x.moduli < y.moduli;
    });
    double scale = 0.0;
    for (const auto& o : R.orbits) scale = std::max(scale, norm2(K, o.representative));
    const double wH = w * scale * scale;
    for (const auto& o : R.orbits)
        if (R.critical_values.empty() || o.H - R.critical_values.back() > wH)
            R.critical_values.push_back(o.H);
    R.value_width = wH;
    return R;
}

} // namespace stokes3d

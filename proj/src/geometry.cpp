#include "stokes3d/geometry.hpp"

#include "stokes3d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace stokes3d {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Index2 primitive(const Index2& k) {
    const long g = std::gcd(std::abs(k[0]), std::abs(k[1]));
    return {k[0] / g, k[1] / g};
}

} // namespace

std::vector<DirectionClass> direction_classes(const LatticeSpec& L,
                                              const std::vector<DualVector>& V) {
    if (V.empty()) throw PreconditionError("direction classes of an empty resonant set");
    // Same primitive index <=> positively parallel, decided on integers.
    std::map<Index2, std::vector<int>> groups;
    for (int i = 0; i < int(V.size()); ++i) {
        if (V[i].k[0] == 0 && V[i].k[1] == 0) throw PreconditionError("zero resonant vector");
        groups[primitive(V[i].k)].push_back(i);
    }
    std::vector<DirectionClass> out;
    for (auto& [p, mem] : groups) {
        if (mem.size() > 2) {
            std::ostringstream os;
            os << "direction (" << p[0] << ',' << p[1] << ") holds " << mem.size()
               << " resonant vectors; at most 2 are possible, check tolerances";
            throw PreconditionError(os.str());
        }
        DirectionClass d;
        d.members = mem;
        d.minimal_generator = make_dual(L, p);
        d.direction = d.minimal_generator.unit();
        d.subspace_dim = 2 * int(mem.size());
        out.push_back(std::move(d));
    }
    return out;
}

ResonanceCone cone(const std::vector<DirectionClass>& D, const Vec2& c_star) {
    if (D.empty()) throw PreconditionError("cone of an empty resonant set");
    // All directions lie in the open half plane c*.j > 0; order them by angle from c*.
    std::vector<std::pair<double, int>> ang;
    for (int i = 0; i < int(D.size()); ++i) {
        const Vec2& u = D[i].direction;
        ang.push_back({std::atan2(cross(c_star, u), c_star.dot(u)), i});
    }
    std::sort(ang.begin(), ang.end());
    ResonanceCone C;
    C.dir_min = ang.front().second;
    C.dir_max = ang.back().second;
    C.ray_min = -D[C.dir_min].direction;
    C.ray_max = -D[C.dir_max].direction;
    C.angle = ang.back().first - ang.front().first;
    return C;
}

ConeSide ResonanceCone::locate(const Vec2& a, double tol) const {
    const double na = a.norm();
    if (na == 0.0) return ConeSide::Origin;
    const Vec2 u = a / na;
    if (dir_min == dir_max) {
        if (std::abs(cross(ray_min, u)) <= tol && ray_min.dot(u) > 0) return ConeSide::Boundary;
        return ConeSide::Outside;
    }
    // u = s ray_min + t ray_max
    Mat2 M;
    M.col(0) = ray_min;
    M.col(1) = ray_max;
    const Vec2 st = M.partialPivLu().solve(u);
    if (st.x() < -tol || st.y() < -tol) return ConeSide::Outside;
    if (st.x() <= tol || st.y() <= tol) return ConeSide::Boundary;
    return ConeSide::Interior;
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::OutsideCone: return "OutsideCone";
    case Verdict::ZeroMomentum: return "ZeroMomentum";
    case Verdict::BoundaryCone: return "BoundaryCone";
    case Verdict::InteriorNoncollinear: return "InteriorNoncollinear";
    case Verdict::InteriorCollinearUnique: return "InteriorCollinearUnique";
    case Verdict::InteriorCollinearDouble: return "InteriorCollinearDouble";
    }
    return "?";
}

std::string Topology::name() const {
    std::ostringstream os;
    switch (kind) {
    case TopologyKind::Empty: os << "Empty"; break;
    case TopologyKind::Point: os << "Point"; break;
    case TopologyKind::Sphere: os << "Sphere(" << p << ")"; break;
    case TopologyKind::ProductOfSpheres: os << "ProductOfSpheres(" << p << "," << q << ")"; break;
    case TopologyKind::Join:
        if (r == 1) os << "JoinWithCircle(" << p << "," << q << ")";
        else os << "JoinWithSphere(" << p << "," << q << "," << r << ")";
        break;
    }
    return os.str();
}

std::string Topology::label() const {
    std::ostringstream os;
    switch (kind) {
    case TopologyKind::Empty: os << "∅"; break;
    case TopologyKind::Point: os << "{0}"; break;
    case TopologyKind::Sphere: os << "S" << p; break;
    case TopologyKind::ProductOfSpheres: os << "S" << p << "×S" << q; break;
    case TopologyKind::Join: os << "S" << p << "×S" << q << " ⋆ S" << r; break;
    }
    return os.str();
}

ConeClassification classify_momentum(const Vec2& a, const std::vector<DualVector>& V,
                                     const std::vector<DirectionClass>& D, const Vec2& c_star,
                                     const ClassifyOptions& opt) {
    ConeClassification cc;
    cc.a = a;
    cc.resonant_count = int(V.size());
    const double na = a.norm();
    if (na > opt.eps_valid) {
        std::ostringstream os;
        os << "|a| = " << na << " exceeds eps_valid = " << opt.eps_valid
           << "; the small-momentum regime is not guaranteed";
        cc.warnings.push_back(os.str());
    }
    if (na == 0.0) {
        cc.verdict = Verdict::ZeroMomentum;
        cc.topology.kind = TopologyKind::Point;
        cc.multiplicity_bound = 0;
        return cc;
    }
    const ResonanceCone C = cone(D, c_star);
    const ConeSide side = C.locate(a, opt.tol);
    if (side == ConeSide::Outside) {
        cc.verdict = Verdict::OutsideCone;
        cc.topology.kind = TopologyKind::Empty;
        cc.multiplicity_bound = 0;
        return cc;
    }
    // sign of jhat . a_perp with a_perp = (-a2, a1)
    const Vec2 u = a / na;
    for (int i = 0; i < int(D.size()); ++i) {
        const double s = cross(u, D[i].direction);
        if (std::abs(s) <= opt.tol) {
            cc.d_zero.push_back(i);
            cc.dim_zero += D[i].subspace_dim;
        } else if (s < 0) {
            cc.d_minus.push_back(i);
            cc.dim_minus += D[i].subspace_dim;
        } else {
            cc.d_plus.push_back(i);
            cc.dim_plus += D[i].subspace_dim;
        }
    }
    const int nV = int(V.size());
    if (side == ConeSide::Boundary) {
        cc.verdict = Verdict::BoundaryCone;
        cc.topology = {TopologyKind::Sphere, cc.dim_zero - 1, 0, 0};
        cc.multiplicity_bound = 0; // only 2D waves
        return cc;
    }
    if (cc.d_zero.empty()) {
        cc.verdict = Verdict::InteriorNoncollinear;
        cc.topology = {TopologyKind::ProductOfSpheres, cc.dim_minus - 1, cc.dim_plus - 1, 0};
        cc.multiplicity_bound = nV - 1;
        return cc;
    }
    const DirectionClass& d0 = D[cc.d_zero.front()];
    cc.topology = {TopologyKind::Join, cc.dim_minus - 1, cc.dim_plus - 1, cc.dim_zero - 1};
    if (d0.members.size() == 1) {
        cc.verdict = Verdict::InteriorCollinearUnique;
        cc.j0 = V[d0.members.front()].k;
        cc.multiplicity_bound = nV - 2;
    } else {
        cc.verdict = Verdict::InteriorCollinearDouble;
        cc.multiplicity_bound.reset();
    }
    return cc;
}

} // namespace stokes3d

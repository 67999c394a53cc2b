#pragma once

#include "stokes3d/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stokes3d {

// Resonant vectors sharing one direction. members index into the resonant list.
struct DirectionClass {
    Vec2 direction;
    std::vector<int> members;
    DualVector minimal_generator;
    int subspace_dim = 0; // real dimension, 2 per member
};

// Partition by parallelism. Parallel test is exact: det[j|j'] = det(W^{-T}) det[k|k'].
std::vector<DirectionClass> direction_classes(const LatticeSpec& L,
                                              const std::vector<DualVector>& V);

enum class ConeSide { Outside, Boundary, Interior, Origin };

struct ResonanceCone {
    Vec2 ray_min; // extreme rays -j_min, -j_max of {sum tau_j j, tau_j <= 0}
    Vec2 ray_max;
    int dir_min = 0;
    int dir_max = 0;
    double angle = 0.0;

    ConeSide locate(const Vec2& a, double tol = 1e-12) const;
};

ResonanceCone cone(const std::vector<DirectionClass>& D, const Vec2& c_star);

enum class Verdict {
    OutsideCone,
    ZeroMomentum,
    BoundaryCone,
    InteriorNoncollinear,
    InteriorCollinearUnique,
    InteriorCollinearDouble
};

enum class TopologyKind { Empty, Point, Sphere, ProductOfSpheres, Join };

struct Topology {
    TopologyKind kind = TopologyKind::Empty;
    int p = 0; // sphere dimension (Sphere), or dim V- - 1
    int q = 0; // dim V+ - 1
    int r = 0; // dim V0 - 1 (Join)

    std::string name() const;  // e.g. JoinWithCircle(1,1)
    std::string label() const; // e.g. S1×S1 ⋆ S1
};

struct ConeClassification {
    Vec2 a = Vec2::Zero();
    Verdict verdict = Verdict::OutsideCone;
    std::vector<int> d_minus, d_zero, d_plus; // direction class ids
    int dim_minus = 0, dim_zero = 0, dim_plus = 0;
    Topology topology;
    std::optional<int> multiplicity_bound; // nullopt = Indeterminate
    std::optional<Index2> j0;              // collinear-unique resonant vector
    int resonant_count = 0;
    std::vector<std::string> warnings;
};

std::string to_string(Verdict v);

struct ClassifyOptions {
    double eps_valid = 0.1; // smallness regime for |a|; exceeded only triggers a warning
    double tol = 1e-12;
};

ConeClassification classify_momentum(const Vec2& a, const std::vector<DualVector>& V,
                                     const std::vector<DirectionClass>& D, const Vec2& c_star,
                                     const ClassifyOptions& opt = {});

} // namespace stokes3d

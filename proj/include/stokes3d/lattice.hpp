#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stokes3d {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Index2 = std::array<long, 2>;

// Depth is std::nullopt for infinitely deep water; tanh(h|xi|) is then 1.
struct PhysicalParams {
    double g = 1.0;
    double kappa = 1.0;
    std::optional<double> depth;

    void validate() const;
    // tanh(depth * t), or 1 when the depth is infinite
    double depth_factor(double t) const;
};

// Spatial lattice 2*pi*W*Z^2. Dual vectors are j = W^{-T} k for integer k.
struct LatticeSpec {
    Mat2 W = Mat2::Identity();
    Mat2 dual = Mat2::Identity();

    static LatticeSpec from_generators(const Mat2& W);
    static LatticeSpec square() { return from_generators(Mat2::Identity()); }
    // Lattice whose dual generators are the columns of D.
    static LatticeSpec from_dual(const Mat2& D);

    Vec2 embed(const Index2& k) const { return dual * Vec2(double(k[0]), double(k[1])); }
};

struct DualVector {
    Index2 k{0, 0};
    Vec2 j = Vec2::Zero();

    double norm() const { return j.norm(); }
    double norm1() const { return std::abs(j.x()) + std::abs(j.y()); }
    Vec2 unit() const { return j / j.norm(); }
};

DualVector make_dual(const LatticeSpec& L, const Index2& k);

struct ResonantSet {
    Vec2 c_star = Vec2::Zero();
    PhysicalParams params;
    LatticeSpec lattice;
    std::vector<DualVector> vectors; // sorted by index
    double tau = 1e-9;
    double enumeration_radius = 0.0;
    std::vector<std::string> warnings;

    std::vector<Index2> indices() const;
};

double omega(const Vec2& xi, const PhysicalParams& p);

// {c : c.j = omega(j)}, stored as unit normal and offset (= distance to the origin).
struct BifurcationLine {
    Vec2 normal;
    double offset;
};

BifurcationLine bifurcation_line(const DualVector& j, const PhysicalParams& p);

// Radius beyond which no dual vector can satisfy |omega(j) - c.j| <= tau.
double enumeration_radius(const Vec2& c_star, const PhysicalParams& p, double tau);

// All nonzero dual vectors with |j| <= radius (or < radius when strict), sorted by index.
// Throws BudgetError if the index box holds more than `budget` candidates.
std::vector<DualVector> enumerate_dual(const LatticeSpec& L, double radius, std::uint64_t budget,
                                       bool strict = false);

constexpr std::uint64_t kDefaultBudget = 50'000'000;

ResonantSet resonant_set(const Vec2& c_star, const PhysicalParams& p, const LatticeSpec& L,
                         double tau = 1e-9, std::uint64_t budget = kDefaultBudget);

double Mj(const DualVector& j, const PhysicalParams& p);

struct Multiplier {
    double value; // c*.j - omega(j)
    double ratio; // |j|^3 / |(c*.j)^2 - omega(j)^2|
};

Multiplier linearized_multipliers(const Vec2& c_star, const DualVector& j, const PhysicalParams& p,
                                  double tau = 1e-9);

struct DesignKnobs {
    bool c = true;
    bool kappa = false;
    bool g = false;
    bool scale = false;  // uniform scaling of the dual lattice
    bool aspect = false; // scaling of the second dual generator only

    int count() const { return 2 * c + kappa + g + scale + aspect; }
    static DesignKnobs parse(const std::vector<std::string>& names);
};

struct DesignOptions {
    int max_iterations = 200;
    double residual_tol = 1e-13;
    double tau = 1e-9;
    std::uint64_t budget = kDefaultBudget;
};

struct Design {
    Vec2 c_star;
    PhysicalParams params;
    LatticeSpec lattice;
    int iterations = 0;
    std::vector<double> residuals;
};

// Damped Newton on omega(j_i) - c*.j_i = 0 over the selected knobs, starting from
// (c_star0, p0, L0). The result is re-verified by resonant_set.
Design design_resonance(const std::vector<Index2>& targets, const DesignKnobs& knobs,
                        const Vec2& c_star0, const PhysicalParams& p0, const LatticeSpec& L0,
                        const DesignOptions& opt = {});

} // namespace stokes3d

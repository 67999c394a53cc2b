#include "oracles.hpp"

#include "stokes3d/errors.hpp"
#include "stokes3d/lattice.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace stokes3d;

namespace {
// reference values computed with 30-digit arithmetic
constexpr double kOmega10 = 1.41421356237309504880;
constexpr double kOmega11 = 2.05976714390711775583;
constexpr double kOmega10Depth05 = 0.961371059747493916106;
constexpr double kM10 = 0.840896415253714543031;
constexpr double kM11 = 0.828606690758069640597;
constexpr double kAspect = 0.492606454073202366814;
constexpr double kDeskC = 1.58113883008418966600;

PhysicalParams unit() { return PhysicalParams{}; }
} // namespace

TEST_CASE("omega") {
    const PhysicalParams p = unit();
    CHECK(omega(Vec2(0, 0), p) == 0.0);
    CHECK(omega(Vec2(1, 0), p) == doctest::Approx(kOmega10).epsilon(1e-15));
    CHECK(omega(Vec2(1, 1), p) == doctest::Approx(kOmega11).epsilon(1e-15));
    CHECK(omega(Vec2(-1, 0), p) == omega(Vec2(1, 0), p));
    PhysicalParams f = p;
    f.depth = 0.5;
    CHECK(omega(Vec2(1, 0), f) == doctest::Approx(kOmega10Depth05).epsilon(1e-15));
    PhysicalParams bad = p;
    bad.kappa = 0.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = p;
    bad.depth = -1.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("bifurcation lines") {
    const PhysicalParams p = unit();
    const LatticeSpec L = LatticeSpec::square();
    const auto b10 = bifurcation_line(make_dual(L, {1, 0}), p);
    CHECK(b10.normal.isApprox(Vec2(1, 0)));
    CHECK(b10.offset == doctest::Approx(std::sqrt(2.0)));
    const auto b01 = bifurcation_line(make_dual(L, {0, 1}), p);
    CHECK(b01.normal.isApprox(Vec2(0, 1)));
    CHECK(b01.offset == doctest::Approx(std::sqrt(2.0)));
    const auto bm = bifurcation_line(make_dual(L, {-1, 0}), p);
    CHECK(bm.normal.isApprox(Vec2(-1, 0)));
    CHECK(bm.offset == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("resonant set examples") {
    const PhysicalParams p = unit();
    const LatticeSpec L = LatticeSpec::square();
    const auto rs = resonant_set(Vec2(std::sqrt(2.0), 0), p, L);
    REQUIRE(rs.vectors.size() == 1);
    CHECK(rs.vectors[0].k == Index2{1, 0});
    CHECK(oracle::brute_resonant(L.W, Vec2(std::sqrt(2.0), 0), 1, 1, 0, 1e-9, 10.0) ==
          std::set<Index2>{{1, 0}});

    CHECK(resonant_set(Vec2(0.1, 0), p, L).vectors.empty());

    const auto diamond = resonant_set(Vec2(kOmega11, 0), p, L);
    std::set<Index2> got;
    for (const auto& k : diamond.indices()) got.insert(k);
    CHECK(got.count({1, 1}) == 1);
    CHECK(got.count({1, -1}) == 1);
}

TEST_CASE("enumeration radius and budget") {
    const PhysicalParams p = unit();
    const LatticeSpec L = LatticeSpec::square();
    const auto V = enumerate_dual(L, 3.0, kDefaultBudget, true);
    CHECK(V.size() == 24);
    CHECK(enumerate_dual(L, 3.0, kDefaultBudget, false).size() == 28);
    CHECK(enumerate_dual(L, 0.0, kDefaultBudget, true).empty());
    CHECK_THROWS_AS(enumerate_dual(L, 100.0, 100), BudgetError);
    // no resonance can sit beyond the radius: omega(j) > |c||j| + tau there
    const Vec2 c(1.7, 0.4);
    const double R = enumeration_radius(c, p, 1e-9);
    for (double r : {R, 2 * R, 10 * R})
        CHECK(omega(Vec2(r, 0), p) > c.norm() * r + 1e-9);
}

TEST_CASE("Mj and multipliers") {
    const PhysicalParams p = unit();
    const LatticeSpec L = LatticeSpec::square();
    CHECK(Mj(make_dual(L, {1, 0}), p) == doctest::Approx(kM10).epsilon(1e-14));
    CHECK(Mj(make_dual(L, {1, 1}), p) == doctest::Approx(kM11).epsilon(1e-14));
    const Vec2 c(std::sqrt(2.0), 0);
    CHECK(linearized_multipliers(c, make_dual(L, {0, 1}), p).value ==
          doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
    CHECK(linearized_multipliers(c, make_dual(L, {2, 0}), p).value ==
          doctest::Approx(2 * std::sqrt(2.0) - std::sqrt(10.0)).epsilon(1e-14));
    try {
        linearized_multipliers(c, make_dual(L, {1, 0}), p);
        FAIL("resonant vector accepted");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("kernel direction") != std::string::npos);
    }
}

TEST_CASE("design") {
    const PhysicalParams p = unit();
    const LatticeSpec L = LatticeSpec::square();
    DesignKnobs kc;
    const auto d2 = design_resonance({{1, 1}, {1, -1}}, kc, Vec2(1.5, 0.3), p, L);
    CHECK(d2.c_star.x() == doctest::Approx(kOmega11).epsilon(1e-13));
    CHECK(std::abs(d2.c_star.y()) < 1e-13);

    // one target: minimum-norm step from a start on the axis stays on the axis
    const auto d1 = design_resonance({{1, 0}}, kc, Vec2(1.0, 0.0), p, L);
    CHECK(d1.c_star.x() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(std::abs(d1.c_star.y()) < 1e-13);

    DesignKnobs ka = DesignKnobs::parse({"c", "aspect"});
    const auto d3 = design_resonance({{1, 1}, {1, -1}, {2, 0}}, ka, Vec2(1.5, 0), p, L);
    CHECK(d3.c_star.x() == doctest::Approx(kDeskC).epsilon(1e-13));
    CHECK(d3.lattice.dual(1, 1) == doctest::Approx(kAspect).epsilon(1e-12));
    const auto rs = resonant_set(d3.c_star, d3.params, d3.lattice);
    CHECK(rs.vectors.size() == 3);

    // the square lattice cannot host the three targets by tuning kappa alone
    DesignKnobs kk = DesignKnobs::parse({"c", "kappa"});
    CHECK_THROWS_AS(design_resonance({{1, 1}, {1, -1}, {2, 0}}, kk, Vec2(1.5, 0), p, L), Error);
    CHECK_THROWS_AS(design_resonance({{1, 0}, {2, 0}, {3, 0}}, ka, Vec2(1.5, 0), p, L),
                    PreconditionError);
}

TEST_CASE("random completeness against brute force") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        Mat2 W;
        W << 1 + 0.3 * U(rng), 0.3 * U(rng), 0.3 * U(rng), 1 + 0.3 * U(rng);
        const LatticeSpec L = LatticeSpec::from_generators(W);
        PhysicalParams p;
        p.g = 1.0 + 0.5 * U(rng);
        p.kappa = 1.0 + 0.5 * U(rng);
        const DualVector j = make_dual(L, {1, trial % 3 - 1});
        const Vec2 u = j.unit();
        const Vec2 c = omega(j.j, p) / j.norm() * u + 0.4 * U(rng) * Vec2(-u.y(), u.x());
        const auto rs = resonant_set(c, p, L, 1e-9);
        const auto idx = rs.indices();
        std::set<Index2> got(idx.begin(), idx.end());
        const auto ref = oracle::brute_resonant(L.W, c, p.g, p.kappa, 0, 1e-9, 2 * rs.enumeration_radius);
        CHECK(got == ref);
        CHECK(got.count(j.k) == 1);
    }
}

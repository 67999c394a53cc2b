#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stokes3d {

struct ConeClassification;
struct Kernel;

using Exponent = std::vector<int>;

// Polynomial in Q[u_1..u_d]; each u_i has cohomological degree 2, degree() reports the
// polynomial degree.
class Polynomial {
public:
    explicit Polynomial(int nvars = 0) : d_(nvars) {}

    static Polynomial constant(int nvars, const mpq_class& c);
    static Polynomial monomial(const Exponent& e, const mpq_class& c = 1);

    int nvars() const { return d_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Exponent, mpq_class>& terms() const { return terms_; }
    int degree() const; // -1 for the zero polynomial
    bool is_homogeneous() const;
    // homogeneous component of polynomial degree k
    Polynomial component(int k) const;
    mpq_class coefficient(const Exponent& e) const;

    void add_term(const Exponent& e, const mpq_class& c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    bool operator==(const Polynomial& o) const { return d_ == o.d_ && terms_ == o.terms_; }

    std::string str() const; // e.g. "u1^2 - u2^2"

private:
    int d_;
    std::map<Exponent, mpq_class> terms_;
};

using WeightColumn = std::vector<long>;
using WeightMatrix = std::vector<WeightColumn>; // columns k_1..k_n

struct GradedIdeal {
    int nvars = 0;
    std::vector<Polynomial> generators;

    std::string str() const;
};

Polynomial euler_linear(const WeightColumn& k);
Polynomial euler_product(const WeightMatrix& K, int nvars);

GradedIdeal sphere_annihilator(const WeightMatrix& K, int nvars);

// Index pair (column of K1, column of K2) of the first Q-linearly dependent pair, if any.
std::optional<std::pair<int, int>> collinear_pair(const WeightMatrix& K1, const WeightMatrix& K2);

GradedIdeal product_annihilator(const WeightMatrix& K1, const WeightMatrix& K2, int nvars);
GradedIdeal join_annihilator(const GradedIdeal& ann_X, const Polynomial& e_sphere);

// Decision f in I on the degree slices of f.
// Membership certificate: f = sum_i q_i g_i. Non-membership certificate: a linear functional
// y on the monomials of degree `witness_degree` vanishing on every g_i * m but with y(f) != 0.
struct Membership {
    bool member = false;
    std::vector<Polynomial> multipliers;
    int witness_degree = -1;
    std::map<Exponent, mpq_class> functional;
    int slice_rank = 0;
    int augmented_rank = 0;
};

Membership ideal_member(const Polynomial& f, const GradedIdeal& I);

struct Witness {
    Polynomial f;
    GradedIdeal ideal;
    Membership certificate;
    bool noncollinear = true;
    std::optional<std::pair<int, int>> offending;
};

Witness witness_class(const WeightMatrix& K1, const WeightMatrix& K2, int nvars);

// n1 + n2 - 2, certified by witness_class. Throws on collinearity.
int cuplength_lower_bound(const WeightMatrix& K1, const WeightMatrix& K2, int nvars);

// Weight matrices of V- and V+ for a classification (torus weights are the dual indices).
std::pair<WeightMatrix, WeightMatrix> split_weights(const Kernel& K, const ConeClassification& cc);

// Number of critical values off the 2D level guaranteed for interior verdicts.
int critical_value_bound(const Kernel& K, const ConeClassification& cc);

// Longest product of integer linear forms (coefficients in [-B,B], at most L factors) that is
// not in the ideal. A bound for the search family only.
struct CupSearch {
    int length = 0;
    Polynomial product;
    long candidates_tested = 0;
};
CupSearch cuplength_search(const GradedIdeal& I, int coef_bound, int max_length);

} // namespace stokes3d

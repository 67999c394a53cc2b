#include "stokes3d/cohomology.hpp"

#include "stokes3d/errors.hpp"
#include "stokes3d/geometry.hpp"
#include "stokes3d/kernel.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace stokes3d {

Polynomial Polynomial::constant(int nvars, const mpq_class& c) {
    Polynomial p(nvars);
    p.add_term(Exponent(std::size_t(nvars), 0), c);
    return p;
}

Polynomial Polynomial::monomial(const Exponent& e, const mpq_class& c) {
    Polynomial p(int(e.size()));
    p.add_term(e, c);
    return p;
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
    return d;
}

bool Polynomial::is_homogeneous() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
        const int k = std::accumulate(e.begin(), e.end(), 0);
        if (d >= 0 && k != d) return false;
        d = k;
    }
    return true;
}

Polynomial Polynomial::component(int k) const {
    Polynomial p(d_);
    for (const auto& [e, c] : terms_)
        if (std::accumulate(e.begin(), e.end(), 0) == k) p.terms_.emplace(e, c);
    return p;
}

mpq_class Polynomial::coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? mpq_class(0) : it->second;
}

void Polynomial::add_term(const Exponent& e, const mpq_class& c) {
    if (int(e.size()) != d_) throw PreconditionError("exponent length does not match variables");
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    if (r.d_ == 0) r.d_ = o.d_;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r = *this;
    if (r.d_ == 0) r.d_ = o.d_;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial r(std::max(d_, o.d_));
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) {
            Exponent e(e1.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
            r.add_term(e, c1 * c2);
        }
    return r;
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        mpq_class a = abs(c);
        const bool neg = c < 0;
        if (first) os << (neg ? "-" : "");
        else os << (neg ? " - " : " + ");
        first = false;
        const bool constant = std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
        bool need_star = false;
        if (a != 1 || constant) {
            os << a.get_str();
            need_star = true;
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (need_star) os << '*';
            os << 'u' << i + 1;
            if (e[i] > 1) os << '^' << e[i];
            need_star = true;
        }
    }
    return os.str();
}

std::string GradedIdeal::str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < generators.size(); ++i)
        os << (i ? ", " : "") << generators[i].str();
    os << ')';
    return os.str();
}

Polynomial euler_linear(const WeightColumn& k) {
    Polynomial p(int(k.size()));
    for (std::size_t i = 0; i < k.size(); ++i) {
        Exponent e(k.size(), 0);
        e[i] = 1;
        p.add_term(e, mpq_class(k[i]));
    }
    return p;
}

Polynomial euler_product(const WeightMatrix& K, int nvars) {
    Polynomial p = Polynomial::constant(nvars, 1);
    for (const auto& k : K) {
        if (int(k.size()) != nvars) throw PreconditionError("weight column has wrong length");
        p = p * euler_linear(k);
    }
    return p;
}

namespace {

bool is_zero_column(const WeightColumn& k) {
    return std::all_of(k.begin(), k.end(), [](long x) { return x == 0; });
}

bool dependent(const WeightColumn& a, const WeightColumn& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (a[i] * b[j] - a[j] * b[i] != 0) return false;
    return true;
}

void all_monomials(int nvars, int degree, std::vector<Exponent>& out) {
    Exponent e(std::size_t(nvars), 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == nvars - 1) {
            e[i] = left;
            out.push_back(e);
            return;
        }
        for (int x = left; x >= 0; --x) {
            e[i] = x;
            rec(i + 1, left - x);
        }
    };
    if (nvars == 0) {
        if (degree == 0) out.push_back({});
        return;
    }
    rec(0, degree);
}

// Slice solve for homogeneous f of degree D.
Membership slice_member(const Polynomial& f, const GradedIdeal& I, int D) {
    const int d = I.nvars;
    std::vector<Exponent> rows;
    all_monomials(d, D, rows);
    std::map<Exponent, int> row_of;
    for (int r = 0; r < int(rows.size()); ++r) row_of[rows[r]] = r;

    struct Col {
        int gen;
        Exponent mult;
    };
    std::vector<Col> cols;
    std::vector<std::vector<mpq_class>> M; // column-major would be natural; keep rows
    const int R = int(rows.size());
    std::vector<std::vector<mpq_class>> colvals;
    for (int g = 0; g < int(I.generators.size()); ++g) {
        const Polynomial& G = I.generators[g];
        if (G.is_zero()) continue;
        const int dg = G.degree();
        if (dg > D) continue;
        std::vector<Exponent> ms;
        all_monomials(d, D - dg, ms);
        for (const auto& m : ms) {
            std::vector<mpq_class> v(std::size_t(R), mpq_class(0));
            for (const auto& [e, c] : G.terms()) {
                Exponent s(e);
                for (int i = 0; i < d; ++i) s[i] += m[i];
                v[row_of.at(s)] += c;
            }
            cols.push_back({g, m});
            colvals.push_back(std::move(v));
        }
    }
    const int C = int(cols.size());
    // augmented rows [M | f | T] where T tracks the row transform
    std::vector<std::vector<mpq_class>> A(std::size_t(R),
                                          std::vector<mpq_class>(std::size_t(C + 1 + R), 0));
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) A[r][c] = colvals[c][r];
        A[r][C] = f.coefficient(rows[r]);
        A[r][C + 1 + r] = 1;
    }
    std::vector<int> pivot_col;
    int rank = 0;
    for (int c = 0; c < C && rank < R; ++c) {
        int p = -1;
        for (int r = rank; r < R; ++r)
            if (A[r][c] != 0) {
                p = r;
                break;
            }
        if (p < 0) continue;
        std::swap(A[p], A[rank]);
        const mpq_class inv = 1 / A[rank][c];
        for (auto& x : A[rank]) x *= inv;
        for (int r = 0; r < R; ++r) {
            if (r == rank || A[r][c] == 0) continue;
            const mpq_class fct = A[r][c];
            for (int k = 0; k < C + 1 + R; ++k) A[r][k] -= fct * A[rank][k];
        }
        pivot_col.push_back(c);
        ++rank;
    }
    Membership res;
    res.slice_rank = rank;
    res.augmented_rank = rank;
    int bad = -1;
    for (int r = rank; r < R; ++r)
        if (A[r][C] != 0) {
            bad = r;
            break;
        }
    if (bad >= 0) {
        res.member = false;
        res.augmented_rank = rank + 1;
        res.witness_degree = D;
        const mpq_class scale = 1 / A[bad][C];
        for (int r = 0; r < R; ++r) {
            const mpq_class y = A[bad][C + 1 + r] * scale;
            if (y != 0) res.functional[rows[r]] = y;
        }
        return res;
    }
    res.member = true;
    res.multipliers.assign(I.generators.size(), Polynomial(d));
    for (int i = 0; i < rank; ++i) {
        const Col& col = cols[pivot_col[i]];
        res.multipliers[col.gen].add_term(col.mult, A[i][C]);
    }
    return res;
}

} // namespace

GradedIdeal sphere_annihilator(const WeightMatrix& K, int nvars) {
    for (std::size_t i = 0; i < K.size(); ++i)
        if (is_zero_column(K[i]))
            throw PreconditionError("sphere annihilator needs nonzero weights (column " +
                                    std::to_string(i + 1) + " is zero)");
    return {nvars, {euler_product(K, nvars)}};
}

std::optional<std::pair<int, int>> collinear_pair(const WeightMatrix& K1, const WeightMatrix& K2) {
    for (int a = 0; a < int(K1.size()); ++a)
        for (int b = 0; b < int(K2.size()); ++b)
            if (dependent(K1[a], K2[b])) return std::make_pair(a, b);
    return std::nullopt;
}

GradedIdeal product_annihilator(const WeightMatrix& K1, const WeightMatrix& K2, int nvars) {
    if (auto p = collinear_pair(K1, K2)) {
        std::ostringstream os;
        os << "non-collinearity violated: column " << p->first + 1 << " of K1 and column "
           << p->second + 1 << " of K2 are linearly dependent over Q";
        throw PreconditionError(os.str());
    }
    return {nvars, {euler_product(K1, nvars), euler_product(K2, nvars)}};
}

GradedIdeal join_annihilator(const GradedIdeal& ann_X, const Polynomial& e_sphere) {
    if (!e_sphere.is_homogeneous()) throw PreconditionError("sphere class must be homogeneous");
    GradedIdeal J{ann_X.nvars, {}};
    if (e_sphere.is_zero()) return J;
    for (const auto& g : ann_X.generators) {
        Polynomial p = e_sphere * g;
        if (!p.is_zero()) J.generators.push_back(p);
    }
    return J;
}

Membership ideal_member(const Polynomial& f, const GradedIdeal& I) {
    for (const auto& g : I.generators)
        if (!g.is_homogeneous()) throw PreconditionError("ideal generators must be homogeneous");
    Membership total;
    total.member = true;
    total.multipliers.assign(I.generators.size(), Polynomial(I.nvars));
    if (f.is_zero()) return total;
    for (int D = 0; D <= f.degree(); ++D) {
        const Polynomial fD = f.component(D);
        if (fD.is_zero()) continue;
        Membership m = slice_member(fD, I, D);
        total.slice_rank = m.slice_rank;
        total.augmented_rank = m.augmented_rank;
        if (!m.member) return m;
        for (std::size_t i = 0; i < m.multipliers.size(); ++i)
            total.multipliers[i] = total.multipliers[i] + m.multipliers[i];
    }
    return total;
}

Witness witness_class(const WeightMatrix& K1, const WeightMatrix& K2, int nvars) {
    if (K1.empty() || K2.empty()) throw PreconditionError("witness needs n1, n2 >= 1");
    Witness w;
    w.offending = collinear_pair(K1, K2);
    w.noncollinear = !w.offending;
    w.ideal = {nvars, {euler_product(K1, nvars), euler_product(K2, nvars)}};
    w.f = Polynomial::constant(nvars, 1);
    for (std::size_t i = 0; i + 1 < K1.size(); ++i) w.f = w.f * euler_linear(K1[i]);
    for (std::size_t i = 0; i + 1 < K2.size(); ++i) w.f = w.f * euler_linear(K2[i]);
    w.certificate = ideal_member(w.f, w.ideal);
    return w;
}

int cuplength_lower_bound(const WeightMatrix& K1, const WeightMatrix& K2, int nvars) {
    product_annihilator(K1, K2, nvars); // precondition check
    const Witness w = witness_class(K1, K2, nvars);
    if (w.certificate.member)
        throw NumericalError("witness class lies in the annihilator; certificate failed");
    return int(K1.size() + K2.size()) - 2;
}

std::pair<WeightMatrix, WeightMatrix> split_weights(const Kernel& K, const ConeClassification& cc) {
    WeightMatrix Km, Kp;
    for (int d : cc.d_minus)
        for (int m : K.dirs[d].members) Km.push_back({K.V[m].k[0], K.V[m].k[1]});
    for (int d : cc.d_plus)
        for (int m : K.dirs[d].members) Kp.push_back({K.V[m].k[0], K.V[m].k[1]});
    return {Km, Kp};
}

int critical_value_bound(const Kernel& K, const ConeClassification& cc) {
    if (cc.verdict != Verdict::InteriorCollinearUnique &&
        cc.verdict != Verdict::InteriorNoncollinear)
        throw PreconditionError("critical value bound not applicable to verdict " +
                                to_string(cc.verdict));
    const auto [Km, Kp] = split_weights(K, cc);
    return cuplength_lower_bound(Km, Kp, 2) + 1;
}

CupSearch cuplength_search(const GradedIdeal& I, int coef_bound, int max_length) {
    const int d = I.nvars;
    // primitive integer forms up to sign
    std::vector<WeightColumn> forms;
    std::vector<long> k(std::size_t(d), -coef_bound);
    std::function<void(int)> rec = [&](int i) {
        if (i == d) {
            long g = 0;
            for (long x : k) g = std::gcd(g, std::abs(x));
            if (g != 1) return;
            const auto nz = std::find_if(k.begin(), k.end(), [](long x) { return x != 0; });
            if (*nz < 0) return;
            forms.push_back(k);
            return;
        }
        for (long x = -coef_bound; x <= coef_bound; ++x) {
            k[i] = x;
            rec(i + 1);
        }
    };
    if (d > 0) rec(0);
    CupSearch best;
    best.product = Polynomial::constant(d, 1);
    std::vector<int> pick;
    for (int len = 1; len <= max_length; ++len) {
        bool found = false;
        pick.assign(std::size_t(len), 0);
        // nondecreasing index tuples enumerate multisets of forms
        while (true) {
            Polynomial p = Polynomial::constant(d, 1);
            for (int i : pick) p = p * euler_linear(forms[i]);
            ++best.candidates_tested;
            if (!ideal_member(p, I).member) {
                best.length = len;
                best.product = p;
                found = true;
                break;
            }
            int pos = len - 1;
            while (pos >= 0 && pick[pos] == int(forms.size()) - 1) --pos;
            if (pos < 0) break;
            ++pick[pos];
            for (int q = pos + 1; q < len; ++q) pick[q] = pick[pos];
        }
        if (!found) break; // every longer product contains a product of this length
    }
    return best;
}

} // namespace stokes3d

#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmean/core_numerics.hpp"
#include "qmean/estimators.hpp"
#include "qmean/simplex.hpp"

namespace qmean {

inline constexpr double kDefaultDegreeTolerance = 1e-8;

/// Smallest d such that every forward difference of order d+1 is within tol * max|values|.
/// The interpolant through the nodes 0..n then has degree at most d.
inline int minimal_degree(std::span<const double> values, double tol = kDefaultDegreeTolerance) {
    if (!(tol > 0.0)) throw std::domain_error("minimal_degree: tol must be positive");
    if (values.empty()) throw std::domain_error("minimal_degree: no values");
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0;
    const double limit = tol * scale;
    std::vector<double> diff(values.begin(), values.end());
    for (int d = 0;; ++d) {
        for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
        diff.pop_back();
        if (diff.empty()) return d;
        const bool flat = std::all_of(diff.begin(), diff.end(), [limit](double x) { return std::abs(x) <= limit; });
        if (flat) return d;
    }
}

/// A univariate polynomial in |X| known by its values at k = 0..n.
struct UnivariatePolyValues {
    int n = 0;
    std::vector<double> values;
    int min_degree = 0;

    UnivariatePolyValues(int n_, std::vector<double> values_, double tol = kDefaultDegreeTolerance)
        : n(n_), values(std::move(values_)) {
        if (values.size() != static_cast<std::size_t>(n) + 1)
            throw std::domain_error("UnivariatePolyValues: expected n+1 node values");
        min_degree = minimal_degree(values, tol);
    }
};

inline constexpr int kSymmetrizeMaxN = 20;

/// Average a function on B_n over each Hamming-weight class. Input index bit i is x_{i+1}.
inline UnivariatePolyValues symmetrize(std::span<const double> truth_table, int n) {
    if (n < 1 || n > kSymmetrizeMaxN) throw std::domain_error("symmetrize: n must lie in [1,20]");
    if (truth_table.size() != (std::size_t{1} << n))
        throw std::domain_error("symmetrize: table length must be 2^n");
    std::vector<CompensatedSum> sums(static_cast<std::size_t>(n) + 1);
    for (std::size_t x = 0; x < truth_table.size(); ++x) {
        const double v = truth_table[x];
        if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("symmetrize: table entries must lie in [0,1]");
        sums[static_cast<std::size_t>(std::popcount(x))].add(v);
    }
    std::vector<double> values(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        values[static_cast<std::size_t>(k)] =
            sums[static_cast<std::size_t>(k)].value() / static_cast<double>(exact_binomial(n, k));
    }
    return UnivariatePolyValues(n, std::move(values));
}

struct AcceptancePolynomial {
    UnivariatePolyValues poly;
    std::int64_t queries = 0;

    std::int64_t degree_budget() const { return 2 * queries; }
    bool within_budget() const { return poly.min_degree <= degree_budget(); }
};

/// Acceptance probability of the thresholding test, class by class. For a symmetric estimator this
/// is already the symmetrized acceptance polynomial.
inline AcceptancePolynomial acceptance_poly_of_distinguisher(const Estimator& est, const PartialFnSpec& spec,
                                                             double threshold, double tol = kDefaultDegreeTolerance) {
    if (!(threshold > 0.0)) throw std::domain_error("acceptance_poly_of_distinguisher: threshold must be positive");
    if (spec.n > kSymmetrizeMaxN) throw std::domain_error("acceptance_poly_of_distinguisher: n must be <= 20");
    std::vector<double> values(static_cast<std::size_t>(spec.n) + 1);
    for (int k = 0; k <= spec.n; ++k) {
        values[static_cast<std::size_t>(k)] =
            acceptance_probability(est.distribution(WeightClass(spec.n, k)), spec.k1, threshold);
    }
    return {UnivariatePolyValues(spec.n, std::move(values), tol), est.queries()};
}

// ---------------------------------------------------------------------------
// Degree oracle for f_{k1,k2}

inline constexpr int kDegreeLpMaxN = 80;
inline constexpr int kDegreeLpExactMaxN = 40;
inline constexpr double kFloatFeasibilitySlack = 1e-9;

struct DegreeWitness {
    int n = 0;
    int k1 = 0;
    int k2 = 0;
    double c = 0.0;
    int degree = 0;
    bool exact = false;
    std::vector<double> coefficients;  // monomial basis in k, ascending powers
};

namespace detail {

template <class Scalar>
Scalar ratio(long num, long den) {
    if constexpr (std::is_floating_point_v<Scalar>) return static_cast<Scalar>(num) / static_cast<Scalar>(den);
    else {
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }
}

/// Rows V[k][j] = T_j((2k - n)/n): Chebyshev polynomials shifted onto [0,n].
template <class Scalar>
std::vector<std::vector<Scalar>> chebyshev_nodes(int n, int degree) {
    std::vector<std::vector<Scalar>> V(static_cast<std::size_t>(n) + 1,
                                       std::vector<Scalar>(static_cast<std::size_t>(degree) + 1));
    for (int k = 0; k <= n; ++k) {
        const Scalar t = ratio<Scalar>(2L * k - n, n);
        auto& row = V[static_cast<std::size_t>(k)];
        row[0] = Scalar(1);
        if (degree >= 1) row[1] = t;
        for (int j = 2; j <= degree; ++j) row[j] = Scalar(2) * t * row[j - 1] - row[j - 2];
    }
    return V;
}

/// Monomial coefficients (in k, ascending) of sum_j coef[j] T_j((2k - n)/n).
template <class Scalar>
std::vector<Scalar> chebyshev_to_monomial(const std::vector<Scalar>& coef, int n) {
    const std::size_t deg = coef.size() - 1;
    // t = u k + v with u = 2/n, v = -1; build T_j as polynomials in k
    const Scalar u = ratio<Scalar>(2, n);
    const Scalar v = Scalar(-1);
    std::vector<std::vector<Scalar>> T;
    T.push_back({Scalar(1)});
    if (deg >= 1) T.push_back({v, u});
    for (std::size_t j = 2; j <= deg; ++j) {
        std::vector<Scalar> next(j + 1, Scalar(0));
        const auto& a = T[j - 1];
        for (std::size_t i = 0; i < a.size(); ++i) {
            next[i] += Scalar(2) * v * a[i];
            next[i + 1] += Scalar(2) * u * a[i];
        }
        const auto& b = T[j - 2];
        for (std::size_t i = 0; i < b.size(); ++i) next[i] -= b[i];
        T.push_back(std::move(next));
    }
    std::vector<Scalar> out(deg + 1, Scalar(0));
    for (std::size_t j = 0; j <= deg; ++j)
        for (std::size_t i = 0; i < T[j].size(); ++i) out[i] += coef[j] * T[j][i];
    return out;
}

inline double to_double(double x) { return x; }
inline double to_double(const mpq_class& x) { return x.get_d(); }

/// Constraints 0 <= P(k) <= 1 for all k, P(k1) >= 1 - c, P(k2) <= c.
template <class Scalar>
lp::Solution<Scalar> separating_polynomial(int n, int k1, int k2, const Scalar& c, int degree, double slack) {
    const auto V = chebyshev_nodes<Scalar>(n, degree);
    std::vector<std::vector<Scalar>> A;
    std::vector<Scalar> b;
    const Scalar pad = Scalar(slack);
    auto negate = [](const std::vector<Scalar>& row) {
        std::vector<Scalar> r(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) r[i] = -row[i];
        return r;
    };
    for (int k = 0; k <= n; ++k) {
        A.push_back(V[static_cast<std::size_t>(k)]);
        b.push_back(Scalar(1) + pad);
        A.push_back(negate(V[static_cast<std::size_t>(k)]));
        b.push_back(pad);
    }
    A.push_back(negate(V[static_cast<std::size_t>(k1)]));
    b.push_back(c - Scalar(1) + pad);
    A.push_back(V[static_cast<std::size_t>(k2)]);
    b.push_back(c + pad);
    return lp::feasible_point(A, b);
}

template <class Scalar>
DegreeWitness search_degree(int n, int k1, int k2, double c, double slack) {
    const Scalar cs(c);
    for (int d = 0; d <= n; ++d) {
        auto sol = separating_polynomial<Scalar>(n, k1, k2, cs, d, slack);
        if (!sol.feasible) continue;
        DegreeWitness w;
        w.n = n;
        w.k1 = k1;
        w.k2 = k2;
        w.c = c;
        w.degree = d;
        w.exact = !std::is_floating_point_v<Scalar>;
        for (const Scalar& x : chebyshev_to_monomial(sol.x, n)) w.coefficients.push_back(to_double(x));
        return w;
    }
    throw std::logic_error("degree search exhausted: interpolation at degree n must be feasible");
}

}  // namespace detail

/// Smallest degree of a polynomial with values in [0,1] on 0..n, >= 1-c at k1 and <= c at k2.
/// Exact rational simplex for n <= 40, floating simplex with 1e-9 slack above.
inline DegreeWitness min_degree_lp(const PartialFnSpec& spec, double c) {
    if (!(c >= 0.0 && c < 0.5)) throw std::domain_error("min_degree_lp: c must lie in [0, 1/2)");
    if (spec.n > kDegreeLpMaxN) throw std::domain_error("min_degree_lp: n must be <= 80");
    if (spec.n <= kDegreeLpExactMaxN) return detail::search_degree<mpq_class>(spec.n, spec.k1, spec.k2, c, 0.0);
    return detail::search_degree<double>(spec.n, spec.k1, spec.k2, c, kFloatFeasibilitySlack);
}

/// Evaluates a monomial-basis witness at k.
inline double evaluate_monomial(const std::vector<double>& coefficients, double k) {
    double acc = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;) acc = acc * k + coefficients[i];
    return acc;
}

}  // namespace qmean

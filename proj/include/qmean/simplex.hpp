#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace qmean::lp {

/// Sign tests. Floating scalars use an absolute tolerance; exact scalars (e.g. mpq_class) compare to zero.
template <class Scalar>
struct Tolerance {
    static constexpr double eps = 1e-11;
    static bool negative(const Scalar& x) {
        if constexpr (std::is_floating_point_v<Scalar>) return x < -eps;
        else return sgn(x) < 0;
    }
    static bool positive(const Scalar& x) {
        if constexpr (std::is_floating_point_v<Scalar>) return x > eps;
        else return sgn(x) > 0;
    }
    static bool nonzero(const Scalar& x) { return negative(x) || positive(x); }
};

template <class Scalar>
struct Solution {
    bool feasible = false;
    std::vector<Scalar> x;
};

/// Dense dictionary simplex for feasibility of { x >= 0 : A x <= b }.
/// Bland's rule on both the entering and leaving choice, so degenerate problems terminate.
/// Phase one adds a single artificial column (index -1) with coefficient -1 in every row.
template <class Scalar>
class FeasibilitySimplex {
  public:
    using Matrix = std::vector<std::vector<Scalar>>;
    using Tol = Tolerance<Scalar>;

    FeasibilitySimplex(const Matrix& A, const std::vector<Scalar>& b)
        : m_(static_cast<int>(b.size())),
          n_(A.empty() ? 0 : static_cast<int>(A.front().size())),
          nonbasic_(static_cast<std::size_t>(n_) + 1),
          basic_(static_cast<std::size_t>(m_)),
          d_(static_cast<std::size_t>(m_) + 2, std::vector<Scalar>(static_cast<std::size_t>(n_) + 2)) {
        if (static_cast<int>(A.size()) != m_) throw std::domain_error("simplex: A and b disagree on row count");
        for (int i = 0; i < m_; ++i) {
            if (static_cast<int>(A[i].size()) != n_) throw std::domain_error("simplex: ragged constraint matrix");
            for (int j = 0; j < n_; ++j) at(i, j) = A[i][j];
            basic_[i] = n_ + i;
            at(i, n_) = Scalar(-1);
            at(i, n_ + 1) = b[i];
        }
        for (int j = 0; j < n_; ++j) nonbasic_[j] = j;
        nonbasic_[n_] = -1;
        at(m_ + 1, n_) = Scalar(1);
    }

    Solution<Scalar> solve() {
        Solution<Scalar> out;
        int r = 0;
        for (int i = 1; i < m_; ++i)
            if (at(i, n_ + 1) < at(r, n_ + 1)) r = i;
        if (m_ > 0 && Tol::negative(at(r, n_ + 1))) {
            pivot(r, n_);
            run(2);
            if (Tol::negative(at(m_ + 1, n_ + 1))) return out;
            // drive the artificial variable out of the basis if it stayed at level zero
            for (int i = 0; i < m_; ++i) {
                if (basic_[i] != -1) continue;
                int s = -1;
                for (int j = 0; j <= n_; ++j)
                    if (Tol::nonzero(at(i, j)) && (s == -1 || nonbasic_[j] < nonbasic_[s])) s = j;
                if (s != -1) pivot(i, s);
            }
        }
        out.feasible = true;
        out.x.assign(static_cast<std::size_t>(n_), Scalar(0));
        for (int i = 0; i < m_; ++i)
            if (basic_[i] >= 0 && basic_[i] < n_) out.x[basic_[i]] = at(i, n_ + 1);
        return out;
    }

  private:
    Scalar& at(int i, int j) { return d_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

    void pivot(int r, int s) {
        const Scalar inv = Scalar(1) / at(r, s);
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == r || !Tol::nonzero(at(i, s))) continue;
            const Scalar factor = at(i, s) * inv;
            for (int j = 0; j < n_ + 2; ++j) {
                if (Tol::nonzero(at(r, j))) at(i, j) -= at(r, j) * factor;
            }
            at(i, s) = at(r, s) * factor;
        }
        for (int j = 0; j < n_ + 2; ++j)
            if (j != s) at(r, j) *= inv;
        for (int i = 0; i < m_ + 2; ++i)
            if (i != r) at(i, s) *= -inv;
        at(r, s) = inv;
        std::swap(basic_[r], nonbasic_[s]);
    }

    // Phase 2 minimizes the artificial variable (objective row m+1).
    void run(int phase) {
        const int obj = m_ + phase - 1;
        for (;;) {
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (nonbasic_[j] == -phase) continue;
                if (Tol::negative(at(obj, j)) && (s == -1 || nonbasic_[j] < nonbasic_[s])) s = j;
            }
            if (s == -1) return;
            int r = -1;
            Scalar best{};
            for (int i = 0; i < m_; ++i) {
                if (!Tol::positive(at(i, s))) continue;
                Scalar ratio = at(i, n_ + 1) / at(i, s);
                if (r == -1 || ratio < best || (!(best < ratio) && basic_[i] < basic_[r])) {
                    r = i;
                    best = ratio;
                }
            }
            if (r == -1) return;  // unbounded; cannot happen for the bounded phase-one objective
            pivot(r, s);
        }
    }

    int m_, n_;
    std::vector<int> nonbasic_, basic_;
    std::vector<std::vector<Scalar>> d_;
};

/// Feasibility of { x free : A x <= b } via the split x = u - v.
template <class Scalar>
Solution<Scalar> feasible_point(const std::vector<std::vector<Scalar>>& A, const std::vector<Scalar>& b) {
    const std::size_t cols = A.empty() ? 0 : A.front().size();
    std::vector<std::vector<Scalar>> split(A.size(), std::vector<Scalar>(2 * cols));
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            split[i][j] = A[i][j];
            split[i][cols + j] = -A[i][j];
        }
    }
    FeasibilitySimplex<Scalar> solver(split, b);
    Solution<Scalar> s = solver.solve();
    if (!s.feasible) return s;
    Solution<Scalar> out;
    out.feasible = true;
    out.x.resize(cols);
    for (std::size_t j = 0; j < cols; ++j) out.x[j] = s.x[j] - s.x[cols + j];
    return out;
}

}  // namespace qmean::lp

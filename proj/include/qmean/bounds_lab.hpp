#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmean/core_numerics.hpp"
#include "qmean/error_criteria.hpp"
#include "qmean/estimators.hpp"
#include "qmean/measures.hpp"

namespace qmean {

/// Outcome of comparing two closed-form quantities. See each producer for the meaning of lhs/rhs/margin.
struct BoundCheck {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    double margin = 0.0;
};

struct ConstantAlgorithmError {
    double value = 0.0;
    double ratio = 0.0;  // value * sqrt(2 pi n)
};

/// Average error of the constant-1/2 answer under the uniform input measure, p = 1.
inline ConstantAlgorithmError const_alg_error_exact(int n) {
    if (n < 1) throw std::domain_error("const_alg_error_exact: n must be positive");
    const long double log_norm = static_cast<long double>(n) * std::log(2.0L);
    CompensatedSum s;
    for (int k = 0; k <= n; ++k) {
        const double gap = std::abs(0.5 - static_cast<double>(k) / n);
        if (gap == 0.0) continue;
        s.add(static_cast<double>(std::exp(log_binomial_ld(n, k) - log_norm)) * gap);
    }
    ConstantAlgorithmError r;
    r.value = s.value();
    r.ratio = r.value * std::sqrt(2.0 * std::numbers::pi * n);
    return r;
}

/// Central binomial lower bound C(n, n/2 +- c sqrt(n)) > e^{-6c^2-2} 2^n / sqrt(2 pi n) for
/// 1 <= c <= sqrt(n)/6. Both floor and ceil of n/2 +- c sqrt(n) are checked.
/// lhs/rhs are natural logs; lhs is the smallest of the four binomials; margin = lhs - rhs.
inline BoundCheck lemma61_check(int n, double c) {
    if (n < 4) throw std::domain_error("lemma61_check: n must be >= 4");
    const double root = std::sqrt(static_cast<double>(n));
    if (!(c >= 1.0 && c <= root / 6.0))
        throw std::domain_error("lemma61_check: c must lie in [1, sqrt(n)/6]");
    BoundCheck b;
    b.name = "lemma61";
    b.params = {{"n", n}, {"c", c}};
    const double up = 0.5 * n + c * root;
    const double down = 0.5 * n - c * root;
    long double lhs = std::numeric_limits<long double>::infinity();
    for (double x : {std::floor(up), std::ceil(up), std::floor(down), std::ceil(down)}) {
        const auto k = static_cast<std::int64_t>(x);
        lhs = std::min(lhs, log_binomial_ld(n, k));
    }
    const long double rhs = -6.0L * c * c - 2.0L + static_cast<long double>(n) * std::log(2.0L) -
                            0.5L * std::log(2.0L * std::numbers::pi_v<long double> * n);
    b.lhs = static_cast<double>(lhs);
    b.rhs = static_cast<double>(rhs);
    b.holds = lhs > rhs;
    b.margin = static_cast<double>(lhs - rhs);
    return b;
}

/// Grid {1, 1.25, 1.5, ...} up to sqrt(n)/6. Empty when n < 36.
inline std::vector<double> lemma61_c_grid(int n) {
    std::vector<double> grid;
    const double hi = std::sqrt(static_cast<double>(n)) / 6.0;
    for (int i = 0;; ++i) {
        const double c = 1.0 + 0.25 * i;
        if (c > hi) break;
        grid.push_back(c);
    }
    return grid;
}

/// sqrt(n/|k1-k2|) + sqrt(kappa(n-kappa))/|k1-k2| with kappa in {k1,k2} farthest from n/2 (ties: k1).
inline double nayakwu_degree_bound(int n, int k1, int k2) {
    if (k1 == k2) throw std::domain_error("nayakwu_degree_bound: k1 == k2");
    if (k1 < 0 || k2 < 0 || k1 > n || k2 > n) throw std::domain_error("nayakwu_degree_bound: weights outside [0,n]");
    const double gap = std::abs(static_cast<double>(k1) - k2);
    const double half = 0.5 * n;
    const int kappa = std::abs(half - k1) >= std::abs(half - k2) ? k1 : k2;
    return std::sqrt(n / gap) + std::sqrt(static_cast<double>(kappa) * (n - kappa)) / gap;
}

enum class FloorShape { MinRootNInverseT, InverseT };

inline std::string floor_shape_name(FloorShape s) {
    return s == FloorShape::MinRootNInverseT ? "min-root-n-inverse-T" : "inverse-T";
}

/// T^{-1} is read as 1/max(T,1): zero-query algorithms face a constant floor.
inline double floor_value(FloorShape shape, int n, std::int64_t T) {
    const double inv_t = 1.0 / static_cast<double>(std::max<std::int64_t>(T, 1));
    if (shape == FloorShape::MinRootNInverseT) {
        if (T == 0) return 1.0 / std::sqrt(static_cast<double>(n));
        return std::min(1.0 / std::sqrt(static_cast<double>(n)), inv_t);
    }
    return inv_t;
}

/// Floor matching the criterion: min(n^{-1/2}, 1/T) for average-probabilistic error under the
/// uniform input measure, 1/T otherwise.
inline FloorShape default_floor(Criterion c, const SymmetricMeasure* mu) {
    if (c == Criterion::AvgProb && mu != nullptr && mu->name() == "uniform-inputs") return FloorShape::MinRootNInverseT;
    return FloorShape::InverseT;
}

/// Estimator family; the sweep supplies the budget.
struct EstimatorFamily {
    EstimatorKind kind = EstimatorKind::Ae;
    int reps = 1;
    bool rounded = false;

    Estimator with_budget(int budget) const {
        Estimator e;
        e.kind = kind;
        e.budget = kind == EstimatorKind::Constant ? 0 : budget;
        e.reps = kind == EstimatorKind::MedianReps ? reps : 1;
        e.rounded = rounded;
        return e;
    }
};

struct SweepRow {
    std::string name;
    int n = 0;
    std::int64_t T = 0;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<std::string> measure;
    double value = 0.0;
    double floor = 0.0;
    double ratio = 0.0;
};

struct SweepConfig {
    std::vector<EstimatorFamily> estimators;
    Criterion criterion = Criterion::AvgProb;
    std::vector<int> n_grid;
    std::vector<int> budget_grid;
    double p = 8.0 / (std::numbers::pi * std::numbers::pi);
    double q = 1.0;
    std::function<SymmetricMeasure(int)> measure_for;  // empty: worst-case criteria only
    std::optional<FloorShape> floor;
    bool enforce_small_T = true;  // drop points with T > n/8
    int parallelism = 1;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int skipped = 0;
    double min_ratio = std::numeric_limits<double>::infinity();
    double max_ratio = 0.0;
};

/// Evaluates the criterion over the grid and reports value / floor for every point.
inline SweepResult floor_sweep(const SweepConfig& cfg) {
    if (cfg.estimators.empty() || cfg.n_grid.empty() || cfg.budget_grid.empty())
        throw std::domain_error("floor_sweep: grids must be nonempty");
    SweepResult res;
    for (int n : cfg.n_grid) {
        std::optional<SymmetricMeasure> measure;
        if (cfg.measure_for) measure = cfg.measure_for(n);
        const SymmetricMeasure* mu = measure ? &*measure : nullptr;
        if (is_average(cfg.criterion)) {
            if (mu == nullptr) throw std::domain_error("floor_sweep: average criterion needs a measure");
            if (mu->n() != n) throw std::domain_error("floor_sweep: measure size does not match n");
        }
        const FloorShape shape = cfg.floor.value_or(default_floor(cfg.criterion, mu));
        for (const EstimatorFamily& fam : cfg.estimators) {
            for (std::size_t b = 0; b < cfg.budget_grid.size(); ++b) {
                // the constant answer ignores the budget: one row per n
                if (fam.kind == EstimatorKind::Constant && b > 0) break;
                const Estimator est = fam.with_budget(cfg.budget_grid[b]);
                if (cfg.enforce_small_T && 8 * est.queries() > n) {
                    ++res.skipped;
                    continue;
                }
                const ErrorReport rep = evaluate_criterion(cfg.criterion, est, n, cfg.p, cfg.q, mu, cfg.parallelism);
                SweepRow row;
                row.name = est.label();
                row.n = n;
                row.T = est.queries();
                row.p = rep.p;
                row.q = rep.q;
                row.measure = rep.measure;
                row.value = rep.value;
                row.floor = floor_value(shape, n, row.T);
                row.ratio = row.value / row.floor;
                res.min_ratio = std::min(res.min_ratio, row.ratio);
                res.max_ratio = std::max(res.max_ratio, row.ratio);
                res.rows.push_back(std::move(row));
            }
        }
    }
    return res;
}

}  // namespace qmean

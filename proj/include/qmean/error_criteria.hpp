#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmean/core_numerics.hpp"
#include "qmean/estimators.hpp"
#include "qmean/measures.hpp"
#include "qmean/parallel.hpp"

namespace qmean {

/// Cumulative mass within this slack of p counts as reaching p.
inline constexpr double kQuantileSlack = 1e-12;

/// e(X,T,p): the smallest deviation gamma = |a - a_hat_j| whose cumulative probability reaches p.
/// Always one of the atom deviations since the support is finite.
inline double quantile_error(const OutcomeDistribution& d, double a, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("quantile_error: p must lie in (0,1]");
    struct Dev {
        double gap;
        double prob;
    };
    std::vector<Dev> devs;
    devs.reserve(d.atoms().size());
    for (const Atom& at : d.atoms()) devs.push_back({std::abs(a - at.estimate), at.prob});
    std::sort(devs.begin(), devs.end(), [](const Dev& x, const Dev& y) { return x.gap < y.gap; });
    CompensatedSum cum;
    for (std::size_t i = 0; i < devs.size(); ++i) {
        cum.add(devs[i].prob);
        // equal deviations are aggregated before thresholding
        if (i + 1 < devs.size() && devs[i + 1].gap == devs[i].gap) continue;
        if (cum.value() >= p - kQuantileSlack) return devs[i].gap;
    }
    return devs.back().gap;
}

/// e^ex(X,T): the L_q moment of |a - a_hat|.
inline double expected_error(const OutcomeDistribution& d, double a, double q) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw std::domain_error("expected_error: q must lie in [1,inf)");
    CompensatedSum s;
    for (const Atom& at : d.atoms()) {
        const double gap = std::abs(a - at.estimate);
        if (gap > 0.0 && at.prob > 0.0) s.add(std::pow(gap, q) * at.prob);
    }
    const double m = std::max(0.0, s.value());
    return q == 1.0 ? m : std::pow(m, 1.0 / q);
}

enum class Criterion { Quantile, WorstProb, AvgProb, ExpectedLq, WorstExpected, AvgExpected };

inline std::string criterion_name(Criterion c) {
    switch (c) {
        case Criterion::Quantile: return "quantile";
        case Criterion::WorstProb: return "worst-prob";
        case Criterion::AvgProb: return "avg-prob";
        case Criterion::ExpectedLq: return "expected-Lq";
        case Criterion::WorstExpected: return "worst-expected";
        case Criterion::AvgExpected: return "avg-expected";
    }
    return "?";
}

inline Criterion parse_criterion(const std::string& s) {
    for (Criterion c : {Criterion::Quantile, Criterion::WorstProb, Criterion::AvgProb, Criterion::ExpectedLq,
                        Criterion::WorstExpected, Criterion::AvgExpected}) {
        if (criterion_name(c) == s) return c;
    }
    throw std::domain_error("unknown criterion '" + s + "'");
}

inline bool is_average(Criterion c) { return c == Criterion::AvgProb || c == Criterion::AvgExpected; }
inline bool is_probabilistic(Criterion c) {
    return c == Criterion::Quantile || c == Criterion::WorstProb || c == Criterion::AvgProb;
}

/// One evaluated error criterion. count_scaled marks the approximate-count form (value times n).
struct ErrorReport {
    Criterion criterion = Criterion::WorstProb;
    bool count_scaled = false;
    std::string estimator;
    int n = 0;
    std::int64_t T = 0;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<std::string> measure;
    double value = 0.0;

    std::string tag() const {
        return count_scaled ? "count-" + criterion_name(criterion) : criterion_name(criterion);
    }
};

namespace detail {

inline void require_majority_p(double p) {
    if (!(p > 0.5 && p <= 1.0)) throw std::domain_error("error criterion: p must lie in (1/2,1]");
}

inline void require_q(double q) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw std::domain_error("error criterion: q must lie in [1,inf)");
}

/// Per-class criterion values for k = 0..n, in k order.
template <class PerClass>
std::vector<double> per_class_values(const Estimator& est, int n, PerClass&& f, int parallelism) {
    if (n < 1) throw std::domain_error("error criterion: n must be positive");
    return parallel_map(static_cast<std::size_t>(n) + 1, parallelism, [&](std::size_t k) {
        const WeightClass w(n, static_cast<int>(k));
        return f(est.distribution(w), mean(w));
    });
}

inline double weighted_mean(const std::vector<double>& values, const SymmetricMeasure& mu) {
    CompensatedSum s;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double w = mu.class_prob(static_cast<int>(k));
        if (w > 0.0) s.add(w * values[k]);
    }
    return s.value();
}

inline double max_value(const std::vector<double>& values) { return *std::max_element(values.begin(), values.end()); }

}  // namespace detail

inline std::vector<double> class_quantile_errors(const Estimator& est, int n, double p, int parallelism = 1) {
    return detail::per_class_values(
        est, n, [p](const OutcomeDistribution& d, double a) { return quantile_error(d, a, p); }, parallelism);
}

inline std::vector<double> class_expected_errors(const Estimator& est, int n, double q, int parallelism = 1) {
    return detail::per_class_values(
        est, n, [q](const OutcomeDistribution& d, double a) { return expected_error(d, a, q); }, parallelism);
}

inline ErrorReport worst_prob_error(const Estimator& est, int n, double p, int parallelism = 1) {
    detail::require_majority_p(p);
    ErrorReport r{Criterion::WorstProb, false, est.label(), n, est.queries(), p, std::nullopt, std::nullopt, 0.0};
    r.value = detail::max_value(class_quantile_errors(est, n, p, parallelism));
    return r;
}

inline ErrorReport avg_prob_error(const Estimator& est, int n, double p, const SymmetricMeasure& mu,
                                  int parallelism = 1) {
    detail::require_majority_p(p);
    if (mu.n() != n) throw std::domain_error("avg_prob_error: measure is for n=" + std::to_string(mu.n()));
    ErrorReport r{Criterion::AvgProb, false, est.label(), n, est.queries(), p, std::nullopt, mu.name(), 0.0};
    r.value = detail::weighted_mean(class_quantile_errors(est, n, p, parallelism), mu);
    return r;
}

inline ErrorReport worst_expected_error(const Estimator& est, int n, double q, int parallelism = 1) {
    detail::require_q(q);
    ErrorReport r{Criterion::WorstExpected, false, est.label(), n, est.queries(), std::nullopt, q, std::nullopt, 0.0};
    r.value = detail::max_value(class_expected_errors(est, n, q, parallelism));
    return r;
}

inline ErrorReport avg_expected_error(const Estimator& est, int n, double q, const SymmetricMeasure& mu,
                                      int parallelism = 1) {
    detail::require_q(q);
    if (mu.n() != n) throw std::domain_error("avg_expected_error: measure is for n=" + std::to_string(mu.n()));
    ErrorReport r{Criterion::AvgExpected, false, est.label(), n, est.queries(), std::nullopt, q, mu.name(), 0.0};
    r.value = detail::weighted_mean(class_expected_errors(est, n, q, parallelism), mu);
    return r;
}

/// Dispatch on a criterion tag. mu is required for the average forms.
inline ErrorReport evaluate_criterion(Criterion c, const Estimator& est, int n, double p, double q,
                                      const SymmetricMeasure* mu, int parallelism = 1) {
    if (is_average(c) && mu == nullptr) throw std::domain_error("criterion " + criterion_name(c) + " needs a measure");
    switch (c) {
        case Criterion::WorstProb: return worst_prob_error(est, n, p, parallelism);
        case Criterion::AvgProb: return avg_prob_error(est, n, p, *mu, parallelism);
        case Criterion::WorstExpected: return worst_expected_error(est, n, q, parallelism);
        case Criterion::AvgExpected: return avg_expected_error(est, n, q, *mu, parallelism);
        default: throw std::domain_error("criterion " + criterion_name(c) + " is per-input, not a table criterion");
    }
}

/// Delta-approximate count form: value times n.
inline ErrorReport count_scaled(const ErrorReport& r) {
    if (r.count_scaled) throw std::domain_error("count_scaled: report is already count-scaled");
    ErrorReport s = r;
    s.count_scaled = true;
    s.value = static_cast<double>(r.n) * r.value;
    return s;
}

struct MarkovConversion {
    double delta = 0.0;
    double p = 0.0;
};

/// Expected-to-probabilistic conversion: accuracy delta = a eps holds with probability p = 1 - a^-q.
inline MarkovConversion markov_quantile_bound(double eps, double q, double a) {
    if (!(a > 2.0)) throw std::domain_error("markov_quantile_bound: a must exceed 2");
    if (!(q >= 1.0)) throw std::domain_error("markov_quantile_bound: q must be >= 1");
    if (!(eps >= 0.0)) throw std::domain_error("markov_quantile_bound: eps must be >= 0");
    return {a * eps, 1.0 - std::pow(a, -q)};
}

}  // namespace qmean

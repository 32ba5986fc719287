#pragma once

// Numbered verification runs shared by `qmean check` and the acceptance binary.
// Each run returns a verdict plus CSV and JSON artifacts; artifacts never contain timings,
// so repeated runs can be compared byte for byte.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qmean/bounds_lab.hpp"
#include "qmean/error_criteria.hpp"
#include "qmean/estimators.hpp"
#include "qmean/measures.hpp"
#include "qmean/parallel.hpp"
#include "qmean/poly_method.hpp"
#include "qmean/report_io.hpp"

namespace qmean::checks {

struct CheckReport {
    std::string name;
    bool passed = false;
    std::string summary;
    std::string csv;
    std::string json;
};

// Recorded constants. Measured once from the exact runs, then frozen with margin.
inline constexpr double kFloorBandMax = 100.0;     // max ratio / min ratio in the uniform-inputs sweep
inline constexpr double kFloorC0UniformInputs = 0.3;
inline constexpr double kFloorC0UniformMeans = 0.2;
inline constexpr double kMedianShapeC = 2.0;       // sup over M of M * worst expected error
inline constexpr double kDegreeBeta = 0.03;        // LP degree >= beta * analytic bound

inline const double kDefaultP = 8.0 / (std::numbers::pi * std::numbers::pi);

namespace detail {

inline std::string csv_line(std::initializer_list<std::string> cells) {
    std::string s;
    for (const auto& c : cells) {
        if (!s.empty()) s += ',';
        s += c;
    }
    return s + "\n";
}

inline std::string str(std::int64_t v) { return std::to_string(v); }
inline std::string yes(bool b) { return b ? "true" : "false"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// 1. constant-answer error asymptotic

inline BoundCheck const_alg_band(int n, double lo = 0.95, double hi = 1.05) {
    const auto e = const_alg_error_exact(n);
    BoundCheck b;
    b.name = "const-alg";
    b.params = {{"n", n}, {"value", e.value}};
    b.lhs = e.ratio;
    b.rhs = 1.0;
    b.holds = e.ratio >= lo && e.ratio <= hi;
    b.margin = std::min(e.ratio - lo, hi - e.ratio);
    return b;
}

/// |ratio(n_large) - 1| < |ratio(n_small) - 1|.
inline BoundCheck const_alg_trend(int n_small, int n_large) {
    BoundCheck b;
    b.name = "const-alg-trend";
    b.params = {{"n_small", n_small}, {"n_large", n_large}};
    b.lhs = std::abs(const_alg_error_exact(n_large).ratio - 1.0);
    b.rhs = std::abs(const_alg_error_exact(n_small).ratio - 1.0);
    b.holds = b.lhs < b.rhs;
    b.margin = b.rhs - b.lhs;
    return b;
}

inline CheckReport const_alg(const std::vector<int>& band_ns = {4096}, bool with_trend = true) {
    std::vector<BoundCheck> rows;
    for (int n : band_ns) rows.push_back(const_alg_band(n));
    if (with_trend) rows.push_back(const_alg_trend(1024, 16384));
    CheckReport r{"const-alg", true, "", io::bound_checks_csv(rows), io::bound_checks_json(rows)};
    std::ostringstream s;
    for (const auto& b : rows) {
        r.passed = r.passed && b.holds;
        s << b.name << (b.name == "const-alg" ? " n=" + std::to_string(static_cast<int>(b.params[0].second)) : "")
          << " lhs=" << io::fmt(b.lhs) << " rhs=" << io::fmt(b.rhs) << (b.holds ? " ok" : " FAIL") << "; ";
    }
    r.summary = s.str();
    return r;
}

// ---------------------------------------------------------------------------
// 2. central binomial lemma over the full c grid

inline CheckReport lemma61(int n_min = 4, int n_max = 2000, int parallelism = 1) {
    if (n_min < 4 || n_max < n_min) throw std::domain_error("lemma61: need 4 <= n_min <= n_max");
    struct PerN {
        int cases = 0;
        int failures = 0;
        BoundCheck tightest;
    };
    const auto per_n = parallel_map(static_cast<std::size_t>(n_max - n_min + 1), parallelism, [&](std::size_t i) {
        const int n = n_min + static_cast<int>(i);
        PerN out;
        out.tightest.margin = std::numeric_limits<double>::infinity();
        for (double c : lemma61_c_grid(n)) {
            const BoundCheck b = lemma61_check(n, c);
            ++out.cases;
            if (!b.holds) ++out.failures;
            if (b.margin < out.tightest.margin) out.tightest = b;
        }
        return out;
    });
    CheckReport r{"lemma61", true, "", "", ""};
    std::vector<BoundCheck> rows;
    std::string csv = "n,cases,failures,c,lhs,rhs,margin\n";
    int cases = 0, failures = 0, empty = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < per_n.size(); ++i) {
        const int n = n_min + static_cast<int>(i);
        const PerN& p = per_n[i];
        cases += p.cases;
        failures += p.failures;
        if (p.cases == 0) {
            ++empty;
            continue;
        }
        min_margin = std::min(min_margin, p.tightest.margin);
        double c = 0.0;
        for (const auto& [k, v] : p.tightest.params)
            if (k == "c") c = v;
        csv += detail::csv_line({detail::str(n), detail::str(p.cases), detail::str(p.failures), io::fmt(c),
                                 io::fmt(p.tightest.lhs), io::fmt(p.tightest.rhs), io::fmt(p.tightest.margin)});
        rows.push_back(p.tightest);
    }
    r.passed = failures == 0;
    r.csv = std::move(csv);
    r.json = io::bound_checks_json(rows);
    r.summary = std::to_string(cases) + " cases, " + std::to_string(failures) + " failures, " + std::to_string(empty) +
                " n with empty c grid, min log margin " + io::fmt(min_margin);
    return r;
}

// ---------------------------------------------------------------------------
// 3. closed-form outcome law against the unitary simulation

inline CheckReport ae_exact(int n_max = 32, const std::vector<int>& Ms = {2, 4, 8, 16, 32, 64}, int parallelism = 1) {
    if (n_max < 2 || Ms.empty()) throw std::domain_error("ae-exact: need n_max >= 2 and a nonempty M grid");
    struct Cell {
        int n, M;
        double max_tv = 0.0, max_mass_dev = 0.0;
    };
    std::vector<std::pair<int, int>> grid;
    for (int n = 2; n <= n_max; ++n)
        for (int M : Ms) grid.emplace_back(n, M);
    const auto cells = parallel_map(grid.size(), parallelism, [&](std::size_t i) {
        Cell c{grid[i].first, grid[i].second};
        for (int k = 0; k <= c.n; ++k) {
            const WeightClass w(c.n, k);
            const auto closed = ae_distribution(w, c.M);
            const auto unitary = ae_unitary_oracle(w, c.M);
            c.max_tv = std::max(c.max_tv, total_variation(closed, unitary));
            c.max_mass_dev = std::max({c.max_mass_dev, std::abs(closed.total_mass() - 1.0),
                                       std::abs(unitary.total_mass() - 1.0)});
        }
        return c;
    });
    CheckReport r{"ae-exact", true, "", "n,M,max_tv,max_mass_dev\n", ""};
    io::Json arr = io::Json::array();
    double tv = 0.0, mass = 0.0;
    for (const Cell& c : cells) {
        tv = std::max(tv, c.max_tv);
        mass = std::max(mass, c.max_mass_dev);
        r.csv += detail::csv_line({detail::str(c.n), detail::str(c.M), io::fmt(c.max_tv), io::fmt(c.max_mass_dev)});
        arr.push_back({{"n", c.n}, {"M", c.M}, {"max_tv", io::round12(c.max_tv)},
                       {"max_mass_dev", io::round12(c.max_mass_dev)}});
    }
    r.json = arr.dump(2) + "\n";
    r.passed = tv <= 1e-8 && mass <= 1e-9;
    r.summary = std::to_string(cells.size()) + " (n,M) cells, max TV " + io::fmt(tv) + ", max mass deviation " +
                io::fmt(mass);
    return r;
}

// ---------------------------------------------------------------------------
// 4. zero worst-case error once M exceeds (3/2) pi n

inline CheckReport zero_error(int n = 16, int M = 76, double p = kDefaultP, int parallelism = 1) {
    const ErrorReport rounded = worst_prob_error(Estimator::ae(M, true), n, p, parallelism);
    const ErrorReport raw = worst_prob_error(Estimator::ae(M), n, p, parallelism);
    const std::vector<ErrorReport> rows = {rounded, raw};
    CheckReport r{"zero-error", rounded.value == 0.0, "", io::error_reports_csv(rows), io::error_reports_json(rows)};
    r.summary = "rounded estimate: worst error " + io::fmt(rounded.value) + "; raw sin^2 estimate: " + io::fmt(raw.value);
    return r;
}

// ---------------------------------------------------------------------------
// 5/6. lower-bound floors

inline std::vector<EstimatorFamily> floor_families() {
    return {{EstimatorKind::Ae},
            {EstimatorKind::MedianReps, 2},
            {EstimatorKind::MedianReps, 4},
            {EstimatorKind::Constant},
            {EstimatorKind::Bernoulli}};
}

inline std::vector<int> powers_of_two(int lo, int hi) {
    std::vector<int> v;
    for (int x = lo; x <= hi; x *= 2) v.push_back(x);
    return v;
}

inline CheckReport floors(bool uniform_inputs_measure, int n = 4096, std::vector<int> Ms = powers_of_two(8, 512),
                          int parallelism = 1) {
    SweepConfig cfg;
    cfg.estimators = floor_families();
    cfg.criterion = Criterion::AvgProb;
    cfg.n_grid = {n};
    cfg.budget_grid = std::move(Ms);
    cfg.p = kDefaultP;
    if (uniform_inputs_measure) {
        cfg.measure_for = uniform_inputs;
        cfg.floor = FloorShape::MinRootNInverseT;
    } else {
        cfg.measure_for = uniform_means;
        cfg.floor = FloorShape::InverseT;
    }
    cfg.parallelism = parallelism;
    const SweepResult res = floor_sweep(cfg);
    const double c0 = uniform_inputs_measure ? kFloorC0UniformInputs : kFloorC0UniformMeans;
    const double band = res.max_ratio / res.min_ratio;
    CheckReport r{uniform_inputs_measure ? "floors-uniform-inputs" : "floors-uniform-means", true, "",
                  io::sweep_csv(res.rows), io::sweep_json(res.rows)};
    r.passed = res.min_ratio >= c0 && res.min_ratio > 0.0;
    if (uniform_inputs_measure) r.passed = r.passed && band <= kFloorBandMax;
    r.summary = std::to_string(res.rows.size()) + " points (" + std::to_string(res.skipped) +
                " skipped with T > n/8), min ratio " + io::fmt(res.min_ratio) + " (c0 " + io::fmt(c0) +
                "), max ratio " + io::fmt(res.max_ratio) + ", band " + io::fmt(band);
    return r;
}

// ---------------------------------------------------------------------------
// 7. expected-to-probabilistic conversion

inline CheckReport markov(int count = 200, std::uint64_t seed = 20240601) {
    std::mt19937_64 rng(seed);
    auto pick = [&rng](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    CheckReport r{"markov", true, "", "index,estimator,n,k,T,a,q,quantile,bound,holds\n", ""};
    io::Json arr = io::Json::array();
    int violations = 0, total = 0;
    for (int i = 0; i < count; ++i) {
        const int n = pick(2, 64);
        const int k = pick(0, n);
        const int M = pick(2, 64);
        Estimator est;
        switch (pick(0, 4)) {
            case 0: est = Estimator::ae(M); break;
            case 1: est = Estimator::median_reps(M, pick(2, 5)); break;
            case 2: est = Estimator::ae(M, true); break;
            case 3: est = Estimator::bernoulli(M); break;
            default: est = Estimator::median_reps(M, pick(2, 5), true); break;
        }
        const WeightClass w(n, k);
        const OutcomeDistribution d = est.distribution(w);
        for (double a : {2.5, 3.0, 4.0}) {
            for (double q : {1.0, 2.0}) {
                const double eps = expected_error(d, mean(w), q);
                const MarkovConversion conv = markov_quantile_bound(eps, q, a);
                const double quant = quantile_error(d, mean(w), conv.p);
                const bool holds = quant <= conv.delta;
                ++total;
                if (!holds) ++violations;
                r.csv += detail::csv_line({detail::str(i), est.label(), detail::str(n), detail::str(k),
                                           detail::str(est.queries()), io::fmt(a), io::fmt(q), io::fmt(quant),
                                           io::fmt(conv.delta), detail::yes(holds)});
                arr.push_back({{"index", i}, {"estimator", est.label()}, {"n", n}, {"k", k}, {"T", est.queries()},
                               {"a", a}, {"q", q}, {"quantile", io::round12(quant)},
                               {"bound", io::round12(conv.delta)}, {"holds", holds}});
            }
        }
    }
    r.json = arr.dump(2) + "\n";
    r.passed = violations == 0;
    r.summary = std::to_string(count) + " distributions, " + std::to_string(total) + " comparisons, " +
                std::to_string(violations) + " violations";
    return r;
}

// ---------------------------------------------------------------------------
// 8. median of repetitions: worst expected error times M stays bounded

inline CheckReport median_shape(int n = 256, int r_reps = 4, const std::vector<int>& Ms = {8, 16, 32, 64, 128},
                                int parallelism = 1) {
    std::vector<SweepRow> rows;
    double sup = 0.0;
    for (int M : Ms) {
        const Estimator est = Estimator::median_reps(M, r_reps);
        const ErrorReport rep = worst_expected_error(est, n, 1.0, parallelism);
        SweepRow row;
        row.name = est.label();
        row.n = n;
        row.T = est.queries();
        row.q = 1.0;
        row.value = rep.value;
        row.floor = 1.0 / M;
        row.ratio = rep.value * M;
        sup = std::max(sup, row.ratio);
        rows.push_back(std::move(row));
    }
    CheckReport r{"median-shape", sup <= kMedianShapeC, "", io::sweep_csv(rows), io::sweep_json(rows)};
    r.summary = "max over M of M * error = " + io::fmt(sup) + " (C " + io::fmt(kMedianShapeC) + ")";
    return r;
}

// ---------------------------------------------------------------------------
// 9. acceptance probabilities have degree at most 2T

inline std::vector<Estimator> degree_law_estimators(int M) {
    return {Estimator::ae(M), Estimator::ae_oracle(M), Estimator::ae(M, true), Estimator::median_reps(M, 2),
            Estimator::median_reps(M, 3), Estimator::bernoulli(M)};
}

inline CheckReport degree_law(int n_max = 12, int M_max = 8, double tol = kDefaultDegreeTolerance, int parallelism = 1) {
    struct Cell {
        std::string label;
        int n = 0, M = 0;
        std::int64_t T = 0;
        int instances = 0, max_degree = 0, violations = 0;
    };
    std::vector<std::tuple<int, int, std::size_t>> grid;
    for (int n = 2; n <= n_max; ++n)
        for (int M = 2; M <= M_max; ++M)
            for (std::size_t e = 0; e < degree_law_estimators(M).size(); ++e) grid.emplace_back(n, M, e);
    const auto cells = parallel_map(grid.size(), parallelism, [&](std::size_t i) {
        const auto [n, M, e] = grid[i];
        const Estimator est = degree_law_estimators(M)[e];
        Cell c{est.label(), n, M, est.queries()};
        for (int k1 = 1; k1 <= n; ++k1) {
            for (int k2 = 0; k2 < k1; ++k2) {
                const double gap = k1 - k2;
                for (double threshold : {0.5, gap / 2.0, gap}) {
                    const auto acc = acceptance_poly_of_distinguisher(est, PartialFnSpec(n, k1, k2), threshold, tol);
                    ++c.instances;
                    c.max_degree = std::max(c.max_degree, acc.poly.min_degree);
                    if (!acc.within_budget()) ++c.violations;
                }
            }
        }
        return c;
    });
    CheckReport r{"degree-law", true, "", "estimator,n,M,T,instances,max_degree,budget,violations\n", ""};
    io::Json arr = io::Json::array();
    int instances = 0, violations = 0;
    for (const Cell& c : cells) {
        instances += c.instances;
        violations += c.violations;
        r.csv += detail::csv_line({c.label, detail::str(c.n), detail::str(c.M), detail::str(c.T),
                                   detail::str(c.instances), detail::str(c.max_degree), detail::str(2 * c.T),
                                   detail::str(c.violations)});
        arr.push_back({{"estimator", c.label}, {"n", c.n}, {"M", c.M}, {"T", c.T}, {"instances", c.instances},
                       {"max_degree", c.max_degree}, {"budget", 2 * c.T}, {"violations", c.violations}});
    }
    r.json = arr.dump(2) + "\n";
    r.passed = violations == 0;
    r.summary = std::to_string(instances) + " instances, " + std::to_string(violations) + " violations";
    return r;
}

// ---------------------------------------------------------------------------
// 10. LP degree oracle: monotonicity and a fitted constant against the analytic bound

inline bool balanced(int n, int k) { return 8.0 * k * (n - k) >= static_cast<double>(n) * n; }

inline CheckReport degree_oracle(const std::vector<int>& ns = {20, 40}, double c = 0.49,
                                 const std::vector<double>& c_grid = {0.0, 0.1, 0.25, 0.4, 0.49},
                                 int c_grid_n = 20, int parallelism = 1) {
    struct Pair {
        int n, k1, k2;
    };
    std::vector<Pair> pairs;
    for (int n : ns)
        for (int k1 = 0; k1 <= n; ++k1)
            for (int k2 = 0; k2 < k1; ++k2)
                if (balanced(n, k1) && balanced(n, k2)) pairs.push_back({n, k1, k2});
    const auto witnesses = parallel_map(pairs.size(), parallelism, [&](std::size_t i) {
        return min_degree_lp(PartialFnSpec(pairs[i].n, pairs[i].k1, pairs[i].k2), c);
    });

    CheckReport r{"degree-oracle", true, "", "n,k1,k2,c,degree,bound,ratio\n", ""};
    io::Json arr = io::Json::array();
    double beta = std::numeric_limits<double>::infinity();
    int gap_violations = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& w = witnesses[i];
        const double bound = nayakwu_degree_bound(w.n, w.k1, w.k2);
        const double ratio = w.degree / bound;
        beta = std::min(beta, ratio);
        r.csv += detail::csv_line({detail::str(w.n), detail::str(w.k1), detail::str(w.k2), io::fmt(w.c),
                                   detail::str(w.degree), io::fmt(bound), io::fmt(ratio)});
        io::Json j = io::to_json(w);
        j["bound"] = io::round12(bound);
        arr.push_back(std::move(j));
        // shrinking the gap (k1 -> k1 - 1 at fixed k2) never lowers the degree
        for (std::size_t t = 0; t < pairs.size(); ++t) {
            if (pairs[t].n == w.n && pairs[t].k2 == w.k2 && pairs[t].k1 == w.k1 - 1 &&
                witnesses[t].degree < w.degree)
                ++gap_violations;
        }
    }

    // nonincreasing in c, on every balanced pair at one n
    std::vector<Pair> c_pairs;
    for (const Pair& p : pairs)
        if (p.n == c_grid_n) c_pairs.push_back(p);
    const auto c_rows = parallel_map(c_pairs.size(), parallelism, [&](std::size_t i) {
        std::vector<int> d;
        for (double cc : c_grid) d.push_back(min_degree_lp(PartialFnSpec(c_pairs[i].n, c_pairs[i].k1, c_pairs[i].k2), cc).degree);
        return d;
    });
    int c_violations = 0;
    for (const auto& d : c_rows)
        for (std::size_t j = 1; j < d.size(); ++j)
            if (d[j] > d[j - 1]) ++c_violations;

    r.json = arr.dump(2) + "\n";
    r.passed = gap_violations == 0 && c_violations == 0 && beta > 0.0 && beta >= kDegreeBeta;
    r.summary = std::to_string(pairs.size()) + " pairs, fitted beta " + io::fmt(beta) + " (recorded " +
                io::fmt(kDegreeBeta) + "), gap-monotonicity violations " + std::to_string(gap_violations) +
                ", c-monotonicity violations " + std::to_string(c_violations) + " over " +
                std::to_string(c_pairs.size()) + " pairs";
    return r;
}

// ---------------------------------------------------------------------------
// 11. distinguisher failure probabilities

inline CheckReport distinguisher_bound(int n = 16, int M = 32, double p = 0.81, int min_gap = 4) {
    const Estimator est = Estimator::ae(M);
    const auto errs = class_quantile_errors(est, n, p);
    const double e_max = *std::max_element(errs.begin(), errs.end());
    // the reduction needs each class's error strictly below the threshold
    const double threshold = std::nextafter(static_cast<double>(n) * e_max, std::numeric_limits<double>::infinity());
    const double limit = 1.0 - p + 1e-12;
    CheckReport r{"distinguisher", true, "", "k1,k2,threshold,accept1,accept2,fail1,fail2,holds\n", ""};
    io::Json arr = io::Json::array();
    int pairs = 0, failures = 0;
    double worst = 0.0;
    for (int k1 = 0; k1 <= n; ++k1) {
        for (int k2 = 0; k1 - k2 >= min_gap; ++k2) {
            const auto o = distinguisher(est.distribution(WeightClass(n, k1)), est.distribution(WeightClass(n, k2)),
                                         PartialFnSpec(n, k1, k2), threshold);
            const bool holds = o.fail1 <= limit && o.fail2 <= limit;
            ++pairs;
            if (!holds) ++failures;
            worst = std::max({worst, o.fail1, o.fail2});
            r.csv += detail::csv_line({detail::str(k1), detail::str(k2), io::fmt(threshold), io::fmt(o.accept1),
                                       io::fmt(o.accept2), io::fmt(o.fail1), io::fmt(o.fail2), detail::yes(holds)});
            arr.push_back({{"k1", k1}, {"k2", k2}, {"threshold", io::round12(threshold)},
                           {"accept1", io::round12(o.accept1)}, {"accept2", io::round12(o.accept2)},
                           {"fail1", io::round12(o.fail1)}, {"fail2", io::round12(o.fail2)}, {"holds", holds}});
        }
    }
    r.json = arr.dump(2) + "\n";
    r.passed = failures == 0;
    r.summary = std::to_string(pairs) + " pairs, threshold " + io::fmt(threshold) + " (n * max error " +
                io::fmt(n * e_max) + "), worst failure " + io::fmt(worst) + ", " + std::to_string(failures) +
                " above " + io::fmt(1.0 - p);
    return r;
}

}  // namespace qmean::checks

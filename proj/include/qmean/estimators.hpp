#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmean/core_numerics.hpp"

namespace qmean {

struct Atom {
    double estimate = 0.0;
    double prob = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite output law of a mean estimator on one weight class at a fixed query budget.
/// Atoms are sorted by estimate with near-equal estimates merged.
class OutcomeDistribution {
  public:
    static constexpr double kMergeTolerance = 1e-12;
    static constexpr double kMassTolerance = 1e-9;
    // Atoms lighter than this are rounding residue of exact zeros (e.g. sin^2(j pi) ~ 1e-32) and are dropped.
    static constexpr double kNegligibleMass = 1e-20;

    OutcomeDistribution(WeightClass input, std::int64_t queries, std::vector<Atom> atoms)
        : input_(input), queries_(queries), atoms_(std::move(atoms)) {
        if (queries_ < 0) throw std::domain_error("OutcomeDistribution: negative query count");
        if (atoms_.empty()) throw std::domain_error("OutcomeDistribution: no atoms");
        for (const Atom& a : atoms_) {
            if (!(a.estimate >= 0.0 && a.estimate <= 1.0))
                throw std::domain_error("OutcomeDistribution: estimate outside [0,1]");
            if (!(a.prob >= 0.0)) throw std::domain_error("OutcomeDistribution: negative probability");
        }
        std::stable_sort(atoms_.begin(), atoms_.end(),
                         [](const Atom& x, const Atom& y) { return x.estimate < y.estimate; });
        std::vector<Atom> merged;
        merged.reserve(atoms_.size());
        for (const Atom& a : atoms_) {
            if (!merged.empty() && a.estimate - merged.back().estimate <= kMergeTolerance) {
                merged.back().prob += a.prob;
            } else {
                merged.push_back(a);
            }
        }
        std::erase_if(merged, [](const Atom& a) { return a.prob < kNegligibleMass; });
        if (merged.empty()) throw std::domain_error("OutcomeDistribution: no atom carries mass");
        atoms_ = std::move(merged);
        if (std::abs(total_mass() - 1.0) > kMassTolerance)
            throw std::domain_error("OutcomeDistribution: total mass " + std::to_string(total_mass()) + " is not 1");
    }

    const WeightClass& input() const { return input_; }
    std::int64_t queries() const { return queries_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double true_mean() const { return mean(input_); }

    double total_mass() const {
        CompensatedSum s;
        for (const Atom& a : atoms_) s.add(a.prob);
        return s.value();
    }

  private:
    WeightClass input_;
    std::int64_t queries_;
    std::vector<Atom> atoms_;
};

/// Total-variation distance between two outcome laws, matching atoms by estimate.
inline double total_variation(const OutcomeDistribution& x, const OutcomeDistribution& y) {
    const auto& a = x.atoms();
    const auto& b = y.atoms();
    std::size_t i = 0, j = 0;
    CompensatedSum s;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].estimate < b[j].estimate - OutcomeDistribution::kMergeTolerance)) {
            s.add(a[i++].prob);
        } else if (i == a.size() || b[j].estimate < a[i].estimate - OutcomeDistribution::kMergeTolerance) {
            s.add(b[j++].prob);
        } else {
            s.add(std::abs(a[i++].prob - b[j++].prob));
        }
    }
    return 0.5 * s.value();
}

namespace detail {

/// Fejer-type kernel sin^2(M pi x) / (M^2 sin^2(pi x)), periodic with period 1, F(integer) = 1.
inline double fejer_kernel(int M, double x) {
    double r = x - std::floor(x);
    if (r > 0.5) r -= 1.0;
    if (r == 0.0) return 1.0;
    const double s = std::sin(std::numbers::pi * r);
    const double num = std::sin(static_cast<double>(M) * std::numbers::pi * r);
    const double v = num / (static_cast<double>(M) * s);
    return v * v;
}

/// Eigenphase omega = arcsin(sqrt(a))/pi in [0, 1/2].
inline double eigenphase(const WeightClass& w) {
    if (w.k == 0) return 0.0;
    if (w.k == w.n) return 0.5;
    return std::asin(std::sqrt(mean(w))) / std::numbers::pi;
}

/// Phase-estimation estimate sin^2(pi j / M). Uses min(j, M-j) so mirrored outcomes agree bit for bit.
inline double grid_estimate(int j, int M) {
    const int jj = std::min(j, M - j);
    if (2 * jj == M) return 1.0;
    const double s = std::sin(std::numbers::pi * static_cast<double>(jj) / static_cast<double>(M));
    return s * s;
}

}  // namespace detail

/// Closed-form amplitude-estimation (QS) outcome law with an M-outcome counter. Queries recorded as M.
inline OutcomeDistribution ae_distribution(const WeightClass& w, int M) {
    if (M < 2) throw std::domain_error("ae_distribution: M must be >= 2, got " + std::to_string(M));
    const double omega = detail::eigenphase(w);
    const bool single_phase = (w.k == 0 || w.k == w.n);
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(M);
        const double p = single_phase
                             ? detail::fejer_kernel(M, x - omega)
                             : 0.5 * (detail::fejer_kernel(M, x - omega) + detail::fejer_kernel(M, x + omega));
        atoms.push_back({detail::grid_estimate(j, M), p});
    }
    return OutcomeDistribution(w, M, std::move(atoms));
}

inline constexpr int kUnitaryOracleMaxM = 256;

/// Independent check of ae_distribution: simulates phase estimation on the 2M-dimensional
/// space (counter of size M) x (plane spanned by the good and bad components).
/// The Grover iterate is assembled from its two reflections and powered by repeated products.
inline OutcomeDistribution ae_unitary_oracle(const WeightClass& w, int M) {
    if (M < 2 || M > kUnitaryOracleMaxM)
        throw std::domain_error("ae_unitary_oracle: M must lie in [2,256], got " + std::to_string(M));
    using cplx = std::complex<double>;
    using Mat2 = std::array<std::array<double, 2>, 2>;

    const double a = mean(w);
    // Plane basis: index 0 = bad component, index 1 = good component. A|0> = (sqrt(1-a), sqrt(a)).
    const std::array<double, 2> psi{std::sqrt(1.0 - a), std::sqrt(a)};
    const Mat2 oracle_flip{{{1.0, 0.0}, {0.0, -1.0}}};
    Mat2 reflect_psi{};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) reflect_psi[r][c] = 2.0 * psi[r] * psi[c] - (r == c ? 1.0 : 0.0);
    auto mul = [](const Mat2& x, const Mat2& y) {
        Mat2 z{};
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) z[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c];
        return z;
    };
    const Mat2 grover = mul(reflect_psi, oracle_flip);

    // State after counter preparation and controlled powers: |x> (x) Q^x |psi> / sqrt(M).
    const std::size_t dim = 2 * static_cast<std::size_t>(M);
    std::vector<cplx> state(dim);
    const double amp = 1.0 / std::sqrt(static_cast<double>(M));
    Mat2 power{{{1.0, 0.0}, {0.0, 1.0}}};
    for (int x = 0; x < M; ++x) {
        for (int b = 0; b < 2; ++b) {
            state[2 * static_cast<std::size_t>(x) + static_cast<std::size_t>(b)] =
                amp * (power[b][0] * psi[0] + power[b][1] * psi[1]);
        }
        power = mul(grover, power);
    }

    // Inverse discrete Fourier transform on the counter register.
    std::vector<cplx> twiddle(static_cast<std::size_t>(M));
    for (int t = 0; t < M; ++t) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(M);
        twiddle[static_cast<std::size_t>(t)] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        cplx out0 = 0.0, out1 = 0.0;
        for (int x = 0; x < M; ++x) {
            const cplx tw = twiddle[static_cast<std::size_t>((static_cast<long>(x) * j) % M)];
            out0 += tw * state[2 * static_cast<std::size_t>(x)];
            out1 += tw * state[2 * static_cast<std::size_t>(x) + 1];
        }
        const double p = (std::norm(out0) + std::norm(out1)) / static_cast<double>(M);
        atoms.push_back({detail::grid_estimate(j, M), p});
    }
    return OutcomeDistribution(w, M, std::move(atoms));
}

/// Law of the lower median (order statistic floor(r/2)+1) of r independent draws.
inline OutcomeDistribution median_of_reps(const OutcomeDistribution& d, int r) {
    if (r < 1) throw std::domain_error("median_of_reps: r must be >= 1");
    if (r == 1) return d;
    const int m = r / 2 + 1;
    const auto& atoms = d.atoms();
    const std::size_t count = atoms.size();

    // Prefix mass F_i and suffix mass S_i = 1 - F_i, both accumulated directly.
    std::vector<double> below(count), above(count);
    CompensatedSum acc;
    for (std::size_t i = 0; i < count; ++i) {
        acc.add(atoms[i].prob);
        below[i] = acc.value();
    }
    CompensatedSum tail;
    for (std::size_t i = count; i-- > 0;) {
        above[i] = tail.value();
        tail.add(atoms[i].prob);
    }
    auto at_most = [&](std::size_t i) {
        // P(at least m of r draws <= v_i)
        CompensatedSum s;
        for (int t = m; t <= r; ++t) {
            s.add(static_cast<double>(exact_binomial(r, t)) * std::pow(below[i], t) * std::pow(above[i], r - t));
        }
        return s.value();
    };
    std::vector<Atom> out;
    out.reserve(count);
    double prev = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double cur = (i + 1 == count) ? 1.0 : at_most(i);
        out.push_back({atoms[i].estimate, std::max(0.0, cur - prev)});
        prev = cur;
    }
    return OutcomeDistribution(d.input(), d.queries() * r, std::move(out));
}

/// Zero-query algorithm that always answers 1/2.
inline OutcomeDistribution constant_half(const WeightClass& w) {
    return OutcomeDistribution(w, 0, {{0.5, 1.0}});
}

/// Classical sampling with replacement: the fraction of ones among T random queries.
inline OutcomeDistribution classical_bernoulli(const WeightClass& w, int trials) {
    if (trials < 1) throw std::domain_error("classical_bernoulli: T must be >= 1");
    const double a = mean(w);
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(trials) + 1);
    for (int i = 0; i <= trials; ++i) {
        atoms.push_back({static_cast<double>(i) / static_cast<double>(trials), binomial_pmf(trials, i, a)});
    }
    return OutcomeDistribution(w, trials, std::move(atoms));
}

/// Post-processing: round every estimate to the nearest achievable mean k/n.
inline OutcomeDistribution round_to_count(const OutcomeDistribution& d) {
    const double n = d.input().n;
    std::vector<Atom> atoms;
    atoms.reserve(d.atoms().size());
    for (const Atom& a : d.atoms()) atoms.push_back({std::floor(a.estimate * n + 0.5) / n, a.prob});
    return OutcomeDistribution(d.input(), d.queries(), std::move(atoms));
}

enum class EstimatorKind { Ae, AeOracle, MedianReps, Constant, Bernoulli };

/// A symmetric mean estimator with a fixed query budget.
struct Estimator {
    EstimatorKind kind = EstimatorKind::Ae;
    int budget = 2;  // M for the amplitude-estimation family, T for Bernoulli sampling
    int reps = 1;    // median-reps only
    bool rounded = false;

    static Estimator ae(int M, bool rounded = false) { return {EstimatorKind::Ae, M, 1, rounded}; }
    static Estimator ae_oracle(int M) { return {EstimatorKind::AeOracle, M, 1, false}; }
    static Estimator median_reps(int M, int r, bool rounded = false) { return {EstimatorKind::MedianReps, M, r, rounded}; }
    static Estimator constant() { return {EstimatorKind::Constant, 0, 1, false}; }
    static Estimator bernoulli(int T) { return {EstimatorKind::Bernoulli, T, 1, false}; }

    OutcomeDistribution distribution(const WeightClass& w) const {
        OutcomeDistribution d = [&] {
            switch (kind) {
                case EstimatorKind::Ae: return ae_distribution(w, budget);
                case EstimatorKind::AeOracle: return ae_unitary_oracle(w, budget);
                case EstimatorKind::MedianReps: return median_of_reps(ae_distribution(w, budget), reps);
                case EstimatorKind::Constant: return constant_half(w);
                case EstimatorKind::Bernoulli: return classical_bernoulli(w, budget);
            }
            throw std::logic_error("unknown estimator kind");
        }();
        return rounded ? round_to_count(d) : d;
    }

    std::int64_t queries() const {
        switch (kind) {
            case EstimatorKind::Constant: return 0;
            case EstimatorKind::MedianReps: return static_cast<std::int64_t>(budget) * reps;
            default: return budget;
        }
    }

    bool quantum() const {
        return kind == EstimatorKind::Ae || kind == EstimatorKind::AeOracle || kind == EstimatorKind::MedianReps;
    }

    std::string label() const {
        std::string s;
        switch (kind) {
            case EstimatorKind::Ae: s = "ae"; break;
            case EstimatorKind::AeOracle: s = "ae-oracle"; break;
            case EstimatorKind::MedianReps: s = "median-reps-r" + std::to_string(reps); break;
            case EstimatorKind::Constant: s = "constant"; break;
            case EstimatorKind::Bernoulli: s = "bernoulli"; break;
        }
        return rounded ? s + "-rounded" : s;
    }
};

/// The partial function that is 1 on weight k1 and 0 on weight k2 (k1 > k2).
struct PartialFnSpec {
    int n = 1;
    int k1 = 1;
    int k2 = 0;

    PartialFnSpec(int n_, int k1_, int k2_) : n(n_), k1(k1_), k2(k2_) {
        if (!(0 <= k2 && k2 < k1 && k1 <= n))
            throw std::domain_error("PartialFnSpec: require 0 <= k2 < k1 <= n");
    }
};

/// Weight-k1 count distance n |k1/n - a_hat| used by the thresholding test.
inline double count_distance(int n, int k1, double estimate) {
    return static_cast<double>(n) * std::abs(static_cast<double>(k1) / static_cast<double>(n) - estimate);
}

/// Probability that the thresholding test accepts: |k1 - n a_hat| < threshold.
inline double acceptance_probability(const OutcomeDistribution& d, int k1, double threshold) {
    CompensatedSum s;
    for (const Atom& a : d.atoms()) {
        if (count_distance(d.input().n, k1, a.estimate) < threshold) s.add(a.prob);
    }
    return s.value();
}

struct DistinguisherOutcome {
    double accept1 = 0.0;
    double accept2 = 0.0;
    double fail1 = 0.0;
    double fail2 = 0.0;
};

/// Turns a mean estimator into a test for f_{k1,k2}: output 1 iff |k1 - n a_hat| < threshold.
inline DistinguisherOutcome distinguisher(const OutcomeDistribution& dk1, const OutcomeDistribution& dk2,
                                          const PartialFnSpec& spec, double threshold) {
    if (!(threshold > 0.0)) throw std::domain_error("distinguisher: threshold must be positive");
    if (dk1.input().n != spec.n || dk2.input().n != spec.n)
        throw std::domain_error("distinguisher: distributions disagree with the partial function on n");
    if (dk1.queries() != dk2.queries()) throw std::domain_error("distinguisher: query budgets differ");
    if (dk1.input().k != spec.k1 || dk2.input().k != spec.k2)
        throw std::domain_error("distinguisher: distributions are not for classes k1, k2");
    DistinguisherOutcome r;
    r.accept1 = acceptance_probability(dk1, spec.k1, threshold);
    r.accept2 = acceptance_probability(dk2, spec.k1, threshold);
    r.fail1 = 1.0 - r.accept1;
    r.fail2 = r.accept2;
    return r;
}

}  // namespace qmean

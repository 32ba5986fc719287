#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmean/core_numerics.hpp"

namespace qmean {

/// Permutation-invariant probability measure on B_n, stored per weight class.
/// The probability of an individual string X is class_prob(|X|) / C(n,|X|).
class SymmetricMeasure {
  public:
    SymmetricMeasure(int n, std::vector<double> class_prob, std::string name = "custom")
        : n_(n), class_prob_(std::move(class_prob)), name_(std::move(name)) {
        if (n_ < 1) throw std::domain_error("SymmetricMeasure: n must be positive");
        if (class_prob_.size() != static_cast<std::size_t>(n_) + 1)
            throw std::domain_error("SymmetricMeasure: expected n+1 class weights");
        for (double p : class_prob_) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw std::domain_error("SymmetricMeasure: weights must be finite and >= 0");
        }
        const double total = compensated_sum(class_prob_);
        if (std::abs(total - 1.0) > kMassTolerance)
            throw std::domain_error("SymmetricMeasure: class weights sum to " + std::to_string(total) + ", not 1");
    }

    static constexpr double kMassTolerance = 1e-12;

    int n() const { return n_; }
    const std::string& name() const { return name_; }
    const std::vector<double>& class_probs() const { return class_prob_; }
    double class_prob(int k) const { return class_prob_.at(static_cast<std::size_t>(k)); }

    /// mu(X) for any X of weight k.
    double per_string(int k) const {
        const double p = class_prob(k);
        if (p == 0.0) return 0.0;
        return static_cast<double>(std::exp(std::log(static_cast<long double>(p)) - log_binomial_ld(n_, k)));
    }

  private:
    int n_;
    std::vector<double> class_prob_;
    std::string name_;
};

/// mu_1: every string has probability 2^-n.
inline SymmetricMeasure uniform_inputs(int n) {
    if (n < 1) throw std::domain_error("uniform_inputs: n must be positive");
    std::vector<double> w(static_cast<std::size_t>(n) + 1);
    const long double log_norm = static_cast<long double>(n) * std::log(2.0L);
    for (int k = 0; k <= n; ++k) {
        w[static_cast<std::size_t>(k)] = static_cast<double>(std::exp(log_binomial_ld(n, k) - log_norm));
    }
    // Renormalize away accumulated rounding so the mass invariant holds at 1e-12 for every n.
    const double total = compensated_sum(w);
    for (double& x : w) x /= total;
    return SymmetricMeasure(n, std::move(w), "uniform-inputs");
}

/// mu_2: every mean value k/n has probability 1/(n+1).
inline SymmetricMeasure uniform_means(int n) {
    if (n < 1) throw std::domain_error("uniform_means: n must be positive");
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 1.0 / static_cast<double>(n + 1));
    return SymmetricMeasure(n, std::move(w), "uniform-means");
}

/// Parse the plain-text measure format: first value n, then n+1 class weights.
/// '#' starts a comment. Weights within 1% of unit mass are renormalized.
inline SymmetricMeasure load_measure(std::istream& in, std::string name = "file") {
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
    }
    if (tokens.empty()) throw std::domain_error("measure file: empty");
    auto parse_double = [](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::domain_error("measure file: bad number '" + s + "'");
        }
        if (used != s.size()) throw std::domain_error("measure file: bad number '" + s + "'");
        return v;
    };
    const double nd = parse_double(tokens[0]);
    if (nd < 1 || nd != std::floor(nd) || nd > std::numeric_limits<int>::max())
        throw std::domain_error("measure file: n must be a positive integer");
    const int n = static_cast<int>(nd);
    if (tokens.size() != static_cast<std::size_t>(n) + 2)
        throw std::domain_error("measure file: expected " + std::to_string(n + 1) + " weights, found " +
                                std::to_string(tokens.size() - 1));
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(n) + 1);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const double v = parse_double(tokens[i]);
        if (!(v >= 0.0)) throw std::domain_error("measure file: negative weight");
        w.push_back(v);
    }
    const double total = compensated_sum(w);
    if (std::abs(total - 1.0) > 0.01)
        throw std::domain_error("measure file: total mass " + std::to_string(total) + " is not within 1% of 1");
    for (double& x : w) x /= total;
    return SymmetricMeasure(n, std::move(w), std::move(name));
}

inline SymmetricMeasure load_measure_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("measure file: cannot open " + path);
    return load_measure(in, path);
}

/// Consecutive weight indices {lo, ..., hi}.
struct IndexWindow {
    int n = 1;
    int lo = 0;
    int hi = 0;

    IndexWindow(int n_, int lo_, int hi_) : n(n_), lo(lo_), hi(hi_) {
        if (lo > hi) throw std::domain_error("IndexWindow: empty window");
        if (lo < 0 || hi > n) throw std::domain_error("IndexWindow: window outside [0,n]");
    }

    int size() const { return hi - lo + 1; }

    /// min over the window of k(n-k)/n^2; bounded away from 0 iff k(n-k) = Theta(n^2).
    double balancedness() const {
        double best = std::numeric_limits<double>::infinity();
        const double nn = static_cast<double>(n) * n;
        for (int k = lo; k <= hi; ++k) best = std::min(best, static_cast<double>(k) * (n - k) / nn);
        return best;
    }
};

struct WindowCondition {
    bool holds = false;
    double worst_ratio = 0.0;
    double balancedness = 0.0;
};

/// Checks mu(X) >= c / (|I| C(n,|X|)) on every class in the window, i.e.
/// class_prob(k) >= c/|I|. worst_ratio = min_k class_prob(k) |I| / c.
inline WindowCondition window_condition(const SymmetricMeasure& mu, const IndexWindow& window, double c) {
    if (!(c > 0.0)) throw std::domain_error("window_condition: c must be positive");
    if (window.n != mu.n()) throw std::domain_error("window_condition: window and measure disagree on n");
    WindowCondition r;
    r.worst_ratio = std::numeric_limits<double>::infinity();
    const double size = window.size();
    const double floor = c / size;
    r.holds = true;
    for (int k = window.lo; k <= window.hi; ++k) {
        r.worst_ratio = std::min(r.worst_ratio, mu.class_prob(k) * size / c);
        if (mu.class_prob(k) < floor) r.holds = false;
    }
    r.balancedness = window.balancedness();
    return r;
}

}  // namespace qmean

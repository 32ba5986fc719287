#pragma once

#include <math.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace qmean {

using u128 = unsigned __int128;

/// Hamming-weight class of n-bit inputs: every X with |X| = k.
struct WeightClass {
    int n = 1;
    int k = 0;

    WeightClass() = default;
    WeightClass(int n_, int k_) : n(n_), k(k_) {
        if (n < 1) throw std::domain_error("WeightClass: n must be positive, got " + std::to_string(n));
        if (k < 0 || k > n)
            throw std::domain_error("WeightClass: k=" + std::to_string(k) + " outside [0," + std::to_string(n) + "]");
    }

    friend bool operator==(const WeightClass&, const WeightClass&) = default;
};

/// Boolean mean a_X = |X|/n of every input in the class.
inline double mean(const WeightClass& w) {
    return static_cast<double>(w.k) / static_cast<double>(w.n);
}

/// Largest n for which C(n,k) is computed on the exact integer path.
inline constexpr int kExactBinomialMaxN = 60;

/// Exact C(n,k) for n <= 60. Multiplicative form keeps every partial product integral.
inline u128 exact_binomial(int n, int k) {
    if (k < 0 || k > n) throw std::domain_error("exact_binomial: k outside [0,n]");
    if (n > kExactBinomialMaxN) throw std::domain_error("exact_binomial: n > 60");
    const int m = std::min(k, n - k);
    u128 c = 1;
    for (int i = 1; i <= m; ++i) {
        c = c * static_cast<u128>(n - m + i) / static_cast<u128>(i);
    }
    return c;
}

namespace detail {

inline long double log_factorial(long double m) {
    int sign = 0;
    return ::lgammal_r(m + 1.0L, &sign);
}

}  // namespace detail

/// ln C(n,k) in extended precision. Symmetric in k <-> n-k by construction.
inline long double log_binomial_ld(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n)
        throw std::domain_error("log_binomial: require 0 <= k <= n, got n=" + std::to_string(n) +
                                " k=" + std::to_string(k));
    const std::int64_t m = std::min(k, n - k);
    if (m == 0) return 0.0L;
    if (n <= kExactBinomialMaxN) {
        return std::log(static_cast<long double>(exact_binomial(static_cast<int>(n), static_cast<int>(m))));
    }
    return detail::log_factorial(static_cast<long double>(n)) -
           detail::log_factorial(static_cast<long double>(m)) -
           detail::log_factorial(static_cast<long double>(n - m));
}

inline double log_binomial(std::int64_t n, std::int64_t k) {
    return static_cast<double>(log_binomial_ld(n, k));
}

/// C(n,k) as an exact integer when n <= 60, otherwise only through its logarithm.
struct ClassCount {
    long double log_value = 0.0L;
    std::optional<u128> exact;

    double value() const {
        if (exact) return static_cast<double>(*exact);
        return static_cast<double>(std::exp(log_value));
    }
};

inline ClassCount class_count(const WeightClass& w) {
    ClassCount c;
    c.log_value = log_binomial_ld(w.n, w.k);
    if (w.n <= kExactBinomialMaxN) c.exact = exact_binomial(w.n, w.k);
    return c;
}

inline std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return s;
}

/// Neumaier compensated accumulator. Add in a fixed order for reproducible totals.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

/// ln(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b) {
    if (a == -INFINITY) return b;
    if (b == -INFINITY) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

/// Binomial pmf C(T,i) a^i (1-a)^(T-i), evaluated in log space.
inline double binomial_pmf(int trials, int i, double a) {
    if (i < 0 || i > trials) return 0.0;
    if (a <= 0.0) return i == 0 ? 1.0 : 0.0;
    if (a >= 1.0) return i == trials ? 1.0 : 0.0;
    const long double lp = log_binomial_ld(trials, i) + static_cast<long double>(i) * std::log(static_cast<long double>(a)) +
                           static_cast<long double>(trials - i) * std::log1p(-static_cast<long double>(a));
    return static_cast<double>(std::exp(lp));
}

}  // namespace qmean

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace treebound {

// Nonnegative real carried in natural-log space. Zero is the -inf sentinel;
// it is the additive identity of log_sum and absorbing under mul.
struct LogNumber {
    double v = -std::numeric_limits<double>::infinity();

    constexpr LogNumber() = default;
    constexpr explicit LogNumber(double log_value) : v(log_value) {}

    static LogNumber zero() { return LogNumber(); }
    static LogNumber one() { return LogNumber(0.0); }
    static LogNumber from_value(double x) {
        if (x < 0.0) throw std::domain_error("LogNumber: negative value");
        return x == 0.0 ? zero() : LogNumber(std::log(x));
    }

    bool is_zero() const { return std::isinf(v) && v < 0; }
    double value() const { return is_zero() ? 0.0 : std::exp(v); }

    friend LogNumber operator*(LogNumber a, LogNumber b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return LogNumber(a.v + b.v);
    }
    friend bool operator<(LogNumber a, LogNumber b) { return a.v < b.v; }
    friend bool operator==(LogNumber a, LogNumber b) { return a.v == b.v; }
};

// Log-sum-exp with the pivot at the max term so every exponentiated ratio <= 1.
inline LogNumber log_sum(std::span<const LogNumber> terms) {
    if (terms.empty()) throw std::invalid_argument("log_sum: empty term list");
    const LogNumber* pivot = &terms[0];
    for (const auto& t : terms)
        if (pivot->v < t.v) pivot = &t;
    if (pivot->is_zero()) return LogNumber::zero();
    double acc = 0.0;
    for (const auto& t : terms)
        if (!t.is_zero()) acc += std::exp(t.v - pivot->v);
    return LogNumber(pivot->v + std::log(acc));
}

inline LogNumber log_sum(std::initializer_list<LogNumber> terms) {
    return log_sum(std::span<const LogNumber>(terms.begin(), terms.size()));
}

inline LogNumber operator+(LogNumber a, LogNumber b) {
    return log_sum({a, b});
}

}  // namespace treebound

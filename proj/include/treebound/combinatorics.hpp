#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

#include "treebound/bignat.hpp"
#include "treebound/lognumber.hpp"

namespace treebound {

namespace detail {

// Shared exact tables, grown on demand. All entries are deterministic, so
// concurrent growth is serialized by a mutex and reads go through snapshots.
class CombinatoricsTables {
public:
    static CombinatoricsTables& instance() {
        static CombinatoricsTables t;
        return t;
    }

    BigNat binomial(std::uint64_t m, std::uint64_t k) {
        if (k > m) return BigNat(0);
        std::lock_guard<std::mutex> lock(mu_);
        ensure_pascal(m);
        return pascal_[m][std::min(k, m - k)];
    }

    BigNat stirling2(std::uint64_t m, std::uint64_t c) {
        if (m == 0) return BigNat(c == 0 ? 1 : 0);
        if (c == 0 || c > m) return BigNat(0);
        std::lock_guard<std::mutex> lock(mu_);
        ensure_stirling(m);
        return stirling_[m][c];
    }

    BigNat wedderburn(std::uint64_t leaves) {
        std::lock_guard<std::mutex> lock(mu_);
        ensure_wedderburn(leaves);
        return we_[leaves];
    }

private:
    // Rows of Pascal's triangle, storing only k <= m/2.
    void ensure_pascal(std::uint64_t m) {
        while (pascal_.size() <= m) {
            std::uint64_t row = pascal_.size();
            std::vector<BigNat> r(row / 2 + 1);
            r[0] = BigNat(1);
            for (std::uint64_t k = 1; k <= row / 2; ++k) {
                const auto& prev = pascal_[row - 1];
                auto at = [&](std::uint64_t kk) -> BigNat {
                    if (kk > row - 1) return BigNat(0);
                    return prev[std::min(kk, row - 1 - kk)];
                };
                r[k] = at(k - 1) + at(k);
            }
            pascal_.push_back(std::move(r));
        }
    }

    // S(m,c) = S(m-1,c-1) + c*S(m-1,c)
    void ensure_stirling(std::uint64_t m) {
        if (stirling_.empty()) stirling_.push_back({BigNat(1)});  // S(0,0)=1
        while (stirling_.size() <= m) {
            std::uint64_t row = stirling_.size();
            std::vector<BigNat> r(row + 1);
            const auto& prev = stirling_[row - 1];
            auto at = [&](std::uint64_t cc) -> BigNat {
                return cc < prev.size() ? prev[cc] : BigNat(0);
            };
            for (std::uint64_t c = 1; c <= row; ++c) r[c] = at(c - 1) + BigNat(c) * at(c);
            stirling_.push_back(std::move(r));
        }
    }

    // WE(2n-1) = sum_{i<n} WE(i)WE(2n-1-i); WE(2n) adds the WE(n) diagonal pair term.
    void ensure_wedderburn(std::uint64_t n) {
        if (we_.empty()) we_ = {BigNat(0), BigNat(1)};  // WE(1)=1
        while (we_.size() <= n) {
            std::uint64_t L = we_.size();
            BigNat acc(0);
            for (std::uint64_t i = 1; 2 * i < L; ++i) acc += we_[i] * we_[L - i];
            if (L % 2 == 0) {
                const BigNat& h = we_[L / 2];
                acc += (h * (h + BigNat(1))).half_up();
            }
            we_.push_back(std::move(acc));
        }
    }

    std::mutex mu_;
    std::vector<std::vector<BigNat>> pascal_;
    std::vector<std::vector<BigNat>> stirling_;
    std::vector<BigNat> we_;
};

}  // namespace detail

// C(m,k); 0 when k > m.
inline BigNat binomial(std::uint64_t m, std::uint64_t k) {
    return detail::CombinatoricsTables::instance().binomial(m, k);
}

// Stirling number of the second kind: c-partitions of an m-set.
inline BigNat stirling2(std::uint64_t m, std::uint64_t c) {
    return detail::CombinatoricsTables::instance().stirling2(m, c);
}

// Number of 2-partitions of an m-set with a part of size k:
// C(m,k) except at k = m/2, where pairs coincide and it is C(m,m/2)/2.
inline BigNat stirling2_part_k(std::uint64_t m, std::uint64_t k) {
    BigNat b = binomial(m, k);
    if (2 * k == m) return b.half_up();
    return b;
}

// Structurally different binary trees with `leaves` leaves.
inline BigNat wedderburn_etherington(std::uint64_t leaves) {
    if (leaves == 0) return BigNat(0);
    return detail::CombinatoricsTables::instance().wedderburn(leaves);
}

inline LogNumber ln_binomial(std::uint64_t m, std::uint64_t k) {
    return LogNumber(binomial(m, k).ln());
}

inline LogNumber ln_stirling2(std::uint64_t m, std::uint64_t c) {
    return LogNumber(stirling2(m, c).ln());
}

inline LogNumber ln_wedderburn_etherington(std::uint64_t leaves) {
    return LogNumber(wedderburn_etherington(leaves).ln());
}

// log of the falling factorial (n)_a = n(n-1)...(n-a+1); log-zero when a > n.
inline LogNumber ln_falling_factorial(std::uint64_t n, std::uint64_t a) {
    if (a > n) return LogNumber::zero();
    double acc = 0.0;
    for (std::uint64_t j = 0; j < a; ++j) acc += std::log(static_cast<double>(n - j));
    return LogNumber(acc);
}

}  // namespace treebound

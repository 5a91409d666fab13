#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace treebound {

// Arbitrary-precision unsigned integer, base 2^32. Only the handful of
// operations the bound evaluators need: add, mul, compare, halve, ln.
class BigNat {
public:
    BigNat() = default;
    BigNat(std::uint64_t v) {
        if (v != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(v));
            if (v >> 32) limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
        }
    }

    bool is_zero() const { return limbs_.empty(); }

    friend bool operator==(const BigNat& a, const BigNat& b) { return a.limbs_ == b.limbs_; }
    friend bool operator!=(const BigNat& a, const BigNat& b) { return !(a == b); }

    friend bool operator<(const BigNat& a, const BigNat& b) {
        if (a.limbs_.size() != b.limbs_.size()) return a.limbs_.size() < b.limbs_.size();
        for (std::size_t i = a.limbs_.size(); i-- > 0;)
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i];
        return false;
    }
    friend bool operator<=(const BigNat& a, const BigNat& b) { return !(b < a); }
    friend bool operator>(const BigNat& a, const BigNat& b) { return b < a; }
    friend bool operator>=(const BigNat& a, const BigNat& b) { return !(a < b); }

    BigNat& operator+=(const BigNat& o) {
        if (limbs_.size() < o.limbs_.size()) limbs_.resize(o.limbs_.size(), 0);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            std::uint64_t s = carry + limbs_[i] + (i < o.limbs_.size() ? o.limbs_[i] : 0);
            limbs_[i] = static_cast<std::uint32_t>(s);
            carry = s >> 32;
        }
        if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
        return *this;
    }
    friend BigNat operator+(BigNat a, const BigNat& b) { return a += b; }

    // Subtraction requires a >= b; used only by the combinatorics tables.
    BigNat& operator-=(const BigNat& o) {
        assert(*this >= o);
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            std::int64_t d = static_cast<std::int64_t>(limbs_[i]) - borrow -
                             (i < o.limbs_.size() ? o.limbs_[i] : 0);
            borrow = d < 0;
            limbs_[i] = static_cast<std::uint32_t>(d + (borrow << 32));
        }
        trim();
        return *this;
    }
    friend BigNat operator-(BigNat a, const BigNat& b) { return a -= b; }

    friend BigNat operator*(const BigNat& a, const BigNat& b) {
        if (a.is_zero() || b.is_zero()) return BigNat();
        BigNat r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                std::uint64_t cur = r.limbs_[i + j] +
                                    static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] + carry;
                r.limbs_[i + j] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
            }
            r.limbs_[i + b.limbs_.size()] += static_cast<std::uint32_t>(carry);
        }
        r.trim();
        return r;
    }
    BigNat& operator*=(const BigNat& o) { return *this = *this * o; }

    // Ceiling division by 2. The evaluators only halve provably even sums,
    // so ceil == exact there; ceil keeps the result an upper bound regardless.
    BigNat half_up() const {
        BigNat r = *this;
        std::uint32_t carry = is_zero() ? 0 : (limbs_[0] & 1u);
        std::uint32_t high = 0;
        for (std::size_t i = r.limbs_.size(); i-- > 0;) {
            std::uint32_t cur = r.limbs_[i];
            r.limbs_[i] = (cur >> 1) | (high << 31);
            high = cur & 1u;
        }
        r.trim();
        if (carry) r += BigNat(1);
        return r;
    }

    bool is_even() const { return limbs_.empty() || (limbs_[0] & 1u) == 0; }

    // Exact division by a small divisor; remainder must be zero.
    BigNat div_exact(std::uint32_t d) const {
        BigNat r = *this;
        std::uint64_t rem = 0;
        for (std::size_t i = r.limbs_.size(); i-- > 0;) {
            std::uint64_t cur = (rem << 32) | r.limbs_[i];
            r.limbs_[i] = static_cast<std::uint32_t>(cur / d);
            rem = cur % d;
        }
        if (rem != 0) throw std::logic_error("BigNat::div_exact: nonzero remainder");
        r.trim();
        return r;
    }

    bool fits_u64() const { return limbs_.size() <= 2; }
    std::uint64_t to_u64() const {
        if (!fits_u64()) throw std::overflow_error("BigNat::to_u64: value too large");
        std::uint64_t v = 0;
        if (limbs_.size() > 1) v = static_cast<std::uint64_t>(limbs_[1]) << 32;
        if (!limbs_.empty()) v |= limbs_[0];
        return v;
    }

    // Natural log; -inf for zero.
    double ln() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        std::size_t top = limbs_.size() - 1;
        double mant = limbs_[top];
        int shift = static_cast<int>(top) * 32;
        if (top >= 1) { mant = mant * 4294967296.0 + limbs_[top - 1]; shift -= 32; }
        if (top >= 2) { mant = mant * 4294967296.0 + limbs_[top - 2]; shift -= 32; }
        return std::log(mant) + shift * std::log(2.0);
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::vector<std::uint32_t> work = limbs_;
        std::string digits;
        while (!work.empty()) {
            std::uint64_t rem = 0;
            for (std::size_t i = work.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | work[i];
                work[i] = static_cast<std::uint32_t>(cur / 1000000000u);
                rem = cur % 1000000000u;
            }
            while (!work.empty() && work.back() == 0) work.pop_back();
            std::string chunk = std::to_string(rem);
            if (!work.empty()) chunk = std::string(9 - chunk.size(), '0') + chunk;
            digits = chunk + digits;
        }
        return digits;
    }

    // Hex round-trip for the cache file.
    std::string to_hex() const {
        if (is_zero()) return "0";
        static const char* x = "0123456789abcdef";
        std::string s;
        for (std::size_t i = limbs_.size(); i-- > 0;)
            for (int nib = 7; nib >= 0; --nib) s.push_back(x[(limbs_[i] >> (nib * 4)) & 0xF]);
        std::size_t first = s.find_first_not_of('0');
        return s.substr(first);
    }
    static BigNat from_hex(const std::string& s) {
        BigNat r;
        for (char c : s) {
            std::uint32_t d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'f') d = 10 + (c - 'a');
            else if (c >= 'A' && c <= 'F') d = 10 + (c - 'A');
            else throw std::invalid_argument("BigNat::from_hex: bad digit");
            // r = r*16 + d
            std::uint64_t carry = d;
            for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
                std::uint64_t cur = (static_cast<std::uint64_t>(r.limbs_[i]) << 4) | carry;
                r.limbs_[i] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
            }
            if (carry) r.limbs_.push_back(static_cast<std::uint32_t>(carry));
        }
        r.trim();
        return r;
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }
    std::vector<std::uint32_t> limbs_;  // little-endian
};

}  // namespace treebound

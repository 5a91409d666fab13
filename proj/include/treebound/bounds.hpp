#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "treebound/combinatorics.hpp"
#include "treebound/dataset.hpp"
#include "treebound/lognumber.hpp"
#include "treebound/tree.hpp"

namespace treebound {

// Per-k coefficient of the mixture evaluator: `clamped` applies the min with
// C(m,k) that the per-type recursions carry; `literal` uses the raw feature
// coefficient alone.
enum class PartiMode { clamped, literal };

// Memo table for every bound evaluator, keyed by (evaluator, shape digest,
// c, m, landscape digest). Values are deterministic, so writes are idempotent;
// reads may run concurrently.
class BoundCache {
public:
    bool get_exact(const std::string& key, BigNat& out) const {
        std::shared_lock lock(mu_);
        auto it = exact_.find(key);
        if (it == exact_.end()) return false;
        out = it->second;
        return true;
    }
    void put_exact(const std::string& key, const BigNat& v) {
        std::unique_lock lock(mu_);
        exact_.emplace(key, v);
    }
    bool get_log(const std::string& key, double& out) const {
        std::shared_lock lock(mu_);
        auto it = log_.find(key);
        if (it == log_.end()) return false;
        out = it->second;
        return true;
    }
    void put_log(const std::string& key, double v) {
        std::unique_lock lock(mu_);
        log_.emplace(key, v);
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return exact_.size() + log_.size();
    }
    void clear() {
        std::unique_lock lock(mu_);
        exact_.clear();
        log_.clear();
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("BoundCache: cannot write " + path);
        out << "treebound-cache v1\n";
        std::shared_lock lock(mu_);
        for (const auto& [k, v] : exact_) out << "E " << k << " " << v.to_hex() << "\n";
        out.precision(17);
        for (const auto& [k, v] : log_) {
            std::ostringstream hex;
            hex << std::hexfloat << v;
            out << "L " << k << " " << hex.str() << "\n";
        }
    }
    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("BoundCache: cannot read " + path);
        std::string header;
        std::getline(in, header);
        if (header != "treebound-cache v1")
            throw std::runtime_error("BoundCache: unsupported cache file version");
        std::unique_lock lock(mu_);
        std::string kind, key, val;
        while (in >> kind >> key >> val) {
            if (kind == "E") exact_.emplace(key, BigNat::from_hex(val));
            else if (kind == "L") log_.emplace(key, std::strtod(val.c_str(), nullptr));
        }
    }

private:
    mutable std::shared_mutex mu_;
    std::unordered_map<std::string, BigNat> exact_;
    std::unordered_map<std::string, double> log_;
};

namespace detail {

inline std::string landscape_digest(const FeatureLandscape& ls) {
    // Bounds are invariant under permuting features of one type; sort for a
    // canonical key.
    std::vector<int> o = ls.omega_counts, n = ls.nu_counts;
    std::sort(o.rbegin(), o.rend());
    std::sort(n.rbegin(), n.rend());
    std::string s = "l" + std::to_string(ls.ell) + "|o";
    for (int v : o) s += std::to_string(v) + ",";
    s += "|n";
    for (int v : n) s += std::to_string(v) + ",";
    return s;
}

// C(a,c-b)*C(b,c-a)*(a+b-c)! -- the pairwise-union coefficient.
inline BigNat union_coefficient(int a, int b, int c) {
    BigNat f(1);
    for (int j = 2; j <= a + b - c; ++j) f *= BigNat(j);
    return binomial(a, c - b) * binomial(b, c - a) * f;
}

inline double ln_union_coefficient(int a, int b, int c) {
    return union_coefficient(a, b, c).ln();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Decision stumps
// ---------------------------------------------------------------------------

// 2-partitioning function bound for stumps on `ell` real features:
// (1/2) sum_{k=1}^{m-1} min{2l, C(m,k)}. Equality for 2l <= m,
// 2l >= C(m, floor(m/2)), and m <= 7.
inline BigNat stump_pf2_real(int m, int ell) {
    if (m < 1 || ell < 1) throw std::invalid_argument("stump_pf2_real: need m >= 1, ell >= 1");
    BigNat acc(0);
    BigNat twol(2 * static_cast<std::uint64_t>(ell));
    for (int k = 1; k <= m - 1; ++k) {
        BigNat b = binomial(m, k);
        acc += std::min(twol, b);
    }
    return acc.half_up();  // sum is even by the k <-> m-k symmetry
}

// Exact VC dimension of the real-feature stump class: largest d with
// 2*ell >= C(d, floor(d/2)).
inline int stump_vcdim_real(int ell) {
    if (ell < 1) throw std::invalid_argument("stump_vcdim_real: need ell >= 1");
    BigNat twol(2 * static_cast<std::uint64_t>(ell));
    int d = 1;
    while (binomial(d + 1, (d + 1) / 2) <= twol) ++d;
    return d;
}

// Greedy attribution over the Ferrers diagram of the ordinal landscape.
// Returns sum_k R_k; `contributions` (optional) receives the per-k R_k.
inline BigNat stump_pf2_ordinal(int m, const std::vector<int>& omega_counts,
                                std::vector<BigNat>* contributions = nullptr) {
    if (m < 2) throw std::invalid_argument("stump_pf2_ordinal: need m >= 2");
    FeatureLandscape ls;
    ls.omega_counts = omega_counts;
    std::vector<std::int64_t> conj = ls.ordinal_conjugate();
    auto at = [&](std::size_t c1) -> std::int64_t {  // 1-based, 0 beyond the diagram
        return c1 >= 1 && c1 <= conj.size() ? conj[c1 - 1] : 0;
    };
    BigNat total(0);
    if (contributions) contributions->clear();
    for (int k = 1; 2 * k <= m; ++k) {
        BigNat r;
        if (2 * k == m) {
            r = std::min(BigNat(static_cast<std::uint64_t>(at(1))), binomial(m, k).half_up());
        } else {
            BigNat avail(static_cast<std::uint64_t>(at(1) + at(2)));
            r = std::min(avail, binomial(m, k));
            // Update the conjugate: columns before Gamma_k untouched, Gamma_k
            // absorbs the leftover, later columns shift left twice.
            std::size_t cap = conj.size();
            std::size_t gamma = 1;
            for (std::size_t c1 = cap; c1 >= 1; --c1) {
                if (BigNat(static_cast<std::uint64_t>(at(c1) + at(c1 + 1))) >= r) {
                    gamma = c1;
                    break;
                }
                if (c1 == 1) break;
            }
            std::vector<std::int64_t> next(conj.size(), 0);
            for (std::size_t c1 = 1; c1 <= conj.size(); ++c1) {
                if (c1 < gamma) next[c1 - 1] = at(c1);
                else if (c1 == gamma)
                    next[c1 - 1] = at(gamma) + at(gamma + 1) + at(gamma + 2) -
                                   static_cast<std::int64_t>(r.to_u64());
                else next[c1 - 1] = at(c1 + 2);
            }
            conj = std::move(next);
        }
        if (contributions) contributions->push_back(r);
        total += r;
    }
    return total;
}

namespace detail {

// Per-feature 2-partition budget of a nominal feature with n_cats categories.
inline std::int64_t nominal_r_n(int n_cats, int m) {
    if (n_cats <= 2) return n_cats - 1;
    return std::min<std::int64_t>(n_cats, m);
}

// R_{N,k}: per-feature 2-partitions with a part of size k.
inline std::int64_t nominal_r_nk(int n_cats, int m, int k) {
    if (m == 2 * k && n_cats != 1) return 1;
    if (m > static_cast<std::int64_t>(n_cats) * k) return n_cats - 1;  // m/k > N
    return m / k;
}

}  // namespace detail

// Double-min bound over the feature-major and size-major aggregations.
inline BigNat stump_pf2_nominal(int m, const std::vector<int>& nu_counts) {
    if (m < 2) throw std::invalid_argument("stump_pf2_nominal: need m >= 2");
    BigNat feature_major(0);
    for (int n : nu_counts) {
        std::int64_t rk_sum = 0;
        for (int k = 1; 2 * k <= m; ++k) rk_sum += detail::nominal_r_nk(n, m, k);
        feature_major += BigNat(static_cast<std::uint64_t>(
            std::min<std::int64_t>(detail::nominal_r_n(n, m), rk_sum)));
    }
    BigNat size_major(0);
    for (int k = 1; 2 * k <= m; ++k) {
        std::int64_t rk_sum = 0;
        for (int n : nu_counts) rk_sum += detail::nominal_r_nk(n, m, k);
        size_major += std::min(stirling2_part_k(m, k), BigNat(static_cast<std::uint64_t>(rk_sum)));
    }
    return std::min(feature_major, size_major);
}

// ---------------------------------------------------------------------------
// General trees: exact c-partitioning-function bounds
// ---------------------------------------------------------------------------

namespace detail {

template <typename ChildFn>
BigNat inner_union_sum(int c, ChildFn&& child) {
    // sum over 1<=a,b<=c with a+b>=c of the union coefficient times the
    // children's partitioning values.
    BigNat acc(0);
    for (int a = 1; a <= c; ++a) {
        for (int b = std::max(1, c - a); b <= c; ++b) {
            BigNat l = child(/*left=*/true, a);
            if (l.is_zero()) continue;
            BigNat r = child(/*left=*/false, b);
            if (r.is_zero()) continue;
            acc += union_coefficient(a, b, c) * l * r;
        }
    }
    return acc;
}

inline BigNat halve_if(BigNat v, bool sym) { return sym ? v.half_up() : std::move(v); }

}  // namespace detail

// Real-valued features: the recursive bound with base pi^c_T(m) = S(m,c) for
// m <= L_T, per-k coefficient min{2l, C(m,k)} over k in [L_Tl, m-L_Tr],
// halved when the subtrees coincide; clamped at S(m,c).
inline BigNat tree_pf_real(const TreeShape& shape, int c, int m, int ell, BoundCache& cache) {
    if (c < 1 || m < 1 || ell < 1) throw std::invalid_argument("tree_pf_real: bad arguments");
    if (c > m || c > shape.leaf_count()) return BigNat(0);
    if (c == 1) return BigNat(1);
    if (m <= shape.leaf_count()) return stirling2(m, c);
    std::string key = "R|" + shape.to_string() + "|" + std::to_string(c) + "|" + std::to_string(m) +
                      "|" + std::to_string(ell);
    BigNat memo;
    if (cache.get_exact(key, memo)) return memo;

    TreeShape tl = shape.left(), tr = shape.right();
    bool sym = delta_lr(shape);
    BigNat twol(2 * static_cast<std::uint64_t>(ell));
    BigNat acc(0);
    for (int k = tl.leaf_count(); k <= m - tr.leaf_count(); ++k) {
        BigNat coeff = std::min(twol, binomial(m, k));
        if (coeff.is_zero()) continue;
        acc += coeff * detail::inner_union_sum(c, [&](bool left, int ab) {
            return tree_pf_real(left ? tl : tr, ab, left ? k : m - k, ell, cache);
        });
    }
    BigNat result = std::min(detail::halve_if(std::move(acc), sym), stirling2(m, c));
    cache.put_exact(key, result);
    return result;
}

// Ordinal features: minimum of the per-feature bound (R_{i,k} with the
// one-feature landscape shrink O^{k,i}) and the aggregate bound (R'_k from the
// landscape conjugate, shrink O^k), clamped at S(m,c). Each child's landscape
// is clamped by its own part size.
inline BigNat tree_pf_ordinal(const TreeShape& shape, int c, int m,
                              const std::vector<int>& omega_counts, BoundCache& cache) {
    if (c < 1 || m < 1) throw std::invalid_argument("tree_pf_ordinal: bad arguments");
    if (c > m || c > shape.leaf_count()) return BigNat(0);
    if (c == 1) return BigNat(1);
    FeatureLandscape ls;
    ls.omega_counts = omega_counts;
    std::string key = "O|" + shape.to_string() + "|" + std::to_string(c) + "|" + std::to_string(m) +
                      "|" + detail::landscape_digest(ls);
    BigNat memo;
    if (cache.get_exact(key, memo)) return memo;

    TreeShape tl = shape.left(), tr = shape.right();
    bool sym = delta_lr(shape);
    int omega = static_cast<int>(omega_counts.size());

    auto shrunk = [&](int k, int i_drop) {
        std::vector<int> o = omega_counts;
        for (int j = 0; j < omega; ++j)
            o[j] = std::min(o[j] - (j == i_drop ? 1 : 0), k);
        return o;
    };

    // Per-feature decomposition.
    BigNat per_feature(0);
    for (int i = 0; i < omega; ++i) {
        for (int k = 1; k <= m - 1; ++k) {
            std::int64_t rik = std::min<std::int64_t>(
                (2 * k == m ? 2 : 1) * static_cast<std::int64_t>(omega_counts[i] - 1), 2);
            if (rik <= 0) continue;
            auto left_ls = shrunk(k, i), right_ls = shrunk(m - k, i);
            per_feature += BigNat(static_cast<std::uint64_t>(rik)) *
                           detail::inner_union_sum(c, [&](bool left, int ab) {
                               return tree_pf_ordinal(left ? tl : tr, ab, left ? k : m - k,
                                                      left ? left_ls : right_ls, cache);
                           });
        }
    }
    per_feature = detail::halve_if(std::move(per_feature), sym);

    // Aggregate decomposition via the landscape conjugate.
    auto conj = ls.ordinal_conjugate();
    std::int64_t obar1 = conj.size() >= 1 ? conj[0] : 0;
    std::int64_t obar2 = conj.size() >= 2 ? conj[1] : 0;
    BigNat aggregate(0);
    for (int k = 1; k <= m - 1; ++k) {
        BigNat rk = 2 * k == m ? std::min(BigNat(static_cast<std::uint64_t>(2 * obar1)), binomial(m, k))
                               : std::min(BigNat(static_cast<std::uint64_t>(obar1 + obar2)),
                                          binomial(m, k));
        if (rk.is_zero()) continue;
        auto left_ls = shrunk(k, -1), right_ls = shrunk(m - k, -1);
        aggregate += rk * detail::inner_union_sum(c, [&](bool left, int ab) {
            return tree_pf_ordinal(left ? tl : tr, ab, left ? k : m - k,
                                   left ? left_ls : right_ls, cache);
        });
    }
    aggregate = detail::halve_if(std::move(aggregate), sym);

    BigNat result = std::min(std::min(per_feature, aggregate), stirling2(m, c));
    cache.put_exact(key, result);
    return result;
}

// Nominal features: minimum of the per-feature bound (R'_{N_i,min{k,m-k}} with
// shrink N^{k,i}) and the aggregate bound (min{C(m,k), nu*floor(m/min{k,m-k})}
// with shrink N^k), clamped at S(m,c).
inline BigNat tree_pf_nominal(const TreeShape& shape, int c, int m,
                              const std::vector<int>& nu_counts, BoundCache& cache) {
    if (c < 1 || m < 1) throw std::invalid_argument("tree_pf_nominal: bad arguments");
    if (c > m || c > shape.leaf_count()) return BigNat(0);
    if (c == 1) return BigNat(1);
    FeatureLandscape ls;
    ls.nu_counts = nu_counts;
    std::string key = "N|" + shape.to_string() + "|" + std::to_string(c) + "|" + std::to_string(m) +
                      "|" + detail::landscape_digest(ls);
    BigNat memo;
    if (cache.get_exact(key, memo)) return memo;

    TreeShape tl = shape.left(), tr = shape.right();
    bool sym = delta_lr(shape);
    int nu = static_cast<int>(nu_counts.size());

    auto shrunk = [&](int k, int i_drop) {
        std::vector<int> n = nu_counts;
        for (int j = 0; j < nu; ++j)
            n[j] = std::min(n[j] - (j == i_drop ? 1 : 0), k);
        return n;
    };

    // R'_{N,k}: N-1 when m/k > N, floor(m/k) otherwise (twice R_{N,k} at k=m/2).
    auto r_prime = [&](int n_cats, int k) -> std::int64_t {
        if (m > static_cast<std::int64_t>(n_cats) * k) return n_cats - 1;
        return m / k;
    };

    BigNat per_feature(0);
    for (int i = 0; i < nu; ++i) {
        for (int k = 1; k <= m - 1; ++k) {
            std::int64_t coeff = r_prime(nu_counts[i], std::min(k, m - k));
            if (coeff <= 0) continue;
            auto left_ls = shrunk(k, i), right_ls = shrunk(m - k, i);
            per_feature += BigNat(static_cast<std::uint64_t>(coeff)) *
                           detail::inner_union_sum(c, [&](bool left, int ab) {
                               return tree_pf_nominal(left ? tl : tr, ab, left ? k : m - k,
                                                      left ? left_ls : right_ls, cache);
                           });
        }
    }
    per_feature = detail::halve_if(std::move(per_feature), sym);

    BigNat aggregate(0);
    for (int k = 1; k <= m - 1; ++k) {
        std::int64_t per_size = static_cast<std::int64_t>(nu) * (m / std::min(k, m - k));
        BigNat rk = std::min(binomial(m, k), BigNat(static_cast<std::uint64_t>(per_size)));
        if (rk.is_zero()) continue;
        auto left_ls = shrunk(k, -1), right_ls = shrunk(m - k, -1);
        aggregate += rk * detail::inner_union_sum(c, [&](bool left, int ab) {
            return tree_pf_nominal(left ? tl : tr, ab, left ? k : m - k,
                                   left ? left_ls : right_ls, cache);
        });
    }
    aggregate = detail::halve_if(std::move(aggregate), sym);

    BigNat result = std::min(std::min(per_feature, aggregate), stirling2(m, c));
    cache.put_exact(key, result);
    return result;
}

// ---------------------------------------------------------------------------
// Mixture evaluators (the production path)
// ---------------------------------------------------------------------------

// Exact mixture bound. Base cases: 0 when c > m or c > L_T; S(m,c) when
// m <= L_T; 1 when c = 1. Recursion over k = 1..m-1 with
// R_k = 2l + 2*Obar_1-ish... coefficient 2l + 2w + floor(m/min{k,m-k})*nu,
// clamped at C(m,k) in `clamped` mode; each child's landscape is shrunk by its
// own part size; halved once when the subtrees coincide; clamped at S(m,c).
inline BigNat parti_func_ub(const TreeShape& shape, int c, int m, const FeatureLandscape& ls,
                            BoundCache& cache, PartiMode mode = PartiMode::clamped) {
    if (c < 1 || m < 1) throw std::invalid_argument("parti_func_ub: bad arguments");
    if (c > m || c > shape.leaf_count()) return BigNat(0);
    if (m <= shape.leaf_count()) return stirling2(m, c);
    if (c == 1) return BigNat(1);
    std::string key = (mode == PartiMode::clamped ? "Mc|" : "Ml|") + shape.to_string() + "|" +
                      std::to_string(c) + "|" + std::to_string(m) + "|" +
                      detail::landscape_digest(ls);
    BigNat memo;
    if (cache.get_exact(key, memo)) return memo;

    TreeShape tl = shape.left(), tr = shape.right();
    bool sym = delta_lr(shape);
    std::int64_t two_lw = 2 * (static_cast<std::int64_t>(ls.ell) + ls.omega());
    BigNat acc(0);
    for (int k = 1; k <= m - 1; ++k) {
        std::int64_t raw = two_lw + static_cast<std::int64_t>(ls.nu()) * (m / std::min(k, m - k));
        BigNat rk(static_cast<std::uint64_t>(raw));
        if (mode == PartiMode::clamped) rk = std::min(rk, binomial(m, k));
        if (rk.is_zero()) continue;
        FeatureLandscape left_ls = shrink_landscape(ls, k);
        FeatureLandscape right_ls = shrink_landscape(ls, m - k);
        acc += rk * detail::inner_union_sum(c, [&](bool left, int ab) {
            return parti_func_ub(left ? tl : tr, ab, left ? k : m - k,
                                 left ? left_ls : right_ls, cache, mode);
        });
    }
    BigNat result = std::min(detail::halve_if(std::move(acc), sym), stirling2(m, c));
    cache.put_exact(key, result);
    return result;
}

// Fast log-space relaxation: replaces the sum over k by (m-1) times the term
// at k = m-1, with the literal coefficient R_{m-1} = 2l + 2w + m*nu and no
// landscape shrink. Monotone relaxation of the exact evaluator.
inline LogNumber log_parti_func_ub(const TreeShape& shape, int c, int m,
                                   const FeatureLandscape& ls, BoundCache& cache) {
    if (c < 1 || m < 1) throw std::invalid_argument("log_parti_func_ub: bad arguments");
    if (c > m || c > shape.leaf_count()) return LogNumber::zero();
    if (c == m || c == 1 || m == 1) return LogNumber::one();
    if (m <= shape.leaf_count()) return ln_stirling2(m, c);
    std::string key = "LP|" + shape.to_string() + "|" + std::to_string(c) + "|" +
                      std::to_string(m) + "|" + detail::landscape_digest(ls);
    double memo;
    if (cache.get_log(key, memo)) return LogNumber(memo);

    TreeShape tl = shape.left(), tr = shape.right();
    int ap = std::min(c, tl.leaf_count());
    int bp = std::min(c, tr.leaf_count());
    double main = detail::ln_union_coefficient(ap, bp, c) +
                  log_parti_func_ub(tl, ap, m - 1, ls, cache).v +
                  log_parti_func_ub(tr, bp, m - 1, ls, cache).v;
    double cumul = 0.0;
    for (int a = 1; a <= c; ++a) {
        for (int b = std::max(1, c - a); b <= c; ++b) {
            double term = detail::ln_union_coefficient(a, b, c) +
                          log_parti_func_ub(tl, a, m - 1, ls, cache).v +
                          log_parti_func_ub(tr, b, m - 1, ls, cache).v;
            if (std::isinf(term) && term < 0) continue;
            cumul += std::exp(term - main);
        }
    }
    std::int64_t r_last = 2 * (static_cast<std::int64_t>(ls.ell) + ls.omega()) +
                          static_cast<std::int64_t>(ls.nu()) * m;
    double log_pi;
    if (r_last == 0 || cumul == 0.0) {
        log_pi = -std::numeric_limits<double>::infinity();
    } else {
        log_pi = (delta_lr(shape) ? -std::log(2.0) : 0.0) + std::log(static_cast<double>(m - 1)) +
                 std::log(static_cast<double>(r_last)) + main + std::log(cumul);
    }
    double result = std::min(log_pi, ln_stirling2(m, c).v);
    cache.put_log(key, result);
    return LogNumber(result);
}

// log of the growth-function bound: log-sum over a = 1..min{n, L_T, m} of
// (n)_a * pi^a_T(m), with pi in the fast log relaxation.
inline LogNumber log_growth_func_ub(const TreeShape& shape, int n_classes, int m,
                                    const FeatureLandscape& ls, BoundCache& cache) {
    if (n_classes < 2 || m < 1)
        throw std::invalid_argument("log_growth_func_ub: need n >= 2, m >= 1");
    std::string key = "LG|" + shape.to_string() + "|" + std::to_string(n_classes) + "|" +
                      std::to_string(m) + "|" + detail::landscape_digest(ls);
    double memo;
    if (cache.get_log(key, memo)) return LogNumber(memo);

    int cap = std::min(n_classes, std::min(shape.leaf_count(), m));
    double main = ln_falling_factorial(n_classes, cap).v +
                  log_parti_func_ub(shape, cap, m, ls, cache).v;
    double cumul = 1.0;
    for (int a = 1; a <= cap - 1; ++a) {
        double term = ln_falling_factorial(n_classes, a).v +
                      log_parti_func_ub(shape, a, m, ls, cache).v;
        cumul += std::exp(term - main);
    }
    double result = main + std::log(cumul);
    cache.put_log(key, result);
    return LogNumber(result);
}

// VC-dimension upper bound: 1 for a leaf, otherwise the largest m with
// pi^2_T(m) >= 2^{m-1} - 1, scanned incrementally from m = 1.
inline int vcdim_ub(const TreeShape& shape, const FeatureLandscape& ls, BoundCache& cache,
                    PartiMode mode = PartiMode::clamped, int scan_cap = 10000) {
    if (shape.is_leaf()) return 1;
    int m = 1;
    while (m <= scan_cap) {
        BigNat threshold(1);
        for (int j = 0; j < m - 1; ++j) threshold += threshold;  // 2^{m-1}
        threshold -= BigNat(1);
        if (parti_func_ub(shape, 2, m, ls, cache, mode) < threshold) return m - 1;
        ++m;
    }
    throw std::runtime_error("vcdim_ub: scan cap exceeded; raise scan_cap if intended");
}

// ---------------------------------------------------------------------------
// Priors and the risk bound
// ---------------------------------------------------------------------------

struct PriorConfig {
    double delta = 0.05;
    double r = std::pow(2.0, -10.5);
};

// p_d = 6/(pi^2 L^2) / WE(L): trees sharing a leaf count split 6/(pi^2 L^2).
inline double complexity_prior(const TreeShape& shape) {
    double l = shape.leaf_count();
    return 6.0 / (M_PI * M_PI * l * l) / std::exp(wedderburn_etherington(shape.leaf_count()).ln());
}

inline double ln_complexity_prior(int leaf_count) {
    double l = leaf_count;
    return std::log(6.0 / (M_PI * M_PI * l * l)) - wedderburn_etherington(leaf_count).ln();
}

// q_k = (1-r) r^k.
inline double error_prior(int k, const PriorConfig& cfg) {
    if (k < 0) throw std::invalid_argument("error_prior: k >= 0");
    return (1.0 - cfg.r) * std::pow(cfg.r, k);
}

inline double ln_error_prior(int k, const PriorConfig& cfg) {
    return std::log1p(-cfg.r) + k * std::log(cfg.r);
}

// Risk bound epsilon = (1/m)(2k + 4 ln(4 tau_{H_d}(2m) / (delta q_k p_d))).
inline double shawe_taylor_epsilon(int m, int k, const TreeShape& shape,
                                   const FeatureLandscape& ls, int n_classes,
                                   const PriorConfig& cfg, BoundCache& cache) {
    if (m < 1 || k < 0 || k > m) throw std::invalid_argument("shawe_taylor_epsilon: bad m or k");
    double ln_tau = log_growth_func_ub(shape, n_classes, 2 * m, ls, cache).v;
    double ln_arg = std::log(4.0) + ln_tau - std::log(cfg.delta) - ln_error_prior(k, cfg) -
                    ln_complexity_prior(shape.leaf_count());
    return (2.0 * k + 4.0 * ln_arg) / m;
}

}  // namespace treebound

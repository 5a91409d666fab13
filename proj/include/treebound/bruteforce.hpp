#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <vector>

#include "treebound/dataset.hpp"
#include "treebound/tree.hpp"

namespace treebound {

// A canonical set partition of example indices: blocks sorted ascending,
// blocks ordered by first element. Membership is then order-independent.
using CanonicalPartition = std::vector<std::vector<std::size_t>>;

inline CanonicalPartition canonical_partition(std::vector<std::vector<std::size_t>> blocks) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                                [](const auto& b) { return b.empty(); }),
                 blocks.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return blocks;
}

struct RealizedPartitionSet {
    std::set<CanonicalPartition> partitions;

    std::size_t count() const { return partitions.size(); }

    // Histogram over min part size, for per-k tightness checks.
    std::vector<std::size_t> part_size_histogram(std::size_t m) const {
        std::vector<std::size_t> h(m + 1, 0);
        for (const auto& p : partitions) {
            std::size_t smallest = m;
            for (const auto& b : p) smallest = std::min(smallest, b.size());
            ++h[smallest];
        }
        return h;
    }
};

namespace detail {

// Every split rule admissible on S, as the subset of indices it routes left.
// Thresholds between consecutive distinct values are a complete grid: routing
// is piecewise constant in theta. The all-left/all-right routings are included
// for the tree enumerator (a node may send its whole subset one way).
inline std::vector<std::vector<bool>> routing_signatures(const Dataset& s, bool include_trivial) {
    std::size_t m = s.examples.size();
    std::set<std::vector<bool>> sigs;
    auto add = [&](const std::vector<bool>& sig) {
        bool any = false, all = true;
        for (bool b : sig) {
            any |= b;
            all &= b;
        }
        if (include_trivial || (any && !all)) sigs.insert(sig);
    };
    for (int i = 0; i < s.landscape.ell; ++i) {
        std::vector<double> vals;
        for (const auto& ex : s.examples) vals.push_back(ex.reals[i]);
        std::vector<double> sorted = vals;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (std::size_t j = 0; j + 1 < sorted.size(); ++j) {
            double theta = 0.5 * (sorted[j] + sorted[j + 1]);
            std::vector<bool> sig(m);
            for (std::size_t e = 0; e < m; ++e) sig[e] = vals[e] <= theta;
            add(sig);
        }
    }
    for (int i = 0; i < s.landscape.omega(); ++i) {
        for (int theta = 1; theta <= s.landscape.omega_counts[i] - 1; ++theta) {
            std::vector<bool> sig(m);
            for (std::size_t e = 0; e < m; ++e) sig[e] = s.examples[e].ordinals[i] <= theta;
            add(sig);
        }
    }
    for (int i = 0; i < s.landscape.nu(); ++i) {
        for (int c = 1; c <= s.landscape.nu_counts[i]; ++c) {
            std::vector<bool> sig(m);
            for (std::size_t e = 0; e < m; ++e) sig[e] = s.examples[e].nominals[i] == c;
            add(sig);
        }
    }
    if (include_trivial) {
        sigs.insert(std::vector<bool>(m, true));
        sigs.insert(std::vector<bool>(m, false));
    }
    return {sigs.begin(), sigs.end()};
}

// All set partitions of {0..n-1}; n stays tiny (leaf blocks of a <=4-leaf shape).
// Indexed loop: recursion appends to `cur`, which would invalidate range-for
// references.
inline void block_partitions(std::size_t n, std::vector<std::vector<std::size_t>>& cur,
                             std::size_t next, std::vector<std::vector<std::vector<std::size_t>>>& out) {
    if (next == n) {
        out.push_back(cur);
        return;
    }
    for (std::size_t g = 0, groups = cur.size(); g < groups; ++g) {
        cur[g].push_back(next);
        block_partitions(n, cur, next + 1, out);
        cur[g].pop_back();
    }
    cur.push_back({next});
    block_partitions(n, cur, next + 1, out);
    cur.pop_back();
}

}  // namespace detail

// Exhaust every admissible single-node rule and collect the distinct
// nontrivial 2-partitions.
inline RealizedPartitionSet enumerate_stump_partitions(const Dataset& s) {
    if (s.examples.size() < 2)
        throw std::invalid_argument("enumerate_stump_partitions: need |S| >= 2");
    std::size_t m = s.examples.size();
    RealizedPartitionSet out;
    for (const auto& sig : detail::routing_signatures(s, /*include_trivial=*/false)) {
        std::vector<std::size_t> left, right;
        for (std::size_t e = 0; e < m; ++e) (sig[e] ? left : right).push_back(e);
        out.partitions.insert(canonical_partition({left, right}));
    }
    return out;
}

// All distinct c-partitions realizable by any rule assignment plus leaf
// labeling of `shape`. Guarded: the grid argument is only complete at these
// scales, and the assignment space explodes beyond them.
inline RealizedPartitionSet enumerate_tree_partitions(const TreeShape& shape, const Dataset& s,
                                                      std::size_t c) {
    if (s.examples.size() > 8 || shape.leaf_count() > 4)
        throw std::invalid_argument("enumerate_tree_partitions: instance exceeds guards (m<=8, L<=4)");
    std::size_t m = s.examples.size();
    RealizedPartitionSet out;
    if (c == 0 || c > std::min<std::size_t>(m, shape.leaf_count())) return out;

    auto sigs = detail::routing_signatures(s, /*include_trivial=*/true);

    // Pre-generate block-merge patterns per leaf-block count.
    std::array<std::vector<std::vector<std::vector<std::size_t>>>, 5> merges;
    for (std::size_t n = 1; n <= 4; ++n) {
        std::vector<std::vector<std::size_t>> cur;
        detail::block_partitions(n, cur, 0, merges[n]);
    }

    struct Enum {
        const std::vector<std::vector<bool>>& sigs;
        std::size_t c;
        const std::array<std::vector<std::vector<std::vector<std::size_t>>>, 5>& merges;
        RealizedPartitionSet& out;
        std::vector<std::vector<std::size_t>> blocks;

        void finish() {
            std::size_t nb = blocks.size();
            if (nb < c || nb > 4) return;
            for (const auto& pat : merges[nb]) {
                if (pat.size() != c) continue;
                std::vector<std::vector<std::size_t>> parts;
                for (const auto& group : pat) {
                    std::vector<std::size_t> merged;
                    for (auto bi : group)
                        merged.insert(merged.end(), blocks[bi].begin(), blocks[bi].end());
                    parts.push_back(std::move(merged));
                }
                out.partitions.insert(canonical_partition(std::move(parts)));
            }
        }

        // Walk a worklist of (shape, subset) pairs depth-first; when empty,
        // the leaf blocks are complete.
        void walk(std::vector<std::pair<TreeShape, std::vector<std::size_t>>>& work) {
            if (work.empty()) {
                finish();
                return;
            }
            auto [node, subset] = std::move(work.back());
            work.pop_back();
            if (node.is_leaf()) {
                if (!subset.empty()) {
                    blocks.push_back(subset);
                    walk(work);
                    blocks.pop_back();
                } else {
                    walk(work);
                }
            } else if (subset.empty()) {
                // No examples here: children receive nothing, no rule matters.
                work.emplace_back(node.right(), std::vector<std::size_t>{});
                work.emplace_back(node.left(), std::vector<std::size_t>{});
                walk(work);
                work.pop_back();
                work.pop_back();
            } else {
                for (const auto& sig : sigs) {
                    std::vector<std::size_t> l, r;
                    for (auto e : subset) (sig[e] ? l : r).push_back(e);
                    work.emplace_back(node.right(), std::move(r));
                    work.emplace_back(node.left(), std::move(l));
                    walk(work);
                    work.pop_back();
                    work.pop_back();
                }
            }
            work.emplace_back(std::move(node), std::move(subset));
        }
    };

    Enum e{sigs, c, merges, out, {}};
    std::vector<std::size_t> all(m);
    for (std::size_t i = 0; i < m; ++i) all[i] = i;
    std::vector<std::pair<TreeShape, std::vector<std::size_t>>> work;
    work.emplace_back(shape, std::move(all));
    e.walk(work);
    return out;
}

namespace detail {

// Explicit permutation matrices witnessing the stump bound for m = 1..7.
// Row count is the feature count at which every 2-partition is realized.
inline const std::vector<std::vector<int>>& witness_matrix(int m) {
    static const std::vector<std::vector<std::vector<int>>> mats = {
        {{1}},
        {{1, 2}},
        {{1, 2, 3}, {1, 3, 2}},
        {{1, 2, 4, 3}, {2, 3, 1, 4}, {1, 3, 2, 4}},
        {{1, 2, 3, 5, 4}, {2, 3, 4, 1, 5}, {3, 4, 1, 2, 5}, {1, 3, 5, 2, 4}, {1, 4, 2, 3, 5}},
        {{1, 2, 3, 6, 5, 4},
         {2, 3, 4, 1, 6, 5},
         {3, 4, 5, 2, 1, 6},
         {1, 3, 6, 5, 4, 2},
         {3, 5, 2, 1, 6, 4},
         {5, 1, 4, 3, 2, 6},
         {1, 4, 3, 6, 2, 5},
         {3, 6, 5, 1, 2, 4},
         {1, 2, 5, 3, 4, 6},
         {1, 3, 5, 2, 4, 6}},
        {{1, 2, 3, 4, 5, 6, 7},
         {2, 3, 4, 7, 1, 5, 6},
         {3, 4, 7, 6, 2, 1, 5},
         {4, 7, 6, 2, 5, 1, 3},
         {1, 4, 3, 7, 6, 2, 5},
         {5, 7, 4, 3, 2, 1, 6},
         {3, 7, 5, 6, 1, 2, 4},
         {2, 7, 4, 1, 6, 3, 5},
         {2, 6, 3, 7, 1, 4, 5},
         {1, 7, 3, 5, 2, 4, 6},
         {3, 6, 7, 1, 2, 4, 5},
         {1, 4, 7, 6, 2, 3, 5},
         {1, 2, 7, 3, 4, 5, 6},
         {1, 5, 7, 2, 3, 4, 6},
         {1, 6, 7, 2, 3, 4, 5},
         {2, 3, 7, 5, 1, 4, 6},
         {2, 5, 7, 4, 3, 6, 1},
         {2, 6, 7, 1, 3, 4, 5}}};
    return mats[m - 1];
}

// Dataset from a permutation matrix: example sigma^i_j gets value j on feature i.
inline Dataset dataset_from_permutations(const std::vector<std::vector<int>>& sigma, int m,
                                         int ell) {
    Dataset d;
    d.landscape.ell = ell;
    d.n_classes = 2;
    d.examples.resize(m);
    for (int e = 0; e < m; ++e) {
        d.examples[e].reals.assign(ell, 0.0);
        d.examples[e].label = 1;
    }
    for (int i = 0; i < ell; ++i) {
        if (i < static_cast<int>(sigma.size())) {
            for (int j = 1; j <= m; ++j) d.examples[sigma[i][j - 1] - 1].reals[i] = j;
        } else {
            // Rows beyond the fixture matrix are arbitrary permutations.
            for (int e = 0; e < m; ++e) d.examples[e].reals[i] = e + 1;
        }
    }
    return d;
}

}  // namespace detail

// Feature count of the m-point witness matrix (the ell achieving equality).
inline int witness_matrix_rows(int m) {
    if (m < 1 || m > 7) throw std::invalid_argument("witness_matrix_rows: m must be in 1..7");
    return static_cast<int>(detail::witness_matrix(m).size());
}

// Worst-case real-valued sample: a cyclic block-permutation construction when
// 2*ell <= m, otherwise the witness matrix for m <= 7 (needs ell >= its rows).
// Enumerating its stump 2-partitions meets the stump bound with equality.
inline Dataset worst_case_sample(int m, int ell) {
    if (m >= 1 && ell >= 1 && 2 * ell <= m) {
        // left block walks 1..2l cyclically, middle is 2l+1..m, right
        // block walks 2l..l+1 cyclically.
        std::vector<std::vector<int>> sigma(ell, std::vector<int>(m));
        int twol = 2 * ell;
        for (int i = 0; i < ell; ++i) {
            for (int j = 0; j < ell; ++j) sigma[i][j] = (i + j) % twol + 1;
            for (int j = 0; j < m - twol; ++j) sigma[i][ell + j] = twol + 1 + j;
            for (int j = 0; j < ell; ++j) sigma[i][m - ell + j] = (twol - 1 - j + i) % twol + 1;
        }
        return detail::dataset_from_permutations(sigma, m, ell);
    }
    if (m >= 1 && m <= 7 && ell >= witness_matrix_rows(m))
        return detail::dataset_from_permutations(detail::witness_matrix(m), m, ell);
    throw std::invalid_argument("worst_case_sample: unsupported (m, ell) combination");
}

}  // namespace treebound

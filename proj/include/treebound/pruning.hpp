#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "treebound/bounds.hpp"
#include "treebound/induction.hpp"
#include "treebound/tree.hpp"

namespace treebound {

struct PruneStep {
    int leaf_count = 0;
    std::int64_t train_errors = 0;
    double score = 0.0;  // bound for the bound pruner, criterion score otherwise
};

struct PruneResult {
    Tree tree;
    std::optional<double> final_bound;
    std::vector<PruneStep> history;
};

namespace detail {

// Collapse nodes that route no examples of `s` to one side: the rule is dead
// on this sample and a majority label would be undefined below it.
inline Tree collapse_dead_branches(const Tree& t, const Dataset& s,
                                   const std::vector<std::size_t>& subset) {
    if (t.is_leaf()) return t;
    std::vector<std::size_t> left, right;
    for (auto e : subset) (t.rule().routes_left(s.examples[e]) ? left : right).push_back(e);
    if (left.empty()) return collapse_dead_branches(t.right(), s, right);
    if (right.empty()) return collapse_dead_branches(t.left(), s, left);
    Tree l = collapse_dead_branches(t.left(), s, left);
    Tree r = collapse_dead_branches(t.right(), s, right);
    return Tree::node(t.rule(), l, r);
}

inline Tree collapse_dead_branches(const Tree& t, const Dataset& s) {
    std::vector<std::size_t> all(s.examples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return collapse_dead_branches(t, s, all);
}

struct EditCandidate {
    NodePath path;
    PruneMode mode;
    Tree tree;
    double score = 0.0;
};

inline int mode_rank(PruneMode m) {
    switch (m) {
        case PruneMode::replace_with_leaf: return 0;
        case PruneMode::replace_with_right: return 1;
        case PruneMode::replace_with_left: return 2;
    }
    return 3;
}

// Candidate order under equal scores: fewer leaves, then leaf/right/left
// replacement, then shallower node, then leftmost path.
inline bool better_candidate(const EditCandidate& a, const EditCandidate& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.tree.leaf_count() != b.tree.leaf_count()) return a.tree.leaf_count() < b.tree.leaf_count();
    if (mode_rank(a.mode) != mode_rank(b.mode)) return mode_rank(a.mode) < mode_rank(b.mode);
    if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
    return a.path < b.path;
}

// The PruneTreeWithBound loop shared by the bound, reduced-error and oracle
// pruners: evaluate the three candidate edits at every internal node, accept
// the best when its score does not exceed the current one. Every edit removes
// at least one leaf, so <= acceptance terminates.
template <typename ScoreFn>
PruneResult prune_greedy_loop(Tree t, const Dataset& grow_sample, ScoreFn&& score_of,
                              bool record_bound) {
    PruneResult res{t, std::nullopt, {}};
    double current = score_of(t);
    while (!res.tree.is_leaf()) {
        std::optional<EditCandidate> best;
        for (const auto& path : internal_paths(res.tree)) {
            for (PruneMode mode : {PruneMode::replace_with_left, PruneMode::replace_with_right,
                                   PruneMode::replace_with_leaf}) {
                if (mode == PruneMode::replace_with_leaf &&
                    examples_reaching(res.tree, grow_sample, path).empty())
                    continue;  // dead node; the left/right candidates still apply
                EditCandidate cand{path, mode, prune_edit(res.tree, path, mode, &grow_sample), 0.0};
                cand.score = score_of(cand.tree);
                if (!best || better_candidate(cand, *best)) best = std::move(cand);
            }
        }
        if (!best || best->score > current) break;
        res.tree = best->tree;
        current = best->score;
        res.history.push_back({res.tree.leaf_count(), error_count(res.tree, grow_sample), current});
    }
    if (record_bound) res.final_bound = current;
    return res;
}

}  // namespace detail

// Bound-based pruning: greedily accept the subtree replacement whose
// Shawe-Taylor bound is smallest, while it does not exceed the current bound.
inline PruneResult prune_bound(const Tree& t, const Dataset& s, const PriorConfig& cfg,
                               BoundCache& cache) {
    if (s.examples.empty()) throw std::invalid_argument("prune_bound: empty sample");
    int m = static_cast<int>(s.examples.size());
    auto eps = [&](const Tree& tree) {
        int k = static_cast<int>(error_count(tree, s));
        return shawe_taylor_epsilon(m, k, shape_of(tree), s.landscape, s.n_classes, cfg, cache);
    };
    Tree start = detail::collapse_dead_branches(t, s);
    return detail::prune_greedy_loop(start, s, eps, /*record_bound=*/true);
}

// Reduced-error pruning: the same loop scored by validation errors.
inline PruneResult prune_re(const Tree& t, const Dataset& s_grow, const Dataset& s_val) {
    if (s_val.examples.empty()) throw std::invalid_argument("prune_re: empty validation set");
    if (!(s_val.landscape == s_grow.landscape))
        throw std::invalid_argument("prune_re: landscape mismatch");
    auto errs = [&](const Tree& tree) { return static_cast<double>(error_count(tree, s_val)); };
    Tree start = detail::collapse_dead_branches(t, s_grow);
    return detail::prune_greedy_loop(start, s_grow, errs, /*record_bound=*/false);
}

// Oracle pruning is reduced-error pruning scored on the test set.
inline PruneResult prune_oracle(const Tree& t, const Dataset& s_grow, const Dataset& s_test) {
    return prune_re(t, s_grow, s_test);
}

namespace detail {

// Bottom-up cost-complexity pass: collapse every subtree whose critical value
// alpha*_n = (k_n - k_{t_n}) / (L_{t_n} - 1) is at most alpha.
inline Tree cc_prune_with_alpha(const Tree& t, const Dataset& s,
                                const std::vector<std::size_t>& subset, double alpha) {
    if (t.is_leaf()) return t;
    std::vector<std::size_t> left, right;
    for (auto e : subset) (t.rule().routes_left(s.examples[e]) ? left : right).push_back(e);
    if (left.empty()) return cc_prune_with_alpha(t.right(), s, right, alpha);
    if (right.empty()) return cc_prune_with_alpha(t.left(), s, left, alpha);
    Tree l = cc_prune_with_alpha(t.left(), s, left, alpha);
    Tree r = cc_prune_with_alpha(t.right(), s, right, alpha);
    Tree node = Tree::node(t.rule(), l, r);
    if (node.leaf_count() > 1) {
        ClassCounts counts(s.n_classes);
        for (auto e : subset) counts.add(s.examples[e].label);
        std::int64_t k_leaf = counts.errors();
        std::int64_t k_sub = 0;
        for (auto e : subset) k_sub += predict(node, s.examples[e]) != s.examples[e].label;
        double critical = static_cast<double>(k_leaf - k_sub) /
                          static_cast<double>(node.leaf_count() - 1);
        if (critical <= alpha) return Tree::leaf(counts.majority());
    }
    return node;
}

// All critical values of a tree, computed on the unpruned tree.
inline void cc_critical_alphas(const Tree& t, const Dataset& s,
                               const std::vector<std::size_t>& subset, std::vector<double>& out) {
    if (t.is_leaf()) return;
    std::vector<std::size_t> left, right;
    for (auto e : subset) (t.rule().routes_left(s.examples[e]) ? left : right).push_back(e);
    cc_critical_alphas(t.left(), s, left, out);
    cc_critical_alphas(t.right(), s, right, out);
    if (subset.empty()) return;
    ClassCounts counts(s.n_classes);
    for (auto e : subset) counts.add(s.examples[e].label);
    std::int64_t k_leaf = counts.errors();
    std::int64_t k_sub = 0;
    for (auto e : subset) k_sub += predict(t, s.examples[e]) != s.examples[e].label;
    out.push_back(static_cast<double>(k_leaf - k_sub) / static_cast<double>(t.leaf_count() - 1));
}

// Deterministic fold assignment: shuffle and cut into `folds` chunks.
inline std::vector<std::vector<std::size_t>> make_folds(std::size_t m, int folds,
                                                        std::uint64_t seed) {
    auto idx = shuffled_indices(m, seed);
    std::vector<std::vector<std::size_t>> out(folds);
    for (std::size_t i = 0; i < m; ++i) out[i % folds].push_back(idx[i]);
    return out;
}

inline Dataset subset_dataset(const Dataset& d, const std::vector<std::size_t>& idx) {
    Dataset out{d.landscape, {}, d.n_classes};
    out.examples.reserve(idx.size());
    for (auto i : idx) out.examples.push_back(d.examples[i]);
    return out;
}

inline PruneResult with_history_from(Tree pruned, const Tree& original, const Dataset& s,
                                     double score) {
    PruneResult res{pruned, std::nullopt, {}};
    if (pruned.leaf_count() < original.leaf_count())
        res.history.push_back({pruned.leaf_count(), error_count(pruned, s), score});
    return res;
}

}  // namespace detail

struct CrossValConfig {
    int folds = 5;
    std::uint64_t seed = 0;
    GrowthConstraints growth;
    InductionOptions induction;
};

// CART cost-complexity pruning: per fold, grow a tree, enumerate its critical
// alphas, keep the one minimizing fold-validation risk; average the fold
// winners and prune `t` bottom-up with that alpha.
inline PruneResult prune_cc(const Tree& t, const Dataset& s, const CrossValConfig& cv) {
    if (cv.folds < 2) throw std::invalid_argument("prune_cc: folds >= 2");
    if (s.examples.size() < static_cast<std::size_t>(cv.folds))
        throw std::invalid_argument("prune_cc: |S| < folds");
    auto folds = detail::make_folds(s.examples.size(), cv.folds, cv.seed);
    double alpha_sum = 0.0;
    for (int f = 0; f < cv.folds; ++f) {
        std::vector<std::size_t> grow_idx;
        for (int g = 0; g < cv.folds; ++g)
            if (g != f) grow_idx.insert(grow_idx.end(), folds[g].begin(), folds[g].end());
        Dataset grow_set = detail::subset_dataset(s, grow_idx);
        Dataset val_set = detail::subset_dataset(s, folds[f]);
        Tree fold_tree = grow_greedy(grow_set, cv.growth, cv.induction);

        std::vector<double> alphas;
        std::vector<std::size_t> all(grow_set.examples.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        detail::cc_critical_alphas(fold_tree, grow_set, all, alphas);
        std::sort(alphas.begin(), alphas.end());
        alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

        double best_alpha = 0.0;
        std::int64_t best_err = std::numeric_limits<std::int64_t>::max();
        for (double a : alphas) {
            Tree pruned = detail::cc_prune_with_alpha(fold_tree, grow_set, all, a);
            std::int64_t err = error_count(pruned, val_set);
            if (err < best_err) {
                best_err = err;
                best_alpha = a;
            }
        }
        alpha_sum += best_alpha;
    }
    double alpha_hat = alpha_sum / cv.folds;

    std::vector<std::size_t> all(s.examples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Tree pruned = detail::cc_prune_with_alpha(detail::collapse_dead_branches(t, s), s, all, alpha_hat);
    return detail::with_history_from(pruned, t, s, alpha_hat);
}

struct KmConfig {
    std::vector<double> c_grid;  // defaults to 10^-20 .. 10^0
    int folds = 5;
    double delta = 0.05;
    GrowthConstraints growth;
    InductionOptions induction;
    std::uint64_t seed = 0;

    KmConfig() {
        for (int e = -20; e <= 0; ++e) c_grid.push_back(std::pow(10.0, e));
    }
};

namespace detail {

// Single-pass bottom-up Kearns-Mansour pruning for a fixed constant C.
inline Tree km_prune_with_c(const Tree& t, const Dataset& s,
                            const std::vector<std::size_t>& subset, const NodePath& path, double c,
                            int m_total, double delta, int n_classes,
                            const FeatureLandscape& ls, BoundCache& cache) {
    if (t.is_leaf()) return t;
    std::vector<std::size_t> left, right;
    for (auto e : subset) (t.rule().routes_left(s.examples[e]) ? left : right).push_back(e);
    if (left.empty()) return km_prune_with_c(t.right(), s, right, path, c, m_total, delta, n_classes, ls, cache);
    if (right.empty()) return km_prune_with_c(t.left(), s, left, path, c, m_total, delta, n_classes, ls, cache);
    Tree l = km_prune_with_c(t.left(), s, left, path + "L", c, m_total, delta, n_classes, ls, cache);
    Tree r = km_prune_with_c(t.right(), s, right, path + "R", c, m_total, delta, n_classes, ls, cache);
    Tree node = Tree::node(t.rule(), l, r);

    ClassCounts counts(n_classes);
    for (auto e : subset) counts.add(s.examples[e].label);
    std::int64_t k_leaf = counts.errors();
    std::int64_t k_sub = 0;
    for (auto e : subset) k_sub += predict(node, s.examples[e]) != s.examples[e].label;

    int m_n = static_cast<int>(subset.size());
    double ln_tau_path =
        log_growth_func_ub(TreeShape::caterpillar(static_cast<int>(path.size())), n_classes, m_n,
                           ls, cache).v;
    double ln_tau_sub = log_growth_func_ub(shape_of(node), n_classes, m_n, ls, cache).v;
    double alpha_km =
        c * std::sqrt((ln_tau_path + ln_tau_sub + std::log(m_total / delta)) / m_total);
    if (static_cast<double>(k_sub) + alpha_km >= static_cast<double>(k_leaf))
        return Tree::leaf(counts.majority());
    return node;
}

}  // namespace detail

// Kearns-Mansour pruning with the constant C cross-validated on a log10 grid.
inline PruneResult prune_km(const Tree& t, const Dataset& s, const KmConfig& cfg,
                            BoundCache& cache) {
    if (cfg.c_grid.empty()) throw std::invalid_argument("prune_km: empty C grid");
    auto run_with_c = [&](const Tree& tree, const Dataset& data, double c) {
        std::vector<std::size_t> all(data.examples.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return detail::km_prune_with_c(detail::collapse_dead_branches(tree, data), data, all, "", c,
                                       static_cast<int>(data.examples.size()), cfg.delta,
                                       data.n_classes, data.landscape, cache);
    };

    double c_hat;
    if (cfg.c_grid.size() == 1) {
        c_hat = cfg.c_grid.front();
    } else {
        auto folds = detail::make_folds(s.examples.size(), cfg.folds, cfg.seed);
        double log_c_sum = 0.0;
        for (int f = 0; f < cfg.folds; ++f) {
            std::vector<std::size_t> grow_idx;
            for (int g = 0; g < cfg.folds; ++g)
                if (g != f) grow_idx.insert(grow_idx.end(), folds[g].begin(), folds[g].end());
            Dataset grow_set = detail::subset_dataset(s, grow_idx);
            Dataset val_set = detail::subset_dataset(s, folds[f]);
            Tree fold_tree = grow_greedy(grow_set, cfg.growth, cfg.induction);
            double best_c = cfg.c_grid.front();
            std::int64_t best_err = std::numeric_limits<std::int64_t>::max();
            for (double c : cfg.c_grid) {
                Tree pruned = run_with_c(fold_tree, grow_set, c);
                std::int64_t err = error_count(pruned, val_set);
                if (err < best_err) {
                    best_err = err;
                    best_c = c;
                }
            }
            log_c_sum += std::log10(best_c);
        }
        // the grid spans 21 orders of magnitude: average in log10 space
        c_hat = std::pow(10.0, log_c_sum / cfg.folds);
    }

    Tree pruned = run_with_c(t, s, c_hat);
    return detail::with_history_from(pruned, t, s, c_hat);
}

}  // namespace treebound

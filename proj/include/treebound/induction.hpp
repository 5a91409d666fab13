#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "treebound/dataset.hpp"
#include "treebound/tree.hpp"

namespace treebound {

// Per-class example counts at a (candidate) leaf.
struct ClassCounts {
    std::vector<std::int64_t> z;  // index 0 unused; classes are 1-based
    std::int64_t total = 0;

    explicit ClassCounts(int n_classes) : z(n_classes + 1, 0) {}

    void add(int label, std::int64_t delta = 1) {
        z[label] += delta;
        total += delta;
    }
    int majority() const {
        int best = 1;
        for (std::size_t a = 2; a < z.size(); ++a)
            if (z[a] > z[best]) best = static_cast<int>(a);
        return best;
    }
    std::int64_t errors() const { return total - z[majority()]; }
};

// Gini index 1 - sum_a (z_a/m)^2; empty counts score 0 (the additive identity
// the nominal reset bookkeeping needs).
inline double gini(const ClassCounts& counts) {
    if (counts.total == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t a = 1; a < counts.z.size(); ++a) {
        double p = static_cast<double>(counts.z[a]) / static_cast<double>(counts.total);
        acc += p * p;
    }
    return 1.0 - acc;
}

struct GrowthConstraints {
    int max_leaves = 75;
    std::optional<int> max_height;
};

struct SplitChoice {
    DecisionRule rule;
    double gini_left = 0.0;
    double gini_right = 0.0;
    double score = 0.0;  // candidate score under the active impurity mode
};

struct InductionOptions {
    // Candidate score: raw sum gini(left)+gini(right), or the conventional
    // size-weighted sum.
    bool weighted_impurity = false;
};

namespace detail {

struct FeatureBest {
    bool found = false;
    DecisionRule rule;
    double score = 0.0;
    double gl = 0.0, gr = 0.0;
};

inline double split_score(const ClassCounts& zl, const ClassCounts& zr, bool weighted) {
    if (!weighted) return gini(zl) + gini(zr);
    double m = static_cast<double>(zl.total + zr.total);
    return (zl.total / m) * gini(zl) + (zr.total / m) * gini(zr);
}

// Scan one feature's sorted order; within the feature, later candidates win
// ties (<= acceptance).
template <typename ValueOf, typename MakeRule>
FeatureBest scan_feature(const std::vector<std::size_t>& subset, const Dataset& s,
                         double leaf_score, bool weighted, bool nominal, ValueOf&& value_of,
                         MakeRule&& make_rule) {
    std::vector<std::size_t> order(subset);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        auto va = value_of(a), vb = value_of(b);
        if (va != vb) return va < vb;
        return a < b;
    });
    ClassCounts zl(s.n_classes), zr(s.n_classes);
    for (auto e : order) zr.add(s.examples[e].label);

    FeatureBest best;
    best.score = leaf_score;
    auto consider = [&](const DecisionRule& rule) {
        if (zl.total == 0 || zr.total == 0) return;
        double sc = split_score(zl, zr, weighted);
        if (sc <= best.score) {
            best.found = true;
            best.rule = rule;
            best.score = sc;
            best.gl = gini(zl);
            best.gr = gini(zr);
        }
    };

    for (std::size_t j = 0; j + 1 <= order.size(); ++j) {
        std::size_t e = order[j];
        zl.add(s.examples[e].label);
        zr.add(s.examples[e].label, -1);
        bool at_boundary = j + 1 < order.size() && value_of(e) != value_of(order[j + 1]);
        bool at_end = j + 1 == order.size();
        if (nominal) {
            if (at_boundary || at_end) {
                consider(make_rule(value_of(e), value_of(e)));
                // Unitary comparison: hand the finished category block back.
                for (std::size_t a = 1; a < zl.z.size(); ++a) zr.z[a] += zl.z[a];
                zr.total += zl.total;
                zl = ClassCounts(s.n_classes);
            }
        } else if (at_boundary) {
            consider(make_rule(value_of(e), value_of(order[j + 1])));
        }
    }
    return best;
}

}  // namespace detail

// Best single split of the subset, scanning every feature. Ties across
// features keep the lowest feature index (reals, then ordinals, then
// nominals); within a feature the later candidate wins. Returns nullopt when
// no candidate scores at or below the subset's own impurity.
inline std::optional<SplitChoice> find_best_split(const Dataset& s,
                                                  const std::vector<std::size_t>& subset,
                                                  const InductionOptions& opt = {}) {
    if (subset.size() < 2) throw std::invalid_argument("find_best_split: need |S| >= 2");
    ClassCounts all(s.n_classes);
    for (auto e : subset) all.add(s.examples[e].label);
    double leaf_score = gini(all);

    detail::FeatureBest global;
    global.score = leaf_score;
    auto merge = [&](const detail::FeatureBest& fb) {
        if (!fb.found) return;
        if (!global.found || fb.score < global.score) global = fb;
    };

    for (int i = 0; i < s.landscape.ell; ++i) {
        merge(detail::scan_feature(
            subset, s, leaf_score, opt.weighted_impurity, /*nominal=*/false,
            [&](std::size_t e) { return s.examples[e].reals[i]; },
            [&](double lo, double hi) {
                DecisionRule r;
                r.kind = DecisionRule::Kind::threshold_real;
                r.feature = i;
                r.threshold = 0.5 * (lo + hi);
                return r;
            }));
    }
    for (int i = 0; i < s.landscape.omega(); ++i) {
        merge(detail::scan_feature(
            subset, s, leaf_score, opt.weighted_impurity, /*nominal=*/false,
            [&](std::size_t e) { return static_cast<double>(s.examples[e].ordinals[i]); },
            [&](double lo, double) {
                DecisionRule r;
                r.kind = DecisionRule::Kind::threshold_ordinal;
                r.feature = i;
                r.category = static_cast<int>(lo);
                return r;
            }));
    }
    for (int i = 0; i < s.landscape.nu(); ++i) {
        merge(detail::scan_feature(
            subset, s, leaf_score, opt.weighted_impurity, /*nominal=*/true,
            [&](std::size_t e) { return static_cast<double>(s.examples[e].nominals[i]); },
            [&](double cat, double) {
                DecisionRule r;
                r.kind = DecisionRule::Kind::nominal_eq;
                r.feature = i;
                r.category = static_cast<int>(cat);
                return r;
            }));
    }
    if (!global.found) return std::nullopt;
    return SplitChoice{global.rule, global.gl, global.gr, global.score};
}

// Greedy CART growth: start from a majority leaf, repeatedly apply the open
// split with the smallest summed child impurity; children enter the candidate
// pool only when they strictly beat their leaf's impurity. Stops at zero
// training error, an empty pool, or when every candidate violates the
// constraints.
inline Tree grow_greedy(const Dataset& s, const GrowthConstraints& constraints = {},
                        const InductionOptions& opt = {}) {
    if (s.examples.empty()) throw std::invalid_argument("grow_greedy: empty sample");
    if (constraints.max_leaves < 1) throw std::invalid_argument("grow_greedy: max_leaves >= 1");

    std::vector<std::size_t> all(s.examples.size());
    std::iota(all.begin(), all.end(), 0);

    struct Candidate {
        NodePath leaf_path;
        std::vector<std::size_t> subset;
        SplitChoice split;
        double score;
    };

    auto leaf_for = [&](const std::vector<std::size_t>& subset) {
        return Tree::leaf(majority_label(s, subset, s.n_classes));
    };

    Tree t = leaf_for(all);
    std::vector<Candidate> pool;
    if (all.size() >= 2) {
        // The root candidate is not gated on strict gain; children are.
        if (auto c = find_best_split(s, all, opt)) pool.push_back({"", all, *c, c->score});
    }

    auto training_errors = [&] {
        std::int64_t err = 0;
        for (const auto& ex : s.examples) err += predict(t, ex) != ex.label;
        return err;
    };

    while (!pool.empty() && training_errors() != 0) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pool.size(); ++i)
            if (pool[i].score < pool[best].score) best = i;
        Candidate cand = std::move(pool[best]);
        pool.erase(pool.begin() + best);

        // Build the stump replacing the chosen leaf.
        std::vector<std::size_t> left, right;
        for (auto e : cand.subset)
            (cand.split.rule.routes_left(s.examples[e]) ? left : right).push_back(e);
        Tree stump = Tree::node(cand.split.rule, leaf_for(left), leaf_for(right));
        Tree grown = detail::rebuild_with(t, cand.leaf_path, 0, stump);

        if (grown.leaf_count() > constraints.max_leaves) continue;
        if (constraints.max_height && grown.height() > *constraints.max_height) continue;
        t = grown;

        struct SideRef {
            NodePath path;
            const std::vector<std::size_t>* subset;
            double leaf_gini;
        };
        for (const auto& side : {SideRef{cand.leaf_path + "L", &left, cand.split.gini_left},
                                 SideRef{cand.leaf_path + "R", &right, cand.split.gini_right}}) {
            if (side.subset->size() < 2) continue;
            if (auto c = find_best_split(s, *side.subset, opt)) {
                if (c->score < side.leaf_gini)
                    pool.push_back({side.path, *side.subset, *c, c->score});
            }
        }
    }
    return t;
}

inline double accuracy(const Tree& t, const Dataset& d) {
    if (d.examples.empty()) return 0.0;
    std::int64_t hit = 0;
    for (const auto& ex : d.examples) hit += predict(t, ex) == ex.label;
    return static_cast<double>(hit) / static_cast<double>(d.examples.size());
}

inline std::int64_t error_count(const Tree& t, const Dataset& d) {
    std::int64_t err = 0;
    for (const auto& ex : d.examples) err += predict(t, ex) != ex.label;
    return err;
}

}  // namespace treebound

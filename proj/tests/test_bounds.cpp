#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "treebound/bounds.hpp"
#include "treebound/bruteforce.hpp"

using namespace treebound;

namespace {

FeatureLandscape real_ls(int ell) {
    FeatureLandscape ls;
    ls.ell = ell;
    return ls;
}

FeatureLandscape mixed_ls(int ell, std::vector<int> o, std::vector<int> n) {
    FeatureLandscape ls;
    ls.ell = ell;
    ls.omega_counts = std::move(o);
    ls.nu_counts = std::move(n);
    return ls;
}

// Brute-force oracle: largest d with 2*ell >= C(d, floor(d/2)).
int stump_vcdim_oracle(int ell) {
    int d = 1;
    while (binomial(d + 1, (d + 1) / 2) <= BigNat(std::uint64_t(2) * ell)) ++d;
    return d;
}

}  // namespace

TEST_CASE("stump_pf2_real matches the equality regimes") {
    CHECK(stump_pf2_real(3, 2) == BigNat(3));    // 2l >= C(3,1): 2^{m-1}-1
    CHECK(stump_pf2_real(6, 3) == BigNat(15));   // 2l <= m: l(m-1)
    CHECK(stump_pf2_real(2, 1) == BigNat(1));
    CHECK(stump_pf2_real(5, 1) == BigNat(4));
    CHECK(stump_pf2_real(6, 10) == BigNat(31));  // 2l >= C(6,3)
}

TEST_CASE("stump_vcdim_real equals the binomial inequality scan") {
    const int expected[] = {2, 3, 4, 4, 5, 5, 5, 5, 5, 6};
    for (int ell = 1; ell <= 10; ++ell) {
        CHECK(stump_vcdim_real(ell) == expected[ell - 1]);
        CHECK(stump_vcdim_real(ell) == stump_vcdim_oracle(ell));
    }
    CHECK(stump_vcdim_real(1) == 2);
    CHECK(stump_vcdim_real(3) == 4);
    CHECK(stump_vcdim_real(10) == 6);
}

TEST_CASE("stump_pf2_ordinal: nine-feature landscape and edge cases") {
    std::vector<BigNat> contrib;
    CHECK(stump_pf2_ordinal(6, {6, 6, 6, 6, 5, 5, 5, 2, 2}, &contrib) == BigNat(29));
    REQUIRE(contrib.size() == 3);
    CHECK(contrib[0] == BigNat(6));
    CHECK(contrib[1] == BigNat(15));
    CHECK(contrib[2] == BigNat(8));

    CHECK(stump_pf2_ordinal(4, {2}) == BigNat(1));

    // ordinal with >= m categories per feature is as expressive as real here
    CHECK(stump_pf2_ordinal(5, {5, 5, 5, 5, 5}) == stump_pf2_real(5, 5));

    // simplified form (1/2) sum min{2w, C(m,k)} dominates the greedy bound
    for (int m = 2; m <= 9; ++m) {
        std::vector<int> O = {4, 3, 2};
        BigNat simplified(0);
        for (int k = 1; k <= m - 1; ++k)
            simplified += std::min(BigNat(2 * O.size()), binomial(m, k));
        CHECK(stump_pf2_ordinal(m, O) <= simplified.half_up());
    }
}

TEST_CASE("stump_pf2_nominal") {
    CHECK(stump_pf2_nominal(6, {3}) == BigNat(3));
    CHECK(stump_pf2_nominal(4, {2}) == BigNat(1));
    CHECK(stump_pf2_nominal(4, {1}) == BigNat(0));

    // brute-force agreement: one nom(3) feature, two examples per category
    Dataset d;
    d.landscape.nu_counts = {3};
    d.n_classes = 2;
    for (int c = 1; c <= 3; ++c)
        for (int rep = 0; rep < 2; ++rep) d.examples.push_back({{}, {}, {c}, 1});
    CHECK(BigNat(enumerate_stump_partitions(d).count()) <= stump_pf2_nominal(6, {3}));
}

TEST_CASE("tree_pf_real: stump reduction, base case, symmetry discount") {
    BoundCache cache;
    TreeShape stump = TreeShape::parse("(.,.)");
    CHECK(tree_pf_real(stump, 2, 5, 1, cache) == stump_pf2_real(5, 1));
    for (int m = 2; m <= 10; ++m)
        for (int ell : {1, 2, 5})
            CHECK(tree_pf_real(stump, 2, m, ell, cache) == stump_pf2_real(m, ell));

    // m <= L_T: every c-partition is realizable
    CHECK(tree_pf_real(TreeShape::parse("((.,.),(.,.))"), 2, 3, 2, cache) == stirling2(3, 2));
    CHECK(tree_pf_real(TreeShape::parse("((.,.),.)"), 2, 3, 1, cache) == BigNat(3));

    // the delta_lr halving applies only to the symmetric 4-leaf shape
    BigNat sym = tree_pf_real(TreeShape::parse("((.,.),(.,.))"), 2, 8, 2, cache);
    BigNat asym = tree_pf_real(TreeShape::parse("(((.,.),.),.)"), 2, 8, 2, cache);
    CHECK(sym <= asym);
}

TEST_CASE("tree_pf_ordinal: spec examples") {
    BoundCache cache;
    TreeShape stump = TreeShape::parse("(.,.)");
    std::vector<int> fig2 = {6, 6, 6, 6, 5, 5, 5, 2, 2};
    BigNat v = tree_pf_ordinal(stump, 2, 6, fig2, cache);
    CHECK(v >= stump_pf2_ordinal(6, fig2));
    CHECK(v <= BigNat(31));

    // all O_i >= m: agrees with the real bound at ell := omega
    for (int m = 3; m <= 8; ++m) {
        std::vector<int> big(3, 20);
        CHECK(tree_pf_ordinal(stump, 2, m, big, cache) == tree_pf_real(stump, 2, m, 3, cache));
        CHECK(tree_pf_ordinal(TreeShape::parse("((.,.),.)"), 2, m, big, cache) ==
              tree_pf_real(TreeShape::parse("((.,.),.)"), 2, m, 3, cache));
    }

    // single-category features admit no split at all
    for (int m = 2; m <= 6; ++m)
        CHECK(tree_pf_ordinal(stump, 2, m, {1, 1, 1}, cache) == BigNat(0));
}

TEST_CASE("tree_pf_nominal: spec examples") {
    BoundCache cache;
    TreeShape stump = TreeShape::parse("(.,.)");
    CHECK(tree_pf_nominal(stump, 2, 6, {3}, cache) >= stump_pf2_nominal(6, {3}));
    for (int m = 2; m <= 6; ++m) CHECK(tree_pf_nominal(stump, 2, m, {1}, cache) == BigNat(0));

    // binary features: the aggregate coefficient floor(m/min{k,m-k})*nu is at
    // least the real-valued 2*nu
    int m = 6, nu = 2;
    for (int k = 1; k <= m - 1; ++k)
        CHECK(nu * (m / std::min(k, m - k)) >= 2 * nu);
}

TEST_CASE("parti_func_ub: base cases and clamp") {
    BoundCache cache;
    TreeShape stump = TreeShape::parse("(.,.)");
    CHECK(parti_func_ub(stump, 2, 5, real_ls(1), cache) == BigNat(4));
    CHECK(parti_func_ub(stump, 3, 5, real_ls(1), cache) == BigNat(0));  // c > L_T
    CHECK(parti_func_ub(stump, 1, 9, real_ls(2), cache) == BigNat(1));
    CHECK(parti_func_ub(TreeShape::balanced(4), 2, 3, real_ls(2), cache) == stirling2(3, 2));

    // literal mode drops the per-k clamp but keeps the final one
    CHECK(parti_func_ub(stump, 2, 5, real_ls(1), cache, PartiMode::literal) == BigNat(4));
    BigNat lit = parti_func_ub(stump, 2, 12, real_ls(40), cache, PartiMode::literal);
    BigNat cl = parti_func_ub(stump, 2, 12, real_ls(40), cache, PartiMode::clamped);
    CHECK(cl <= lit);
    CHECK(lit <= stirling2(12, 2));
}

TEST_CASE("log_parti_func_ub: base cases and relaxation") {
    BoundCache cache;
    TreeShape stump = TreeShape::parse("(.,.)");
    CHECK(log_parti_func_ub(stump, 1, 7, real_ls(1), cache).v == doctest::Approx(0.0));
    CHECK(log_parti_func_ub(stump, 3, 7, real_ls(1), cache).is_zero());
    CHECK(log_parti_func_ub(TreeShape::balanced(4), 3, 4, real_ls(1), cache).v ==
          doctest::Approx(stirling2(4, 3).ln()));

    LogNumber lg = log_parti_func_ub(stump, 2, 5, real_ls(1), cache);
    CHECK(lg.v >= parti_func_ub(stump, 2, 5, real_ls(1), cache).ln() - 1e-9);
}

TEST_CASE("log_growth_func_ub") {
    BoundCache cache;
    // a leaf realizes exactly n constant functions
    for (int m : {1, 5, 40})
        CHECK(log_growth_func_ub(TreeShape::leaf(), 3, m, real_ls(2), cache).v ==
              doctest::Approx(std::log(3.0)));

    // stump, n=2, m=5, l=1: exp(result) >= 2 + 2*pi^2 = 10 with exact pi^2 = 4
    double lg = log_growth_func_ub(TreeShape::parse("(.,.)"), 2, 5, real_ls(1), cache).v;
    CHECK(std::exp(lg) >= 10.0 - 1e-9);

    // oracle comparison on tiny instances: exp(bound) >= realized labelings
    Dataset d = worst_case_sample(5, 2);
    d.n_classes = 2;
    auto parts = enumerate_tree_partitions(TreeShape::parse("(.,.)"), d, 2);
    double realized = 2.0 * parts.count() + 2.0;  // (n)_2 per 2-partition + constants
    CHECK(std::exp(log_growth_func_ub(TreeShape::parse("(.,.)"), 2, 5, real_ls(2), cache).v) >=
          realized - 1e-6);
}

TEST_CASE("vcdim_ub") {
    BoundCache cache;
    CHECK(vcdim_ub(TreeShape::leaf(), real_ls(3), cache) == 1);
    CHECK(vcdim_ub(TreeShape::parse("(.,.)"), real_ls(1), cache) == 2);
    CHECK(vcdim_ub(TreeShape::parse("(.,.)"), real_ls(3), cache) == 4);
    for (int ell = 1; ell <= 20; ++ell)
        CHECK(vcdim_ub(TreeShape::parse("(.,.)"), real_ls(ell), cache) == stump_vcdim_real(ell));

    int deeper = vcdim_ub(TreeShape::parse("((.,.),.)"), real_ls(2), cache);
    CHECK(deeper >= 2);
    CHECK(deeper < 100);
}

TEST_CASE("vcdim scaling over caterpillar shapes") {
    // d grows with L and stays within a constant factor of L*ln(L*ell)
    BoundCache cache;
    for (int ell : {2, 8}) {
        double lo = 1e300, hi = 0.0;
        int prev = 1;
        for (int leaves = 2; leaves <= 10; ++leaves) {
            int d = vcdim_ub(TreeShape::caterpillar(leaves - 1), real_ls(ell), cache);
            CHECK(d > prev);
            prev = d;
            double ratio = d / (leaves * std::log(double(leaves) * ell));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(hi <= 10.0 * lo);
    }
}

TEST_CASE("priors") {
    CHECK(complexity_prior(TreeShape::leaf()) ==
          doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-9));
    CHECK(complexity_prior(TreeShape::balanced(4)) ==
          doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi * 16.0 * 2.0)).epsilon(1e-9));

    PriorConfig cfg;
    CHECK(error_prior(0, cfg) == doctest::Approx(1.0 - std::pow(2.0, -10.5)).epsilon(1e-9));
    CHECK(error_prior(1, PriorConfig{0.05, 0.5}) == doctest::Approx(0.25));
    // geometric series sums to 1
    double total = 0.0;
    for (int k = 0; k < 200; ++k) total += error_prior(k, PriorConfig{0.05, 0.5});
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("shawe_taylor_epsilon") {
    BoundCache cache;
    PriorConfig base{0.05, std::pow(2.0, -10.5)};
    FeatureLandscape ls = real_ls(4);
    TreeShape shape = TreeShape::parse("((.,.),.)");

    // each unit of k adds exactly (2 + 4 ln(1/r))/m
    int m = 100;
    double delta_k = shawe_taylor_epsilon(m, 3, shape, ls, 3, base, cache) -
                     shawe_taylor_epsilon(m, 2, shape, ls, 3, base, cache);
    CHECK(delta_k == doctest::Approx((2.0 + 4.0 * std::log(1.0 / base.r)) / m).epsilon(1e-9));

    // leaf, n=2, m=100, k=0, delta=1, r=0.5: direct arithmetic oracle
    PriorConfig loose{1.0, 0.5};
    double expect =
        (4.0 / 100.0) * std::log(4.0 * 2.0 / (1.0 * 0.5 * (6.0 / (std::numbers::pi * std::numbers::pi))));
    CHECK(shawe_taylor_epsilon(100, 0, TreeShape::leaf(), real_ls(1), 2, loose, cache) ==
          doctest::Approx(expect).epsilon(1e-9));

    // smaller delta -> larger epsilon
    CHECK(shawe_taylor_epsilon(m, 0, shape, ls, 3, PriorConfig{0.01, 0.5}, cache) >
          shawe_taylor_epsilon(m, 0, shape, ls, 3, PriorConfig{0.5, 0.5}, cache));
}

TEST_CASE("consistency identities") {
    BoundCache cache;
    for (const char* spec : {"(.,.)", "((.,.),.)", "((.,.),(.,.))"}) {
        TreeShape shape = TreeShape::parse(spec);
        FeatureLandscape ls = mixed_ls(1, {3}, {2});
        for (int m = 1; m <= 8; ++m) {
            CHECK(parti_func_ub(shape, 1, m, ls, cache) == BigNat(1));
            for (int c = std::min(m, shape.leaf_count()) + 1; c <= 6; ++c)
                CHECK(parti_func_ub(shape, c, m, ls, cache) == BigNat(0));
        }
    }
}

TEST_CASE("larger landscapes never decrease a bound") {
    BoundCache cache;
    SplitMix64 rng(5);
    TreeShape shapes[] = {TreeShape::parse("(.,.)"), TreeShape::parse("((.,.),.)"),
                          TreeShape::parse("((.,.),(.,.))")};
    for (int trial = 0; trial < 100; ++trial) {
        int ell = int(rng.next_below(3));
        std::vector<int> small_o, big_o, small_n, big_n;
        for (int i = 0, w = int(rng.next_below(3)); i < w; ++i) {
            int hi = 1 + int(rng.next_below(4));
            big_o.push_back(hi);
            small_o.push_back(1 + int(rng.next_below(hi)));
        }
        for (int i = 0, v = int(rng.next_below(3)); i < v; ++i) {
            int hi = 1 + int(rng.next_below(4));
            big_n.push_back(hi);
            small_n.push_back(1 + int(rng.next_below(hi)));
        }
        FeatureLandscape lo = mixed_ls(ell, small_o, small_n);
        FeatureLandscape hi = mixed_ls(ell, big_o, big_n);
        const TreeShape& shape = shapes[rng.next_below(3)];
        int m = 2 + int(rng.next_below(6));
        int c = 1 + int(rng.next_below(3));
        CHECK(parti_func_ub(shape, c, m, lo, cache) <= parti_func_ub(shape, c, m, hi, cache));
        CHECK(log_parti_func_ub(shape, c, m, lo, cache).v <=
              log_parti_func_ub(shape, c, m, hi, cache).v + 1e-12);
        if (!big_o.empty())
            CHECK(tree_pf_ordinal(shape, c, m, small_o, cache) <=
                  tree_pf_ordinal(shape, c, m, big_o, cache));
        if (!big_n.empty())
            CHECK(tree_pf_nominal(shape, c, m, small_n, cache) <=
                  tree_pf_nominal(shape, c, m, big_n, cache));
        if (!big_o.empty() && m >= 2)
            CHECK(stump_pf2_ordinal(m, small_o) <= stump_pf2_ordinal(m, big_o));
        if (!big_n.empty() && m >= 2)
            CHECK(stump_pf2_nominal(m, small_n) <= stump_pf2_nominal(m, big_n));
    }
}

TEST_CASE("tree bounds dominate the dedicated stump bounds") {
    // the general recursions are looser than the stump-specific bounds
    BoundCache cache;
    SplitMix64 rng(7);
    TreeShape stump = TreeShape::parse("(.,.)");
    for (int trial = 0; trial < 60; ++trial) {
        int m = 2 + int(rng.next_below(7));
        std::vector<int> O, N;
        for (int i = 0, w = 1 + int(rng.next_below(3)); i < w; ++i)
            O.push_back(1 + int(rng.next_below(5)));
        for (int i = 0, v = 1 + int(rng.next_below(3)); i < v; ++i)
            N.push_back(1 + int(rng.next_below(5)));
        CHECK(stump_pf2_ordinal(m, O) <= tree_pf_ordinal(stump, 2, m, O, cache));
        CHECK(stump_pf2_nominal(m, N) <= tree_pf_nominal(stump, 2, m, N, cache));
        int ell = 1 + int(rng.next_below(4));
        CHECK(tree_pf_real(stump, 2, m, ell, cache) == stump_pf2_real(m, ell));
    }
}

TEST_CASE("mixture evaluator reduces to the stump formula on pure-real stumps") {
    BoundCache cache;
    TreeShape stump = TreeShape::parse("(.,.)");
    for (int m = 2; m <= 24; ++m)
        for (int ell : {1, 2, 3, 7, 19})
            CHECK(parti_func_ub(stump, 2, m, real_ls(ell), cache) == stump_pf2_real(m, ell));
}

TEST_CASE("growth bound dominates the falling-factorial sum of exact counts") {
    // exp(log tau) >= sum_a (n)_a pi^a with pi from the exact evaluator
    BoundCache cache;
    SplitMix64 rng(12);
    const char* shapes[] = {"(.,.)", "((.,.),.)", "((.,.),(.,.))"};
    for (int trial = 0; trial < 40; ++trial) {
        TreeShape shape = TreeShape::parse(shapes[rng.next_below(3)]);
        int m = 2 + int(rng.next_below(7));
        int n = 2 + int(rng.next_below(3));
        FeatureLandscape ls = mixed_ls(int(rng.next_below(3)), {1 + int(rng.next_below(4))},
                                       {1 + int(rng.next_below(4))});
        double exact_sum_ln;
        {
            std::vector<LogNumber> terms;
            for (int a = 1; a <= std::min({n, shape.leaf_count(), m}); ++a) {
                BigNat cnt = parti_func_ub(shape, a, m, ls, cache);
                if (cnt.is_zero()) continue;
                terms.push_back(LogNumber(ln_falling_factorial(n, a).v + cnt.ln()));
            }
            exact_sum_ln = log_sum(std::span<const LogNumber>(terms.data(), terms.size())).v;
        }
        CHECK(log_growth_func_ub(shape, n, m, ls, cache).v >= exact_sum_ln - 1e-9);
    }
}

TEST_CASE("tree parser round-trips random trees") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        int nodes = 1 + int(rng.next_below(6));
        std::vector<Tree> pool;
        for (int i = 0; i < nodes + 1; ++i) pool.push_back(Tree::leaf(1 + int(rng.next_below(4))));
        while (pool.size() > 1) {
            DecisionRule r;
            switch (rng.next_below(3)) {
                case 0:
                    r.kind = DecisionRule::Kind::threshold_real;
                    r.feature = int(rng.next_below(4));
                    r.threshold = double(rng.next_below(1000)) / 64.0;
                    break;
                case 1:
                    r.kind = DecisionRule::Kind::threshold_ordinal;
                    r.feature = int(rng.next_below(3));
                    r.category = 1 + int(rng.next_below(5));
                    break;
                default:
                    r.kind = DecisionRule::Kind::nominal_eq;
                    r.feature = int(rng.next_below(3));
                    r.category = 1 + int(rng.next_below(5));
            }
            Tree a = pool.back();
            pool.pop_back();
            Tree b = pool.back();
            pool.pop_back();
            pool.push_back(Tree::node(r, a, b));
        }
        CHECK(Tree::parse(pool[0].to_string()) == pool[0]);
    }
}

TEST_CASE("BigNat agrees with native arithmetic on small values") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        std::uint64_t a = rng.next() >> (1 + rng.next_below(40));
        std::uint64_t b = rng.next() >> (1 + rng.next_below(40));
        CHECK(BigNat(a) + BigNat(b) == BigNat(a + b));
        if (a >= b) CHECK(BigNat(a) - BigNat(b) == BigNat(a - b));
        unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
        BigNat expect(static_cast<std::uint64_t>(prod));
        if (prod >> 64) {
            BigNat high(static_cast<std::uint64_t>(prod >> 64));
            BigNat shift(1);
            for (int i = 0; i < 64; ++i) shift += shift;
            expect = high * shift + BigNat(static_cast<std::uint64_t>(prod));
        }
        CHECK(BigNat(a) * BigNat(b) == expect);
        CHECK((BigNat(a) < BigNat(b)) == (a < b));
    }
}

TEST_CASE("cache: hits identical to recomputation, file round-trip") {
    BoundCache a;
    TreeShape shape = TreeShape::parse("((.,.),(.,.))");
    FeatureLandscape ls = mixed_ls(2, {4}, {3});
    BigNat v1 = parti_func_ub(shape, 2, 9, ls, a);
    BigNat v2 = parti_func_ub(shape, 2, 9, ls, a);  // cached path
    CHECK(v1 == v2);
    double lg1 = log_growth_func_ub(shape, 3, 18, ls, a).v;

    std::string path = "cache_roundtrip.tmp";
    a.save(path);
    BoundCache b;
    b.load(path);
    CHECK(b.size() == a.size());
    CHECK(parti_func_ub(shape, 2, 9, ls, b) == v1);
    CHECK(log_growth_func_ub(shape, 3, 18, ls, b).v == lg1);
    std::remove(path.c_str());

    BoundCache fresh;
    CHECK(parti_func_ub(shape, 2, 9, ls, fresh) == v1);
    CHECK(log_growth_func_ub(shape, 3, 18, ls, fresh).v == lg1);
}

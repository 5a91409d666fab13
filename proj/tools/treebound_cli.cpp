// Command-line front end: bound queries, tree training, pruning runs, the
// verification suite, and the experiment harness.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "treebound/bounds.hpp"
#include "treebound/bruteforce.hpp"
#include "treebound/experiment.hpp"
#include "treebound/pruning.hpp"

using namespace treebound;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerification = 3;

std::vector<int> parse_counts(const std::string& csv) {
    std::vector<int> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
        if (out.back() < 1) throw CLI::ValidationError("category counts must be >= 1");
    }
    return out;
}

struct LandscapeFlags {
    int ell = 0;
    std::string ord, nom;

    FeatureLandscape build() const {
        FeatureLandscape ls;
        ls.ell = ell;
        ls.omega_counts = parse_counts(ord);
        ls.nu_counts = parse_counts(nom);
        return ls;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--real", ell, "number of real-valued features");
        cmd->add_option("--ord", ord, "ordinal category counts, e.g. 5,3,3");
        cmd->add_option("--nom", nom, "nominal category counts, e.g. 4,4");
    }
};

struct CacheFlags {
    std::string path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--cache-file", path, "load the bound cache from this file and save back");
    }
    void load_into(BoundCache& cache) const {
        if (path.empty()) return;
        std::ifstream probe(path);
        if (probe.good()) cache.load(path);
    }
    void save_from(const BoundCache& cache) const {
        if (!path.empty()) cache.save(path);
    }
};

int run_verify(int samples) {
    int violations = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
        if (!ok) ++violations;
    };

    for (int m = 2; m <= 7; ++m) {
        int ell = witness_matrix_rows(m);
        auto count = enumerate_stump_partitions(worst_case_sample(m, ell)).count();
        check(BigNat(count) == stump_pf2_real(m, ell),
              "stump equality m=" + std::to_string(m) + " (witness matrix)");
    }
    for (auto [m, ell] : {std::pair{6, 3}, {8, 2}, {9, 3}}) {
        auto count = enumerate_stump_partitions(worst_case_sample(m, ell)).count();
        check(count == std::size_t(ell * (m - 1)),
              "stump equality 2l<=m (block construction, m=" + std::to_string(m) + ")");
    }
    {
        std::vector<BigNat> contrib;
        BigNat total = stump_pf2_ordinal(6, {6, 6, 6, 6, 5, 5, 5, 2, 2}, &contrib);
        check(total == BigNat(29) && contrib.size() == 3 && contrib[0] == BigNat(6) &&
                  contrib[1] == BigNat(15) && contrib[2] == BigNat(8),
              "ordinal landscape oracle 29 = 6+15+8");
    }

    BoundCache cache;
    SplitMix64 rng(424242);
    const char* shapes[] = {"(.,.)", "((.,.),.)", "((.,.),(.,.))", "(((.,.),.),.)"};
    bool dominance = true;
    for (int trial = 0; trial < samples && dominance; ++trial) {
        int m = 2 + int(rng.next_below(6));
        FeatureLandscape ls;
        ls.ell = int(rng.next_below(3));
        for (int i = 0, w = int(rng.next_below(3)); i < w; ++i)
            ls.omega_counts.push_back(1 + int(rng.next_below(4)));
        for (int i = 0, v = int(rng.next_below(3)); i < v; ++i)
            ls.nu_counts.push_back(1 + int(rng.next_below(4)));
        if (ls.ell == 0 && ls.omega_counts.empty() && ls.nu_counts.empty()) ls.ell = 1;
        Dataset d;
        d.landscape = ls;
        d.n_classes = 2;
        for (int e = 0; e < m; ++e) {
            Example ex;
            for (int i = 0; i < ls.ell; ++i) ex.reals.push_back(double(rng.next_below(6)));
            for (int o : ls.omega_counts) ex.ordinals.push_back(1 + int(rng.next_below(o)));
            for (int n : ls.nu_counts) ex.nominals.push_back(1 + int(rng.next_below(n)));
            ex.label = 1;
            d.examples.push_back(std::move(ex));
        }
        TreeShape shape = TreeShape::parse(shapes[rng.next_below(4)]);
        for (int c = 1; c <= 3; ++c) {
            BigNat enumerated(enumerate_tree_partitions(shape, d, c).count());
            BigNat mix = parti_func_ub(shape, c, m, ls, cache);
            if (!(enumerated <= mix && mix <= stirling2(m, c)) ||
                log_parti_func_ub(shape, c, m, ls, cache).v < mix.ln() - 1e-9)
                dominance = false;
        }
    }
    check(dominance, "dominance on " + std::to_string(samples) + " random instances");

    if (violations) {
        std::cout << violations << " violation(s)\n";
        return kExitVerification;
    }
    std::cout << "verification passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decision-tree partitioning, growth and VC bounds with pruning"};
    app.require_subcommand(1);

    // ---- vcdim ----
    auto* vcdim = app.add_subcommand("vcdim", "VC-dimension upper bound of a tree shape");
    std::string vc_shape;
    LandscapeFlags vc_ls;
    CacheFlags vc_cache;
    bool vc_exact_stump = false, vc_literal = false;
    int vc_cap = 10000;
    vcdim->add_option("--shape", vc_shape, "shape spec: '.' leaf, '(L,R)' node")->required();
    vc_ls.attach(vcdim);
    vc_cache.attach(vcdim);
    vcdim->add_flag("--exact-stump", vc_exact_stump, "print the exact stump VC dimension");
    vcdim->add_flag("--literal-rk", vc_literal, "drop the per-k binomial clamp");
    vcdim->add_option("--scan-cap", vc_cap, "safety cap for the VC scan");

    // ---- bound ----
    auto* bound = app.add_subcommand("bound", "partitioning-function upper bound");
    std::string b_shape;
    int b_c = 2, b_m = 1;
    LandscapeFlags b_ls;
    CacheFlags b_cache;
    bool b_literal = false, b_log_only = false;
    bound->add_option("--shape", b_shape)->required();
    bound->add_option("-c,--parts", b_c, "number of parts c")->required();
    bound->add_option("-m,--examples", b_m, "number of examples m")->required();
    b_ls.attach(bound);
    b_cache.attach(bound);
    bound->add_flag("--literal-rk", b_literal, "drop the per-k binomial clamp");
    bound->add_flag("--log-only", b_log_only, "skip the exact evaluator");

    // ---- growth ----
    auto* growth = app.add_subcommand("growth", "log growth-function upper bound");
    std::string g_shape;
    int g_n = 2, g_m = 1;
    LandscapeFlags g_ls;
    CacheFlags g_cache;
    growth->add_option("--shape", g_shape)->required();
    growth->add_option("-n,--classes", g_n)->required();
    growth->add_option("-m,--examples", g_m)->required();
    g_ls.attach(growth);
    g_cache.attach(growth);

    // ---- grow ----
    auto* grow = app.add_subcommand("grow", "greedily grow a tree from a CSV dataset");
    std::string grow_data;
    int grow_max_leaves = 75;
    int grow_max_height = 0;
    bool grow_weighted = false;
    grow->add_option("--data", grow_data, "CSV with a schema header line")->required();
    grow->add_option("--max-leaves", grow_max_leaves);
    grow->add_option("--max-height", grow_max_height, "0 = unbounded");
    grow->add_flag("--weighted-gini", grow_weighted, "size-weighted impurity sums");

    // ---- prune ----
    auto* prune = app.add_subcommand("prune", "grow and prune with one model");
    std::string p_data, p_model = "ours";
    std::uint64_t p_seed = 0;
    double p_train_fraction = 0.85, p_delta = 0.05, p_log2r = -10.5;
    int p_max_leaves = 75, p_folds = 5;
    bool p_weighted = false, p_no_timing = false, p_print_tree = false;
    CacheFlags p_cache;
    prune->add_option("--data", p_data)->required();
    prune->add_option("--model", p_model, "og|cc|re|km|ours|oracle");
    prune->add_option("--seed", p_seed);
    prune->add_option("--train-fraction", p_train_fraction);
    prune->add_option("--max-leaves", p_max_leaves);
    prune->add_option("--delta", p_delta);
    prune->add_option("--log2-r", p_log2r, "log2 of the error-prior ratio r");
    prune->add_option("--folds", p_folds);
    bool p_print_history = false;
    prune->add_flag("--weighted-gini", p_weighted);
    prune->add_flag("--no-timing", p_no_timing, "zero the time column for byte-identical output");
    prune->add_flag("--print-tree", p_print_tree, "also print the serialized tree");
    prune->add_flag("--print-history", p_print_history, "also print the prune-step history as CSV");
    p_cache.attach(prune);

    // ---- experiment ----
    auto* experiment = app.add_subcommand("experiment", "the 25-run pruning comparison table");
    std::string e_data, e_models = "og,cc,re,km,ours,oracle", e_format = "table";
    int e_runs = 25, e_max_leaves = 75, e_folds = 5, e_threads = 1;
    double e_train_fraction = 0.85, e_delta = 0.05, e_log2r = -10.5;
    std::uint64_t e_seed = 0;
    bool e_weighted = false, e_no_timing = false;
    CacheFlags e_cache;
    experiment->add_option("--data", e_data)->required();
    experiment->add_option("--models", e_models, "comma-separated subset of og,cc,re,km,ours,oracle");
    experiment->add_option("--runs", e_runs);
    experiment->add_option("--train-fraction", e_train_fraction);
    experiment->add_option("--max-leaves", e_max_leaves);
    experiment->add_option("--delta", e_delta);
    experiment->add_option("--log2-r", e_log2r);
    experiment->add_option("--folds", e_folds);
    experiment->add_option("--seed", e_seed, "base seed");
    experiment->add_option("--format", e_format, "csv|table");
    experiment->add_option("--threads", e_threads);
    experiment->add_flag("--weighted-gini", e_weighted);
    experiment->add_flag("--no-timing", e_no_timing);
    e_cache.attach(experiment);

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "bruteforce dominance and equality suite");
    int v_samples = 150;
    verify->add_option("--samples", v_samples, "random dominance instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand(vcdim)) {
            TreeShape shape = TreeShape::parse(vc_shape);
            FeatureLandscape ls = vc_ls.build();
            if (vc_exact_stump) {
                if (shape.to_string() != "(.,.)" || ls.omega() || ls.nu()) {
                    std::cerr << "--exact-stump requires the stump shape and a pure real landscape\n";
                    return kExitUsage;
                }
                std::cout << stump_vcdim_real(ls.ell) << "\n";
                return 0;
            }
            BoundCache cache;
            vc_cache.load_into(cache);
            int d = vcdim_ub(shape, ls, cache,
                             vc_literal ? PartiMode::literal : PartiMode::clamped, vc_cap);
            vc_cache.save_from(cache);
            std::cout << d << "\n";
        } else if (app.got_subcommand(bound)) {
            TreeShape shape = TreeShape::parse(b_shape);
            FeatureLandscape ls = b_ls.build();
            BoundCache cache;
            b_cache.load_into(cache);
            if (!b_log_only) {
                BigNat exact = parti_func_ub(shape, b_c, b_m, ls, cache,
                                             b_literal ? PartiMode::literal : PartiMode::clamped);
                std::cout << "exact " << exact.to_string() << "\n";
            }
            std::cout << "log " << log_parti_func_ub(shape, b_c, b_m, ls, cache).v << "\n";
            b_cache.save_from(cache);
        } else if (app.got_subcommand(growth)) {
            TreeShape shape = TreeShape::parse(g_shape);
            BoundCache cache;
            g_cache.load_into(cache);
            std::cout << "log " << log_growth_func_ub(shape, g_n, g_m, g_ls.build(), cache).v
                      << "\n";
            g_cache.save_from(cache);
        } else if (app.got_subcommand(grow)) {
            Dataset d = load_dataset(grow_data);
            GrowthConstraints gc{grow_max_leaves, {}};
            if (grow_max_height > 0) gc.max_height = grow_max_height;
            Tree t = grow_greedy(d, gc, InductionOptions{grow_weighted});
            std::cout << t.to_string() << "\n";
            std::cerr << "leaves " << t.leaf_count() << " height " << t.height() << " train_acc "
                      << accuracy(t, d) << "\n";
        } else if (app.got_subcommand(prune)) {
            Dataset data = load_dataset(p_data);
            ExperimentConfig cfg;
            cfg.n_runs = 1;
            cfg.base_seed = p_seed;
            cfg.train_fraction = p_train_fraction;
            cfg.growth.max_leaves = p_max_leaves;
            cfg.induction.weighted_impurity = p_weighted;
            cfg.prior = PriorConfig{p_delta, std::pow(2.0, p_log2r)};
            cfg.cc_folds = p_folds;
            cfg.km.folds = p_folds;
            cfg.models = {model_from_name(p_model)};
            cfg.timing = !p_no_timing;
            BoundCache cache;
            p_cache.load_into(cache);
            auto rows = run_experiment(data, cfg, cache);
            std::cout << experiment_csv(rows);
            if (p_print_tree || p_print_history) {
                auto [train, test] = split_dataset(data, p_train_fraction, p_seed);
                Tree og = grow_greedy(train, cfg.growth, cfg.induction);
                Model m = cfg.models[0];
                PruneResult res{og, std::nullopt, {}};
                if (m == Model::cc)
                    res = prune_cc(og, train,
                                   CrossValConfig{p_folds, p_seed * 31 + 1, cfg.growth,
                                                  cfg.induction});
                else if (m == Model::ours) res = prune_bound(og, train, cfg.prior, cache);
                else if (m == Model::oracle) res = prune_oracle(og, train, test);
                else if (m == Model::km) {
                    KmConfig km = cfg.km;
                    km.growth = cfg.growth;
                    km.seed = p_seed * 31 + 1;
                    res = prune_km(og, train, km, cache);
                } else if (m == Model::re) {
                    auto [gs, vs] = carve_validation(train, test.examples.size(), p_seed);
                    res = prune_re(grow_greedy(gs, cfg.growth, cfg.induction), gs, vs);
                }
                if (p_print_tree) std::cout << res.tree.to_string() << "\n";
                if (p_print_history) {
                    std::cout << "step,leaves,train_errors,score\n";
                    for (std::size_t i = 0; i < res.history.size(); ++i)
                        std::cout << i + 1 << "," << res.history[i].leaf_count << ","
                                  << res.history[i].train_errors << "," << res.history[i].score
                                  << "\n";
                }
            }
            p_cache.save_from(cache);
        } else if (app.got_subcommand(experiment)) {
            Dataset data = load_dataset(e_data);
            ExperimentConfig cfg;
            cfg.n_runs = e_runs;
            cfg.base_seed = e_seed;
            cfg.train_fraction = e_train_fraction;
            cfg.growth.max_leaves = e_max_leaves;
            cfg.induction.weighted_impurity = e_weighted;
            cfg.prior = PriorConfig{e_delta, std::pow(2.0, e_log2r)};
            cfg.cc_folds = e_folds;
            cfg.km.folds = e_folds;
            cfg.timing = !e_no_timing;
            cfg.threads = e_threads;
            cfg.models.clear();
            std::istringstream ms(e_models);
            std::string tok;
            while (std::getline(ms, tok, ','))
                if (!tok.empty()) cfg.models.push_back(model_from_name(tok));
            if (cfg.models.empty()) {
                std::cerr << "no models selected\n";
                return kExitUsage;
            }
            BoundCache cache;
            e_cache.load_into(cache);
            auto rows = run_experiment(data, cfg, cache);
            e_cache.save_from(cache);
            if (e_format == "csv") std::cout << experiment_csv(rows);
            else if (e_format == "table") std::cout << experiment_table(rows);
            else {
                std::cerr << "unknown format '" << e_format << "'\n";
                return kExitUsage;
            }
        } else if (app.got_subcommand(verify)) {
            return run_verify(v_samples);
        }
    } catch (const IngestionError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}

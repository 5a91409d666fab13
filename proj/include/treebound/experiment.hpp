#pragma once

#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "treebound/bounds.hpp"
#include "treebound/dataset.hpp"
#include "treebound/induction.hpp"
#include "treebound/pruning.hpp"

namespace treebound {

enum class Model { og, cc, re, km, ours, oracle };

inline const char* model_name(Model m) {
    switch (m) {
        case Model::og: return "OG";
        case Model::cc: return "CC";
        case Model::re: return "RE";
        case Model::km: return "KM";
        case Model::ours: return "Ours";
        case Model::oracle: return "Oracle";
    }
    return "?";
}

inline Model model_from_name(const std::string& s) {
    std::string low;
    for (char c : s) low.push_back(static_cast<char>(std::tolower(c)));
    if (low == "og") return Model::og;
    if (low == "cc") return Model::cc;
    if (low == "re") return Model::re;
    if (low == "km") return Model::km;
    if (low == "ours") return Model::ours;
    if (low == "oracle") return Model::oracle;
    throw std::invalid_argument("unknown model '" + s + "'");
}

struct ExperimentConfig {
    int n_runs = 25;
    double train_fraction = 0.85;
    GrowthConstraints growth{};  // max_leaves defaults to 75
    InductionOptions induction{};
    std::vector<Model> models = {Model::og, Model::cc, Model::re,
                                 Model::km, Model::ours, Model::oracle};
    PriorConfig prior{};
    int cc_folds = 5;
    KmConfig km{};
    std::uint64_t base_seed = 0;
    bool timing = true;
    int threads = 1;
};

// One model on one seeded split.
struct RunMetrics {
    double train_acc = 0.0;
    std::optional<double> val_acc;
    double test_acc = 0.0;
    int leaves = 0;
    int height = 0;
    double prune_seconds = 0.0;
    std::optional<double> bound;
};

struct ModelSummary {
    Model model;
    std::vector<RunMetrics> runs;

    template <typename F>
    std::pair<double, double> mean_std(F&& get) const {
        double sum = 0.0;
        for (const auto& r : runs) sum += get(r);
        double mean = sum / runs.size();
        double var = 0.0;
        for (const auto& r : runs) {
            double d = get(r) - mean;
            var += d * d;
        }
        return {mean, std::sqrt(var / runs.size())};
    }
};

// Carve a validation set of the same size as the test set out of the train
// split, deterministically from the run seed. Reduced-error pruning regrows
// its tree on the remainder.
inline std::pair<Dataset, Dataset> carve_validation(const Dataset& train, std::size_t val_size,
                                                    std::uint64_t seed) {
    auto idx = shuffled_indices(train.examples.size(), seed ^ 0x9e3779b97f4a7c15ULL);
    Dataset grow{train.landscape, {}, train.n_classes};
    Dataset val{train.landscape, {}, train.n_classes};
    for (std::size_t i = 0; i < idx.size(); ++i)
        (i < val_size ? val : grow).examples.push_back(train.examples[idx[i]]);
    return {std::move(grow), std::move(val)};
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

// All requested models on one seeded 85/15 split. CC, KM, Ours and Oracle
// prune the tree grown on the full train split; RE regrows on train minus a
// validation set of the test set's size.
inline std::vector<std::pair<Model, RunMetrics>> run_single(const Dataset& data,
                                                            const ExperimentConfig& cfg,
                                                            std::uint64_t seed,
                                                            BoundCache& cache) {
    auto [train, test] = split_dataset(data, cfg.train_fraction, seed);
    Tree og = grow_greedy(train, cfg.growth, cfg.induction);

    std::vector<std::pair<Model, RunMetrics>> out;
    auto metrics_for = [&](const Tree& t, const Dataset& train_set, double secs,
                           std::optional<double> bound, std::optional<double> val_acc) {
        RunMetrics m;
        m.train_acc = accuracy(t, train_set);
        m.val_acc = val_acc;
        m.test_acc = accuracy(t, test);
        m.leaves = t.leaf_count();
        m.height = t.height();
        m.prune_seconds = cfg.timing ? secs : 0.0;
        m.bound = bound;
        return m;
    };

    for (Model model : cfg.models) {
        auto start = std::chrono::steady_clock::now();
        switch (model) {
            case Model::og:
                out.emplace_back(model, metrics_for(og, train, 0.0, std::nullopt, std::nullopt));
                break;
            case Model::cc: {
                CrossValConfig cv{cfg.cc_folds, seed * 31 + 1, cfg.growth, cfg.induction};
                PruneResult res = prune_cc(og, train, cv);
                out.emplace_back(model, metrics_for(res.tree, train, detail::seconds_since(start),
                                                    std::nullopt, std::nullopt));
                break;
            }
            case Model::re: {
                auto [grow_set, val_set] = carve_validation(train, test.examples.size(), seed);
                Tree og_re = grow_greedy(grow_set, cfg.growth, cfg.induction);
                start = std::chrono::steady_clock::now();
                PruneResult res = prune_re(og_re, grow_set, val_set);
                out.emplace_back(model,
                                 metrics_for(res.tree, grow_set, detail::seconds_since(start),
                                             std::nullopt, accuracy(res.tree, val_set)));
                break;
            }
            case Model::km: {
                KmConfig km = cfg.km;
                km.growth = cfg.growth;
                km.induction = cfg.induction;
                km.delta = cfg.prior.delta;
                km.seed = seed * 31 + 1;
                PruneResult res = prune_km(og, train, km, cache);
                out.emplace_back(model, metrics_for(res.tree, train, detail::seconds_since(start),
                                                    std::nullopt, std::nullopt));
                break;
            }
            case Model::ours: {
                PruneResult res = prune_bound(og, train, cfg.prior, cache);
                out.emplace_back(model, metrics_for(res.tree, train, detail::seconds_since(start),
                                                    res.final_bound, std::nullopt));
                break;
            }
            case Model::oracle: {
                PruneResult res = prune_oracle(og, train, test);
                out.emplace_back(model, metrics_for(res.tree, train, detail::seconds_since(start),
                                                    std::nullopt, std::nullopt));
                break;
            }
        }
    }
    return out;
}

// n_runs seeded splits; runs may execute on a small thread pool, results are
// assembled in seed order.
inline std::vector<ModelSummary> run_experiment(const Dataset& data, const ExperimentConfig& cfg,
                                                BoundCache& cache) {
    if (cfg.n_runs < 1) throw std::invalid_argument("run_experiment: n_runs >= 1");
    std::vector<std::vector<std::pair<Model, RunMetrics>>> per_run(cfg.n_runs);

    int workers = std::max(1, cfg.threads);
    if (workers == 1) {
        for (int r = 0; r < cfg.n_runs; ++r)
            per_run[r] = run_single(data, cfg, cfg.base_seed + r, cache);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int r; (r = next.fetch_add(1)) < cfg.n_runs;)
                    per_run[r] = run_single(data, cfg, cfg.base_seed + r, cache);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<ModelSummary> out;
    for (Model model : cfg.models) {
        ModelSummary sum{model, {}};
        for (const auto& run : per_run)
            for (const auto& [m, metrics] : run)
                if (m == model) sum.runs.push_back(metrics);
        out.push_back(std::move(sum));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output formatting
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v, int prec) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

}  // namespace detail

inline std::string experiment_csv(const std::vector<ModelSummary>& rows) {
    std::string out =
        "model,train_acc_mean,train_acc_std,val_acc_mean,val_acc_std,test_acc_mean,test_acc_std,"
        "leaves_mean,leaves_std,height_mean,height_std,time_mean,time_std,bound_mean,bound_std\n";
    for (const auto& row : rows) {
        auto [tr, tr_s] = row.mean_std([](const RunMetrics& m) { return m.train_acc; });
        auto [te, te_s] = row.mean_std([](const RunMetrics& m) { return m.test_acc; });
        auto [lv, lv_s] = row.mean_std([](const RunMetrics& m) { return double(m.leaves); });
        auto [ht, ht_s] = row.mean_std([](const RunMetrics& m) { return double(m.height); });
        auto [ti, ti_s] = row.mean_std([](const RunMetrics& m) { return m.prune_seconds; });
        out += model_name(row.model);
        out += "," + detail::fmt(tr, 4) + "," + detail::fmt(tr_s, 4);
        if (row.runs.front().val_acc) {
            auto [va, va_s] = row.mean_std([](const RunMetrics& m) { return *m.val_acc; });
            out += "," + detail::fmt(va, 4) + "," + detail::fmt(va_s, 4);
        } else {
            out += ",NA,NA";
        }
        out += "," + detail::fmt(te, 4) + "," + detail::fmt(te_s, 4);
        out += "," + detail::fmt(lv, 1) + "," + detail::fmt(lv_s, 1);
        out += "," + detail::fmt(ht, 1) + "," + detail::fmt(ht_s, 1);
        out += "," + detail::fmt(ti, 3) + "," + detail::fmt(ti_s, 3);
        if (row.runs.front().bound) {
            auto [bo, bo_s] = row.mean_std([](const RunMetrics& m) { return *m.bound; });
            out += "," + detail::fmt(bo, 3) + "," + detail::fmt(bo_s, 3);
        } else {
            out += ",NA,NA";
        }
        out += "\n";
    }
    return out;
}

inline std::string experiment_table(const std::vector<ModelSummary>& rows) {
    std::ostringstream os;
    os << std::left << std::setw(8) << "Model" << std::right << std::setw(16) << "Train acc"
       << std::setw(16) << "Val acc" << std::setw(16) << "Test acc" << std::setw(13) << "Leaves"
       << std::setw(12) << "Height" << std::setw(14) << "Time [s]" << std::setw(16) << "Bound"
       << "\n";
    auto cell = [](double mean, double std, int prec) {
        return detail::fmt(mean, prec) + " (" + detail::fmt(std, prec) + ")";
    };
    for (const auto& row : rows) {
        auto [tr, tr_s] = row.mean_std([](const RunMetrics& m) { return m.train_acc; });
        auto [te, te_s] = row.mean_std([](const RunMetrics& m) { return m.test_acc; });
        auto [lv, lv_s] = row.mean_std([](const RunMetrics& m) { return double(m.leaves); });
        auto [ht, ht_s] = row.mean_std([](const RunMetrics& m) { return double(m.height); });
        auto [ti, ti_s] = row.mean_std([](const RunMetrics& m) { return m.prune_seconds; });
        os << std::left << std::setw(8) << model_name(row.model) << std::right;
        os << std::setw(16) << cell(tr, tr_s, 3);
        if (row.runs.front().val_acc) {
            auto [va, va_s] = row.mean_std([](const RunMetrics& m) { return *m.val_acc; });
            os << std::setw(16) << cell(va, va_s, 3);
        } else {
            os << std::setw(16) << "NA";
        }
        os << std::setw(16) << cell(te, te_s, 3);
        os << std::setw(13) << cell(lv, lv_s, 1);
        os << std::setw(12) << cell(ht, ht_s, 1);
        os << std::setw(14) << cell(ti, ti_s, 3);
        if (row.runs.front().bound) {
            auto [bo, bo_s] = row.mean_std([](const RunMetrics& m) { return *m.bound; });
            os << std::setw(16) << cell(bo, bo_s, 3);
        } else {
            os << std::setw(16) << "NA";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace treebound

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace treebound {

// Per-type feature counts: ell real features, omega_counts[i] categories for
// ordinal feature i, nu_counts[i] categories for nominal feature i.
struct FeatureLandscape {
    int ell = 0;
    std::vector<int> omega_counts;
    std::vector<int> nu_counts;

    int omega() const { return static_cast<int>(omega_counts.size()); }
    int nu() const { return static_cast<int>(nu_counts.size()); }

    bool operator==(const FeatureLandscape&) const = default;

    // Conjugate of the ordinal landscape: component C counts features with
    // at least C+1 categories, i.e. O_C-bar = sum_i [O_i - 1 >= C].
    std::vector<std::int64_t> ordinal_conjugate() const {
        int cap = 0;
        for (int o : omega_counts) cap = std::max(cap, o - 1);
        std::vector<std::int64_t> conj(cap, 0);
        for (int o : omega_counts)
            for (int c = 1; c <= o - 1; ++c) ++conj[c - 1];
        return conj;
    }
};

// Each categorical component clamped at k; ell unchanged.
inline FeatureLandscape shrink_landscape(const FeatureLandscape& ls, int k) {
    if (k < 1) throw std::invalid_argument("shrink_landscape: k must be >= 1");
    FeatureLandscape out = ls;
    for (int& o : out.omega_counts) o = std::min(o, k);
    for (int& n : out.nu_counts) n = std::min(n, k);
    return out;
}

struct Example {
    std::vector<double> reals;
    std::vector<int> ordinals;  // values in [1, O_i]
    std::vector<int> nominals;  // values in [1, N_i]
    int label = 0;              // class in [1, n_classes]
};

struct Dataset {
    FeatureLandscape landscape;
    std::vector<Example> examples;
    int n_classes = 0;

    std::size_t size() const { return examples.size(); }
};

struct IngestionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

enum class ColKind { real, ordinal, nominal, label };

struct ColSpec {
    ColKind kind;
    int categories = 0;
};

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline ColSpec parse_col_spec(const std::string& tok, std::size_t col) {
    if (tok == "real") return {ColKind::real};
    if (tok == "label") return {ColKind::label};
    auto parse_k = [&](const std::string& prefix) -> int {
        if (tok.size() < prefix.size() + 3 || tok.compare(0, prefix.size(), prefix) != 0 ||
            tok[prefix.size()] != '(' || tok.back() != ')')
            return -1;
        std::string inner = tok.substr(prefix.size() + 1, tok.size() - prefix.size() - 2);
        try {
            std::size_t pos = 0;
            int k = std::stoi(inner, &pos);
            if (pos != inner.size() || k < 1) return -1;
            return k;
        } catch (...) {
            return -1;
        }
    };
    if (tok.rfind("ord", 0) == 0) {
        int k = parse_k("ord");
        if (k > 0) return {ColKind::ordinal, k};
    }
    if (tok.rfind("nom", 0) == 0) {
        int k = parse_k("nom");
        if (k > 0) return {ColKind::nominal, k};
    }
    throw IngestionError("bad column spec '" + tok + "' in column " + std::to_string(col + 1));
}

}  // namespace detail

// CSV with a mandatory schema header (`real`, `ord(K)`, `nom(K)`, `label`).
// Categorical values must be integers already encoded in [1, K]; labels are
// arbitrary tokens, relabeled 1..n in sorted order.
inline Dataset load_dataset_stream(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw IngestionError(name + ": empty file");
    auto specs_tok = detail::split_csv_line(line);
    std::vector<detail::ColSpec> specs;
    specs.reserve(specs_tok.size());
    int label_cols = 0;
    for (std::size_t c = 0; c < specs_tok.size(); ++c) {
        specs.push_back(detail::parse_col_spec(specs_tok[c], c));
        label_cols += specs.back().kind == detail::ColKind::label;
    }
    if (label_cols != 1) throw IngestionError(name + ": schema must declare exactly one label column");

    Dataset d;
    for (const auto& s : specs) {
        if (s.kind == detail::ColKind::real) ++d.landscape.ell;
        else if (s.kind == detail::ColKind::ordinal) d.landscape.omega_counts.push_back(s.categories);
        else if (s.kind == detail::ColKind::nominal) d.landscape.nu_counts.push_back(s.categories);
    }

    std::vector<std::string> raw_labels;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto toks = detail::split_csv_line(line);
        if (toks.size() != specs.size())
            throw IngestionError(name + ": row " + std::to_string(row) + " has " +
                                 std::to_string(toks.size()) + " fields, expected " +
                                 std::to_string(specs.size()));
        Example ex;
        for (std::size_t c = 0; c < specs.size(); ++c) {
            const auto& tok = toks[c];
            auto where = [&] { return name + ": row " + std::to_string(row) + ", column " + std::to_string(c + 1); };
            switch (specs[c].kind) {
                case detail::ColKind::real: {
                    try {
                        std::size_t pos = 0;
                        double v = std::stod(tok, &pos);
                        if (pos != tok.size() || !std::isfinite(v))
                            throw IngestionError(where() + ": non-numeric real value '" + tok + "'");
                        ex.reals.push_back(v);
                    } catch (const IngestionError&) {
                        throw;
                    } catch (...) {
                        throw IngestionError(where() + ": non-numeric real value '" + tok + "'");
                    }
                    break;
                }
                case detail::ColKind::ordinal:
                case detail::ColKind::nominal: {
                    int v = 0;
                    try {
                        std::size_t pos = 0;
                        v = std::stoi(tok, &pos);
                        if (pos != tok.size()) throw std::invalid_argument("");
                    } catch (...) {
                        throw IngestionError(where() + ": unknown category '" + tok + "'");
                    }
                    if (v < 1 || v > specs[c].categories)
                        throw IngestionError(where() + ": category " + tok + " outside [1," +
                                             std::to_string(specs[c].categories) + "]");
                    (specs[c].kind == detail::ColKind::ordinal ? ex.ordinals : ex.nominals).push_back(v);
                    break;
                }
                case detail::ColKind::label: {
                    if (tok.empty()) throw IngestionError(where() + ": missing label");
                    raw_labels.push_back(tok);
                    break;
                }
            }
        }
        d.examples.push_back(std::move(ex));
    }

    std::map<std::string, int> relabel;
    for (const auto& l : raw_labels) relabel.emplace(l, 0);
    int next = 1;
    for (auto& [tok, id] : relabel) id = next++;
    for (std::size_t i = 0; i < d.examples.size(); ++i) d.examples[i].label = relabel[raw_labels[i]];
    d.n_classes = next - 1;
    return d;
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError(path + ": cannot open file");
    return load_dataset_stream(in, path);
}

// SplitMix64: the shuffle PRNG. Fixed algorithm so splits are seed-stable
// across platforms and standard-library versions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform in [0, bound); modulo bias is negligible for bound << 2^64.
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

// Fisher-Yates under SplitMix64.
inline std::vector<std::size_t> shuffled_indices(std::size_t m, std::uint64_t seed) {
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    SplitMix64 rng(seed);
    for (std::size_t i = m; i-- > 1;) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

// Deterministic shuffle, train gets ceil(fraction*m) examples.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double train_fraction,
                                                 std::uint64_t seed) {
    if (d.examples.empty()) throw std::invalid_argument("split_dataset: empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split_dataset: train_fraction must be in (0,1)");
    std::size_t m = d.examples.size();
    auto idx = shuffled_indices(m, seed);
    auto train_size = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(m) - 1e-9));
    train_size = std::min(train_size, m);
    Dataset train{d.landscape, {}, d.n_classes};
    Dataset test{d.landscape, {}, d.n_classes};
    for (std::size_t i = 0; i < m; ++i)
        (i < train_size ? train : test).examples.push_back(d.examples[idx[i]]);
    return {std::move(train), std::move(test)};
}

// Distinct values actually used, component-wise <= the declared landscape.
inline FeatureLandscape empirical_landscape(const Dataset& d) {
    FeatureLandscape out;
    out.ell = d.landscape.ell;
    out.omega_counts.assign(d.landscape.omega_counts.size(), 0);
    out.nu_counts.assign(d.landscape.nu_counts.size(), 0);
    for (std::size_t i = 0; i < out.omega_counts.size(); ++i) {
        std::set<int> vals;
        for (const auto& ex : d.examples) vals.insert(ex.ordinals[i]);
        out.omega_counts[i] = static_cast<int>(vals.size());
    }
    for (std::size_t i = 0; i < out.nu_counts.size(); ++i) {
        std::set<int> vals;
        for (const auto& ex : d.examples) vals.insert(ex.nominals[i]);
        out.nu_counts[i] = static_cast<int>(vals.size());
    }
    return out;
}

}  // namespace treebound

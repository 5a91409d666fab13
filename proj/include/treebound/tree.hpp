#pragma once

#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "treebound/dataset.hpp"

namespace treebound {

// Feature-aligned split rules, "rule true => go left". A rule with the
// opposite routing sign is the same rule with its children swapped, so no
// sign parameter is carried.
struct DecisionRule {
    enum class Kind { threshold_real, threshold_ordinal, nominal_eq };
    Kind kind = Kind::threshold_real;
    int feature = 0;       // 0-based index within its feature type
    double threshold = 0;  // threshold_real
    int category = 0;      // threshold_ordinal theta, or nominal_eq category

    bool routes_left(const Example& x) const {
        switch (kind) {
            case Kind::threshold_real:
                if (feature < 0 || feature >= static_cast<int>(x.reals.size()))
                    throw std::out_of_range("DecisionRule: real feature index out of range");
                return x.reals[feature] <= threshold;
            case Kind::threshold_ordinal:
                if (feature < 0 || feature >= static_cast<int>(x.ordinals.size()))
                    throw std::out_of_range("DecisionRule: ordinal feature index out of range");
                return x.ordinals[feature] <= category;
            case Kind::nominal_eq:
                if (feature < 0 || feature >= static_cast<int>(x.nominals.size()))
                    throw std::out_of_range("DecisionRule: nominal feature index out of range");
                return x.nominals[feature] == category;
        }
        throw std::logic_error("DecisionRule: bad kind");
    }
};

// Structure-only skeleton of a tree class; a leaf has null children.
class TreeShape {
public:
    static TreeShape leaf() { return TreeShape(std::make_shared<const Node>()); }
    static TreeShape node(const TreeShape& l, const TreeShape& r) {
        auto n = std::make_shared<Node>();
        n->left = l.root_;
        n->right = r.root_;
        n->leaves = l.leaf_count() + r.leaf_count();
        return TreeShape(std::move(n));
    }

    bool is_leaf() const { return root_->left == nullptr; }
    int leaf_count() const { return root_->leaves; }
    TreeShape left() const { return TreeShape(root_->left); }
    TreeShape right() const { return TreeShape(root_->right); }

    int height() const { return height_of(root_.get()); }

    // Canonical text: "." for a leaf, "(L,R)" for a node. Doubles as the
    // structural-equality key and the cache digest.
    std::string to_string() const {
        std::string out;
        print(root_.get(), out);
        return out;
    }

    friend bool operator==(const TreeShape& a, const TreeShape& b) {
        return equal(a.root_.get(), b.root_.get());
    }

    static TreeShape parse(const std::string& spec) {
        std::size_t pos = 0;
        TreeShape s = parse_at(spec, pos);
        skip_ws(spec, pos);
        if (pos != spec.size()) throw std::invalid_argument("TreeShape::parse: trailing input");
        return s;
    }

    // Balanced shape with `leaves` = power of two.
    static TreeShape balanced(int leaves) {
        if (leaves < 1) throw std::invalid_argument("TreeShape::balanced: leaves >= 1");
        if (leaves == 1) return leaf();
        if (leaves % 2 != 0) throw std::invalid_argument("TreeShape::balanced: leaves must halve evenly");
        TreeShape half = balanced(leaves / 2);
        return node(half, half);
    }

    // Decision-list shape: d internal nodes, each with a leaf child and a
    // chain child, hence d+1 leaves.
    static TreeShape caterpillar(int internal_nodes) {
        TreeShape s = leaf();
        for (int i = 0; i < internal_nodes; ++i) s = node(leaf(), s);
        return s;
    }

private:
    struct Node {
        std::shared_ptr<const Node> left, right;
        int leaves = 1;
    };
    explicit TreeShape(std::shared_ptr<const Node> r) : root_(std::move(r)) {}

    static int height_of(const Node* n) {
        if (!n->left) return 0;
        return 1 + std::max(height_of(n->left.get()), height_of(n->right.get()));
    }
    static void print(const Node* n, std::string& out) {
        if (!n->left) {
            out.push_back('.');
            return;
        }
        out.push_back('(');
        print(n->left.get(), out);
        out.push_back(',');
        print(n->right.get(), out);
        out.push_back(')');
    }
    static bool equal(const Node* a, const Node* b) {
        if (a == b) return true;
        if ((a->left == nullptr) != (b->left == nullptr)) return false;
        if (!a->left) return true;
        if (a->leaves != b->leaves) return false;
        return equal(a->left.get(), b->left.get()) && equal(a->right.get(), b->right.get());
    }
    static void skip_ws(const std::string& s, std::size_t& pos) {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    static TreeShape parse_at(const std::string& s, std::size_t& pos) {
        skip_ws(s, pos);
        if (pos >= s.size()) throw std::invalid_argument("TreeShape::parse: unexpected end");
        if (s[pos] == '.') {
            ++pos;
            return leaf();
        }
        if (s[pos] != '(') throw std::invalid_argument("TreeShape::parse: expected '.' or '('");
        ++pos;
        TreeShape l = parse_at(s, pos);
        skip_ws(s, pos);
        if (pos >= s.size() || s[pos] != ',') throw std::invalid_argument("TreeShape::parse: expected ','");
        ++pos;
        TreeShape r = parse_at(s, pos);
        skip_ws(s, pos);
        if (pos >= s.size() || s[pos] != ')') throw std::invalid_argument("TreeShape::parse: expected ')'");
        ++pos;
        return node(l, r);
    }

    std::shared_ptr<const Node> root_;
};

// delta_lr of a shape's root: 1 iff left and right subtrees are structurally equal.
inline bool delta_lr(const TreeShape& s) {
    return !s.is_leaf() && s.left() == s.right();
}

// Immutable labeled decision tree; edits return new trees sharing structure.
class Tree {
public:
    static Tree leaf(int label) {
        auto n = std::make_shared<Node>();
        n->label = label;
        return Tree(std::move(n));
    }
    static Tree node(DecisionRule rule, const Tree& l, const Tree& r) {
        auto n = std::make_shared<Node>();
        n->rule = rule;
        n->left = l.root_;
        n->right = r.root_;
        n->leaves = l.leaf_count() + r.leaf_count();
        return Tree(std::move(n));
    }

    bool is_leaf() const { return root_->left == nullptr; }
    int label() const {
        if (!is_leaf()) throw std::logic_error("Tree::label on internal node");
        return root_->label;
    }
    const DecisionRule& rule() const {
        if (is_leaf()) throw std::logic_error("Tree::rule on leaf");
        return root_->rule;
    }
    Tree left() const { return Tree(root_->left); }
    Tree right() const { return Tree(root_->right); }
    int leaf_count() const { return root_->leaves; }
    int height() const { return height_of(root_.get()); }

    friend bool operator==(const Tree& a, const Tree& b) { return equal(a.root_.get(), b.root_.get()); }

    std::string to_string() const {
        std::ostringstream out;
        print(root_.get(), out);
        return out.str();
    }
    static Tree parse(const std::string& text) {
        std::istringstream in(text);
        Tree t = parse_stream(in);
        std::string rest;
        if (in >> rest) throw std::invalid_argument("Tree::parse: trailing input");
        return t;
    }

private:
    struct Node {
        DecisionRule rule;
        int label = 0;
        std::shared_ptr<const Node> left, right;
        int leaves = 1;
    };
    explicit Tree(std::shared_ptr<const Node> r) : root_(std::move(r)) {}

    static int height_of(const Node* n) {
        if (!n->left) return 0;
        return 1 + std::max(height_of(n->left.get()), height_of(n->right.get()));
    }
    static bool equal(const Node* a, const Node* b) {
        if (a == b) return true;
        if ((a->left == nullptr) != (b->left == nullptr)) return false;
        if (!a->left)
            return a->label == b->label;
        if (a->rule.kind != b->rule.kind || a->rule.feature != b->rule.feature) return false;
        if (a->rule.kind == DecisionRule::Kind::threshold_real) {
            if (a->rule.threshold != b->rule.threshold) return false;
        } else if (a->rule.category != b->rule.category) {
            return false;
        }
        return equal(a->left.get(), b->left.get()) && equal(a->right.get(), b->right.get());
    }
    static void print(const Node* n, std::ostringstream& out) {
        if (!n->left) {
            out << "(leaf " << n->label << ")";
            return;
        }
        out << "(node ";
        switch (n->rule.kind) {
            case DecisionRule::Kind::threshold_real: {
                std::ostringstream t;
                t.precision(17);
                t << n->rule.threshold;
                out << "(real " << n->rule.feature << " " << t.str() << ")";
                break;
            }
            case DecisionRule::Kind::threshold_ordinal:
                out << "(ord " << n->rule.feature << " " << n->rule.category << ")";
                break;
            case DecisionRule::Kind::nominal_eq:
                out << "(nom " << n->rule.feature << " " << n->rule.category << ")";
                break;
        }
        out << " ";
        print(n->left.get(), out);
        out << " ";
        print(n->right.get(), out);
        out << ")";
    }
    static Tree parse_stream(std::istream& in) {
        // token-level parse built on '(' / ')' separation
        std::string tok = read_tok(in);
        if (tok != "(") throw std::invalid_argument("Tree::parse: expected '('");
        tok = read_tok(in);
        if (tok == "leaf") {
            int label = std::stoi(read_tok(in));
            if (read_tok(in) != ")") throw std::invalid_argument("Tree::parse: expected ')'");
            return Tree::leaf(label);
        }
        if (tok != "node") throw std::invalid_argument("Tree::parse: expected 'leaf' or 'node'");
        if (read_tok(in) != "(") throw std::invalid_argument("Tree::parse: expected rule");
        std::string kind = read_tok(in);
        DecisionRule rule;
        rule.feature = std::stoi(read_tok(in));
        if (kind == "real") {
            rule.kind = DecisionRule::Kind::threshold_real;
            rule.threshold = std::stod(read_tok(in));
        } else if (kind == "ord") {
            rule.kind = DecisionRule::Kind::threshold_ordinal;
            rule.category = std::stoi(read_tok(in));
        } else if (kind == "nom") {
            rule.kind = DecisionRule::Kind::nominal_eq;
            rule.category = std::stoi(read_tok(in));
        } else {
            throw std::invalid_argument("Tree::parse: bad rule kind '" + kind + "'");
        }
        if (read_tok(in) != ")") throw std::invalid_argument("Tree::parse: expected ')'");
        Tree l = parse_stream(in);
        Tree r = parse_stream(in);
        if (read_tok(in) != ")") throw std::invalid_argument("Tree::parse: expected ')'");
        return Tree::node(rule, l, r);
    }
    static std::string read_tok(std::istream& in) {
        int c;
        while ((c = in.get()) != EOF && (c == ' ' || c == '\n' || c == '\t' || c == '\r')) {
        }
        if (c == EOF) throw std::invalid_argument("Tree::parse: unexpected end");
        if (c == '(' || c == ')') return std::string(1, static_cast<char>(c));
        std::string tok(1, static_cast<char>(c));
        while ((c = in.peek()) != EOF && c != ' ' && c != '\n' && c != '\t' && c != '\r' &&
               c != '(' && c != ')')
            tok.push_back(static_cast<char>(in.get()));
        return tok;
    }

    std::shared_ptr<const Node> root_;
};

inline int predict(const Tree& t, const Example& x) {
    Tree cur = t;
    while (!cur.is_leaf()) cur = cur.rule().routes_left(x) ? cur.left() : cur.right();
    return cur.label();
}

inline TreeShape shape_of(const Tree& t) {
    if (t.is_leaf()) return TreeShape::leaf();
    return TreeShape::node(shape_of(t.left()), shape_of(t.right()));
}

// Node paths are left/right strings from the root ("" = root, "LR" = root's
// left child's right child).
using NodePath = std::string;

inline Tree subtree_at(const Tree& t, const NodePath& path) {
    Tree cur = t;
    for (char c : path) {
        if (cur.is_leaf()) throw std::invalid_argument("node path descends through a leaf");
        if (c == 'L') cur = cur.left();
        else if (c == 'R') cur = cur.right();
        else throw std::invalid_argument("node path must consist of 'L' and 'R'");
    }
    return cur;
}

// Example indices (into s.examples) routed to the node at `path`.
inline std::vector<std::size_t> examples_reaching(const Tree& t, const Dataset& s,
                                                  const NodePath& path) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.examples.size(); ++i) {
        Tree cur = t;
        bool reached = true;
        for (char c : path) {
            if (cur.is_leaf()) throw std::invalid_argument("node path descends through a leaf");
            bool goes_left = cur.rule().routes_left(s.examples[i]);
            if ((c == 'L') != goes_left) {
                reached = false;
                break;
            }
            cur = c == 'L' ? cur.left() : cur.right();
        }
        if (reached) out.push_back(i);
    }
    return out;
}

// Majority label over a subset; ties broken by the smallest class index.
inline int majority_label(const Dataset& s, const std::vector<std::size_t>& subset, int n_classes) {
    if (subset.empty()) throw std::invalid_argument("majority_label: empty subset");
    std::vector<int> counts(n_classes + 1, 0);
    for (auto i : subset) ++counts[s.examples[i].label];
    int best = 1;
    for (int a = 2; a <= n_classes; ++a)
        if (counts[a] > counts[best]) best = a;
    return best;
}

enum class PruneMode { replace_with_left, replace_with_right, replace_with_leaf };

namespace detail {

inline Tree rebuild_with(const Tree& t, const NodePath& path, std::size_t depth, const Tree& repl) {
    if (depth == path.size()) return repl;
    if (t.is_leaf()) throw std::invalid_argument("node path descends through a leaf");
    if (path[depth] == 'L')
        return Tree::node(t.rule(), rebuild_with(t.left(), path, depth + 1, repl), t.right());
    return Tree::node(t.rule(), t.left(), rebuild_with(t.right(), path, depth + 1, repl));
}

}  // namespace detail

// Replace the subtree at an internal node by its left child, its right child,
// or a majority leaf over the examples of `sample` reaching the node.
inline Tree prune_edit(const Tree& t, const NodePath& path, PruneMode mode,
                       const Dataset* sample = nullptr) {
    Tree target = subtree_at(t, path);
    if (target.is_leaf()) throw std::invalid_argument("prune_edit: path addresses a leaf");
    Tree repl = target;
    switch (mode) {
        case PruneMode::replace_with_left:
            repl = target.left();
            break;
        case PruneMode::replace_with_right:
            repl = target.right();
            break;
        case PruneMode::replace_with_leaf: {
            if (!sample) throw std::invalid_argument("prune_edit: replace_with_leaf needs a sample");
            auto reaching = examples_reaching(t, *sample, path);
            repl = Tree::leaf(majority_label(*sample, reaching, sample->n_classes));
            break;
        }
    }
    return detail::rebuild_with(t, path, 0, repl);
}

// Caterpillar shape isolating the subset reaching the node at `path`:
// d internal nodes for a depth-d path, hence d+1 leaves.
inline TreeShape path_shape(const Tree& t, const NodePath& path) {
    subtree_at(t, path);  // validates the path
    return TreeShape::caterpillar(static_cast<int>(path.size()));
}

// All internal-node paths of t, in preorder.
inline std::vector<NodePath> internal_paths(const Tree& t) {
    std::vector<NodePath> out;
    struct Walk {
        std::vector<NodePath>& out;
        void operator()(const Tree& n, const NodePath& p) const {
            if (n.is_leaf()) return;
            out.push_back(p);
            (*this)(n.left(), p + "L");
            (*this)(n.right(), p + "R");
        }
    };
    Walk{out}(t, "");
    return out;
}

}  // namespace treebound

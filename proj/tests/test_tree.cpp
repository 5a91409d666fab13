#include <doctest.h>

#include "treebound/tree.hpp"

using namespace treebound;

namespace {

DecisionRule real_rule(int feature, double theta) {
    DecisionRule r;
    r.kind = DecisionRule::Kind::threshold_real;
    r.feature = feature;
    r.threshold = theta;
    return r;
}

DecisionRule nom_rule(int feature, int category) {
    DecisionRule r;
    r.kind = DecisionRule::Kind::nominal_eq;
    r.feature = feature;
    r.category = category;
    return r;
}

Example ex_real(std::vector<double> reals) { return {std::move(reals), {}, {}, 0}; }

Dataset tiny_sample() {
    Dataset d;
    d.landscape.ell = 1;
    d.n_classes = 2;
    d.examples = {{{0.1}, {}, {}, 1}, {{0.2}, {}, {}, 1}, {{0.9}, {}, {}, 2}};
    return d;
}

}  // namespace

TEST_CASE("predict routes by rule semantics") {
    CHECK(predict(Tree::leaf(2), ex_real({123.0})) == 2);

    Tree stump = Tree::node(real_rule(0, 0.5), Tree::leaf(1), Tree::leaf(2));
    CHECK(predict(stump, ex_real({0.3})) == 1);
    CHECK(predict(stump, ex_real({0.5})) == 1);  // <= goes left
    CHECK(predict(stump, ex_real({0.7})) == 2);

    Tree nom = Tree::node(nom_rule(0, 3), Tree::leaf(1), Tree::leaf(2));
    Example e;
    e.nominals = {2};
    CHECK(predict(nom, e) == 2);
    e.nominals = {3};
    CHECK(predict(nom, e) == 1);

    CHECK_THROWS(predict(stump, Example{}));  // feature index out of range
}

TEST_CASE("shape_of and delta_lr") {
    CHECK(shape_of(Tree::leaf(1)).leaf_count() == 1);
    CHECK(shape_of(Tree::leaf(1)).to_string() == ".");

    Tree stump = Tree::node(real_rule(0, 0.5), Tree::leaf(1), Tree::leaf(2));
    CHECK(shape_of(stump).to_string() == "(.,.)");
    CHECK(shape_of(stump).leaf_count() == 2);
    CHECK(delta_lr(shape_of(stump)));

    // left caterpillar of depth 3: 4 leaves, asymmetric root
    Tree cat = Tree::node(real_rule(0, 3.0),
                          Tree::node(real_rule(0, 2.0),
                                     Tree::node(real_rule(0, 1.0), Tree::leaf(1), Tree::leaf(2)),
                                     Tree::leaf(1)),
                          Tree::leaf(2));
    auto shape = shape_of(cat);
    CHECK(shape.leaf_count() == 4);
    CHECK_FALSE(delta_lr(shape));
    CHECK(shape.height() == 3);

    // mirror trees have equal shapes only when symmetric
    TreeShape sym = TreeShape::node(TreeShape::node(TreeShape::leaf(), TreeShape::leaf()),
                                    TreeShape::node(TreeShape::leaf(), TreeShape::leaf()));
    CHECK(delta_lr(sym));
}

TEST_CASE("shape parse round-trips") {
    for (const char* spec : {".", "(.,.)", "((.,.),.)", "((.,.),(.,.))", "(((.,.),.),(.,.))"}) {
        CHECK(TreeShape::parse(spec).to_string() == spec);
    }
    CHECK_THROWS(TreeShape::parse("(.,"));
    CHECK_THROWS(TreeShape::parse("(.,.))"));
    CHECK(TreeShape::balanced(8).leaf_count() == 8);
    CHECK(TreeShape::caterpillar(3).to_string() == "(.,(.,(.,.)))");
}

TEST_CASE("tree serialization round-trips") {
    Tree t = Tree::node(real_rule(1, 0.625),
                        Tree::node(nom_rule(0, 2), Tree::leaf(3), Tree::leaf(1)), Tree::leaf(2));
    Tree back = Tree::parse(t.to_string());
    CHECK(back == t);
    CHECK(back.to_string() == t.to_string());

    DecisionRule ord;
    ord.kind = DecisionRule::Kind::threshold_ordinal;
    ord.feature = 2;
    ord.category = 4;
    Tree t2 = Tree::node(ord, Tree::leaf(1), t);
    CHECK(Tree::parse(t2.to_string()) == t2);
}

TEST_CASE("prune_edit modes") {
    Dataset s = tiny_sample();
    Tree stump = Tree::node(real_rule(0, 0.5), Tree::leaf(1), Tree::leaf(2));

    Tree leafed = prune_edit(stump, "", PruneMode::replace_with_leaf, &s);
    CHECK(leafed.is_leaf());
    CHECK(leafed.label() == 1);  // labels {1,1,2} -> majority 1

    CHECK(prune_edit(stump, "", PruneMode::replace_with_left) == Tree::leaf(1));
    CHECK(prune_edit(stump, "", PruneMode::replace_with_right) == Tree::leaf(2));

    // input tree unmodified
    CHECK(stump.leaf_count() == 2);

    // internal node at depth 2 of a 5-leaf tree -> 4-leaf tree
    Tree five = Tree::node(
        real_rule(0, 4.0),
        Tree::node(real_rule(0, 2.0), Tree::leaf(1),
                   Tree::node(real_rule(0, 3.0), Tree::leaf(2), Tree::leaf(1))),
        Tree::node(real_rule(0, 5.0), Tree::leaf(2), Tree::leaf(1)));
    CHECK(five.leaf_count() == 5);
    Tree four = prune_edit(five, "LR", PruneMode::replace_with_right);
    CHECK(four.leaf_count() == 4);
    CHECK(five.leaf_count() == 5);

    CHECK_THROWS(prune_edit(five, "LL", PruneMode::replace_with_left));   // leaf
    CHECK_THROWS(prune_edit(five, "XX", PruneMode::replace_with_left));   // bad path
    CHECK_THROWS(prune_edit(five, "RRR", PruneMode::replace_with_left));  // beyond tree
}

TEST_CASE("prune_edit strictly decreases leaf count") {
    Dataset s = tiny_sample();
    Tree t = Tree::node(real_rule(0, 0.5),
                        Tree::node(real_rule(0, 0.15), Tree::leaf(1), Tree::leaf(2)),
                        Tree::leaf(2));
    for (const auto& path : internal_paths(t))
        for (PruneMode mode :
             {PruneMode::replace_with_left, PruneMode::replace_with_right, PruneMode::replace_with_leaf})
            CHECK(prune_edit(t, path, mode, &s).leaf_count() < t.leaf_count());
}

TEST_CASE("path_shape builds caterpillars") {
    Tree t = Tree::node(real_rule(0, 0.5),
                        Tree::node(real_rule(0, 0.2), Tree::leaf(1), Tree::leaf(2)), Tree::leaf(2));
    CHECK(path_shape(t, "").to_string() == ".");
    CHECK(path_shape(t, "L").leaf_count() == 2);
    CHECK(path_shape(t, "L").to_string() == "(.,.)");

    Tree deep = Tree::node(real_rule(0, 3.0), Tree::leaf(1),
                           Tree::node(real_rule(0, 2.0), Tree::leaf(1),
                                      Tree::node(real_rule(0, 1.0), Tree::leaf(1),
                                                 Tree::node(real_rule(0, 0.5), Tree::leaf(1),
                                                            Tree::leaf(2)))));
    auto p3 = path_shape(deep, "RRR");
    CHECK(p3.leaf_count() == 4);
    CHECK(p3.height() == 3);
    CHECK_THROWS(path_shape(deep, "LL"));
}

TEST_CASE("majority ties break to the smallest class") {
    Dataset d;
    d.landscape.ell = 1;
    d.n_classes = 3;
    d.examples = {{{0.0}, {}, {}, 3}, {{0.0}, {}, {}, 2}, {{0.0}, {}, {}, 2}, {{0.0}, {}, {}, 3}};
    CHECK(majority_label(d, {0, 1, 2, 3}, 3) == 2);
}

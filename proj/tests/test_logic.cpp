#include "doctest.h"

#include "hypergame/error.hpp"
#include "hypergame/logic.hpp"
#include "hypergame/model.hpp"
#include "random_instances.hpp"

#include <random>

using namespace hypergame;

TEST_CASE("parse example formulas")
{
    auto lookahead = load_hyperltl(HG_FIXTURES "/lookahead.hltl");
    REQUIRE(lookahead.size() == 2);
    CHECK(lookahead.prefix[0] == QuantifiedVar{Quantifier::Exists, "p1"});
    CHECK(lookahead.prefix[1] == QuantifiedVar{Quantifier::Forall, "p2"});
    CHECK(to_string(lookahead.body) == "(X X X a[p1] <-> X X a[p2])");
    CHECK(indexed_aps(lookahead.body) == std::vector<IndexedAp>{{"a", "p1"}, {"a", "p2"}});

    auto od = load_hyperltl(HG_FIXTURES "/observational_determinism.hltl");
    CHECK(od.prefix[0].quantifier == Quantifier::Forall);
    CHECK(od.prefix[1].quantifier == Quantifier::Forall);
    CHECK(indexed_aps(od.body) ==
          std::vector<IndexedAp>{{"l", "p1"}, {"l", "p2"}, {"o", "p1"}, {"o", "p2"}});
    CHECK(od.body->op == Op::Implies);

    auto agree = load_hyperltl(HG_FIXTURES "/predict_and_agree.hltl");
    CHECK(agree.size() == 4);
    CHECK(agree.body->op == Op::And);

    CHECK(indexed_aps(parse_ltl("true")).empty());
}

TEST_CASE("parser details")
{
    CHECK(to_string(parse_ltl("GF a[p]")) == "G F a[p]");
    CHECK(to_string(parse_ltl("a[p] U b[p] U c[p]")) == "(a[p] U (b[p] U c[p]))");
    CHECK(to_string(parse_ltl("a[p] -> b[p] -> c[p]")) == "(a[p] -> (b[p] -> c[p]))");
    CHECK(to_string(parse_ltl("a[p] || b[p] && c[p]")) == "(a[p] || (b[p] && c[p]))");
    CHECK(to_string(parse_ltl("!X a[p] R b[p]")) == "(!X a[p] R b[p])");
    CHECK(to_string(parse_ltl("X[p] && G[q]")) == "(X[p] && G[q])");
    CHECK_THROWS_AS(parse_ltl("a[p] &&"), ParseError);
    CHECK_THROWS_AS(parse_ltl("(a[p]"), ParseError);
    CHECK_THROWS_AS(parse_hyperltl("forall p. a[q]"), ValidationError);
    CHECK_THROWS_AS(parse_hyperltl("forall p. exists p. a[p]"), ValidationError);
    CHECK_THROWS_AS(parse_hyperltl("forall p a[p]"), ParseError);
}

TEST_CASE("printing round trips")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        auto f = testing::random_body(rng, {"a", "b"}, {"p1", "p2"}, 3);
        CHECK(same_formula(parse_ltl(to_string(f)), f));
        auto n = nnf(f);
        CHECK(same_formula(parse_ltl(to_string(n)), n));
    }
}

TEST_CASE("negation")
{
    auto f = parse_hyperltl("forall p1. exists p2. G (a[p1] -> F a[p2])");
    auto g = negate_hyperltl(f);
    CHECK(g.prefix[0] == QuantifiedVar{Quantifier::Exists, "p1"});
    CHECK(g.prefix[1] == QuantifiedVar{Quantifier::Forall, "p2"});
    CHECK(to_string(g.body) == "F (a[p1] && G !a[p2])");

    auto h = negate_hyperltl(parse_hyperltl("exists p1. exists p2. a[p1] U a[p2]"));
    CHECK(h.prefix[0].quantifier == Quantifier::Forall);
    CHECK(h.prefix[1].quantifier == Quantifier::Forall);
    CHECK(to_string(h.body) == "(!a[p1] R !a[p2])");

    auto twice = negate_hyperltl(negate_hyperltl(f));
    CHECK(twice.prefix == f.prefix);
    CHECK(same_formula(nnf(twice.body), twice.body));
}

TEST_CASE("evaluator")
{
    std::vector<std::string> aps{"a"};
    UpWord all_a{{}, {1}}, none{{}, {0}};
    CHECK(eval_body_on_lassos(parse_ltl("G a[p1]"), aps, {{"p1", all_a}}));
    CHECK_FALSE(eval_body_on_lassos(parse_ltl("F a[p1]"), aps, {{"p1", none}}));

    auto lookahead = load_hyperltl(HG_FIXTURES "/lookahead.hltl");
    UpWord t1{{0, 0, 0}, {1}}, t2{{0, 0}, {1}};
    // positions 3 on p1 and 2 on p2 both carry a
    CHECK(eval_body_on_lassos(lookahead.body, aps, {{"p1", t1}, {"p2", t2}}));
    CHECK_FALSE(eval_body_on_lassos(lookahead.body, aps, {{"p1", t2}, {"p2", UpWord{{0, 0, 0}, {1}}}}));

    CHECK_THROWS_AS(eval_body_on_lassos(lookahead.body, aps, {{"p1", t1}}), ValidationError);

    UpWord alt{{}, {1, 0}};
    CHECK(eval_body_on_lassos(parse_ltl("G F a[p1]"), aps, {{"p1", alt}}));
    CHECK_FALSE(eval_body_on_lassos(parse_ltl("F G a[p1]"), aps, {{"p1", alt}}));
    CHECK(eval_body_on_lassos(parse_ltl("G (a[p1] <-> X !a[p1])"), aps, {{"p1", alt}}));
    CHECK(eval_body_on_lassos(parse_ltl("!a[p1] U a[p1]"), aps, {{"p1", UpWord{{0, 0}, {1}}}}));
    CHECK_FALSE(eval_body_on_lassos(parse_ltl("!a[p1] U a[p1]"), aps, {{"p1", none}}));
    CHECK(eval_body_on_lassos(parse_ltl("a[p1] R !a[p1]"), aps, {{"p1", none}}));
}

namespace
{

// Direct unrolling: beyond stem + loop positions the suffixes repeat, so
// Until only needs to look that far ahead.
bool naive(const FormulaPtr& f, const std::vector<IndexedAp>& alpha, const UpWord& w, std::size_t i)
{
    const std::size_t horizon = w.stem.size() + w.loop.size();
    auto norm = [&](std::size_t k) {
        return k < w.stem.size() ? k : w.stem.size() + (k - w.stem.size()) % w.loop.size();
    };
    i = norm(i);
    switch (f->op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: {
        for (std::size_t j = 0; j < alpha.size(); ++j)
            if (alpha[j].ap == f->ap && alpha[j].var == f->var)
                return ((w.at(i) >> j) & 1U) != 0;
        return false;
    }
    case Op::Not: return !naive(f->lhs, alpha, w, i);
    case Op::And: return naive(f->lhs, alpha, w, i) && naive(f->rhs, alpha, w, i);
    case Op::Or: return naive(f->lhs, alpha, w, i) || naive(f->rhs, alpha, w, i);
    case Op::Implies: return !naive(f->lhs, alpha, w, i) || naive(f->rhs, alpha, w, i);
    case Op::Iff: return naive(f->lhs, alpha, w, i) == naive(f->rhs, alpha, w, i);
    case Op::Next: return naive(f->lhs, alpha, w, i + 1);
    case Op::Until:
        for (std::size_t k = i; k < i + horizon; ++k) {
            if (naive(f->rhs, alpha, w, k))
                return true;
            if (!naive(f->lhs, alpha, w, k))
                return false;
        }
        return false;
    case Op::Release: return !naive(until(lnot(f->lhs), lnot(f->rhs)), alpha, w, i);
    case Op::Eventually: return naive(until(make_true(), f->lhs), alpha, w, i);
    case Op::Globally: return !naive(eventually(lnot(f->lhs)), alpha, w, i);
    }
    return false;
}

} // namespace

TEST_CASE("evaluator agrees with direct unrolling and negation duality")
{
    std::mt19937_64 rng(11);
    std::vector<std::string> aps{"a", "b"};
    for (int i = 0; i < 300; ++i) {
        auto f = testing::random_body(rng, aps, {"p1", "p2"}, 3);
        std::map<std::string, UpWord> env{{"p1", testing::random_word(rng, 2, 3, 3)},
                                          {"p2", testing::random_word(rng, 2, 3, 3)}};
        auto alpha = indexed_aps(f);
        auto word = zip_traces(alpha, aps, env);
        bool v = eval_body_on_lassos(f, aps, env);
        CHECK(v == naive(f, alpha, word, 0));
        CHECK(v == !eval_body_on_lassos(nnf(lnot(f)), aps, env));
        CHECK(v == eval_body_on_lassos(nnf(f), aps, env));
        auto g = parse_hyperltl("forall p1. exists p2. " + to_string(f));
        CHECK(v == !eval_body_on_lassos(negate_hyperltl(g).body, aps, env));
        CHECK(v == eval_body_on_lassos(negate_hyperltl(negate_hyperltl(g)).body, aps, env));
    }
}

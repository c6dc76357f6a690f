#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "strmach/builtins.hpp"
#include "strmach/transducer.hpp"

using namespace strmach;

namespace {

bool morphisms_equal(const StateMorphism& a, const StateMorphism& b) {
    if (!(*a.source == *b.source) || !(*a.target == *b.target)) return false;
    if (a.transition != b.transition) return false;
    for (Nat x = 0; x < a.outputs.size(); ++x)
        for (Nat j = 0; j < a.outputs[x].size(); ++j)
            if (!FreeTerm::structurally_equal(a.outputs[x][j], b.outputs[x][j])) return false;
    return true;
}

std::vector<std::string> all_words(Nat max_len) {
    std::vector<std::string> words{""};
    std::vector<std::string> frontier{""};
    for (Nat l = 0; l < max_len; ++l) {
        std::vector<std::string> next;
        for (const auto& w : frontier)
            for (char c : {'a', 'b'}) next.push_back(w + c);
        words.insert(words.end(), next.begin(), next.end());
        frontier = next;
    }
    return words;
}

std::vector<std::string> word_of(const Transducer& t, const BaseMorphism& m) {
    return flatten_word(std::get<TapeTerm>(m), t.output_cat.tape_cat()).value();
}

}  // namespace

TEST_CASE("the strip transducer validates") {
    auto t = strip_transducer(fixtures::abr_category(), "a", "r");
    CHECK(validate_transducer(*t).ok);
    CHECK(t->state_image->states.size() == 3);
}

TEST_CASE("filtered-functor bound violations are reported") {
    auto cat = fixtures::ab_category();
    BaseCategory base = BaseCategory::tape_base(cat);
    auto states = mk_state_object(base, {"q"}, {VarContext{}});
    Transducer t;
    t.name = "overweight";
    t.input_cat = cat;
    t.output_cat = base;
    t.state_image = states;
    for (const auto& g : cat->generators)
        t.generator_images.emplace(g.name, mk_state_morphism(states, states, 2, {0}, {{}}));
    auto report = validate_transducer(t);
    CHECK_FALSE(report.ok);
    CHECK(report.joined().find("FilteredFunctorViolation") != std::string::npos);
}

TEST_CASE("output prefix violations are reported") {
    auto cat = fixtures::ab_category();
    BaseCategory base = BaseCategory::tape_base(cat);
    auto states = mk_state_object(base, {"q"}, {VarContext{}});
    Transducer t;
    t.name = "no_output_var";
    t.input_cat = cat;
    t.output_cat = base;
    t.output_signatures = {TapePortSig{"X", 1, 1}};
    t.state_image = states;
    for (const auto& g : cat->generators)
        t.generator_images.emplace(g.name, mk_state_morphism(states, states, 0, {0}, {{}}));
    auto report = validate_transducer(t);
    CHECK_FALSE(report.ok);
    CHECK(report.joined().find("PrefixViolation") != std::string::npos);
}

TEST_CASE("functor image of the identity is the identity") {
    auto t = strip_transducer(fixtures::abr_category(), "a", "r");
    auto image = functor_image(*t, TapeTerm::id(1));
    CHECK(image.degree == 0);
    CHECK(morphisms_equal(image, identity_state_morphism(t->state_image)));
}

TEST_CASE("the filtered bound holds on functor images") {
    auto abr = fixtures::abr_category();
    auto t = strip_transducer(abr, "a", "r");
    for (const auto& w : all_words(5)) {
        TapeTerm term = encode_word(w, *abr);
        CHECK(functor_image(*t, term).degree <= term_degree(term, *abr));
    }
}

TEST_CASE("product factorizations agree in both orders") {
    auto abr = fixtures::abr_category();
    auto t = strip_transducer(abr, "a", "r");
    for (const auto& u : all_words(3)) {
        for (const auto& v : all_words(3)) {
            TapeTerm tu = encode_word(u, *abr);
            TapeTerm tv = encode_word(v, *abr);
            StateMorphism direct = functor_image(*t, TapeTerm::par(tu, tv));
            StateMorphism left_first = compose_state(
                functor_image(*t, TapeTerm::par(TapeTerm::id(1), tv)),
                functor_image(*t, TapeTerm::par(tu, TapeTerm::id(1))));
            StateMorphism right_first = compose_state(
                functor_image(*t, TapeTerm::par(tu, TapeTerm::id(1))),
                functor_image(*t, TapeTerm::par(TapeTerm::id(1), tv)));
            CHECK(morphisms_equal(direct, left_first));
            CHECK(morphisms_equal(direct, right_first));
        }
    }
}

TEST_CASE("strip transducer evaluation") {
    auto abr = fixtures::abr_category();
    auto t = strip_transducer(abr, "a", "r");
    std::vector<BaseMorphism> aux{TapeTerm::id(1)};

    auto starts_with_a = evaluate_transducer(*t, "q0", encode_word("ab", *abr), aux);
    CHECK(starts_with_a.output_state == "acc");
    CHECK(word_of(*t, starts_with_a.outputs[0]) == std::vector<std::string>{"b"});
    CHECK(starts_with_a.primary_degree_consumed == 2);

    auto mismatch = evaluate_transducer(*t, "q0", encode_word("ba", *abr), aux);
    CHECK(mismatch.output_state == "rej");
    CHECK(word_of(*t, mismatch.outputs[0]) == std::vector<std::string>{"r"});

    auto empty = evaluate_transducer(*t, "q0", TapeTerm::id(1), aux);
    CHECK(empty.output_state == "q0");
    CHECK(word_of(*t, empty.outputs[0]).empty());

    // longer aux lists are truncated to the variable prefix
    auto extras = evaluate_transducer(*t, "q0", encode_word("a", *abr),
                                      {TapeTerm::id(1), encode_word("b", *abr)});
    CHECK(extras.output_state == "acc");
    CHECK_THROWS_AS(evaluate_transducer(*t, "q0", encode_word("a", *abr), {}), EvaluationError);
}

TEST_CASE("staged evaluation matches whole-word evaluation") {
    auto abr = fixtures::abr_category();
    auto t = strip_transducer(abr, "b", "r");
    for (const auto& u : all_words(3)) {
        for (const auto& v : all_words(3)) {
            std::vector<BaseMorphism> aux{TapeTerm::id(1)};
            auto whole = evaluate_transducer(*t, "q0", encode_word(u + v, *abr), aux);
            auto first = evaluate_transducer(*t, "q0", encode_word(u, *abr), aux);
            auto second =
                evaluate_transducer(*t, first.output_state, encode_word(v, *abr), first.outputs);
            CHECK(whole.output_state == second.output_state);
            CHECK(word_of(*t, whole.outputs[0]) == word_of(*t, second.outputs[0]));
        }
    }
}

TEST_CASE("DFA embedding runs like the DFA") {
    auto ab = fixtures::ab_category();
    Dfa dfa = fixtures::even_a_dfa();
    auto t = dfa_transducer(dfa, ab);
    CHECK(validate_transducer(*t).ok);
    for (const auto& w : all_words(5)) {
        auto result = evaluate_transducer(*t, dfa.start, encode_word(w, *ab), {});
        bool accepted = result.output_state == "even";
        CHECK(accepted == oracles::run_dfa(dfa, w));
    }

    Dfa partial = dfa;
    partial.transition["even"].erase("b");
    CHECK_THROWS_WITH_AS(dfa_transducer(partial, ab), doctest::Contains("PartialTransition"),
                         ValidationError);

    Dfa trivial;
    trivial.name = "all";
    trivial.states = {"s"};
    trivial.start = "s";
    trivial.accepting = {"s"};
    trivial.transition["s"]["a"] = "s";
    trivial.transition["s"]["b"] = "s";
    auto t2 = dfa_transducer(trivial, ab);
    for (const auto& w : all_words(4))
        CHECK(evaluate_transducer(*t2, "s", encode_word(w, *ab), {}).output_state == "s");
}

TEST_CASE("fixture transducers validate") {
    CHECK(validate_transducer(*fixtures::pass_transducer(fixtures::ab_category())).ok);
    CHECK(validate_transducer(*fixtures::duplicator_transducer(fixtures::ab_category())).ok);
    CHECK(validate_transducer(*fixtures::constant_output_transducer(fixtures::abr_category())).ok);
    CHECK(validate_transducer(
              *prepend_builder_transducer(fixtures::abr_category(), "r"))
              .ok);
}

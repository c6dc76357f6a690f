#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "strmach/tape.hpp"

using namespace strmach;

namespace {
const TapeCategory& ab() { return *fixtures::ab_category(); }
}

TEST_CASE("category construction validates generators") {
    CHECK_NOTHROW(mk_tape_category("X", {{"a", 1, 1, 1}, {"b", 1, 1, 1}}));
    CHECK_NOTHROW(mk_tape_category("M", {{"f", 2, 1, 1}}));
    CHECK_THROWS_WITH_AS(mk_tape_category("Z", {{"z", 1, 1, 0}}),
                         doctest::Contains("ZeroDegreeGenerator"), ValidationError);
    CHECK_THROWS_WITH_AS(mk_tape_category("D", {{"a", 1, 1, 1}, {"a", 1, 1, 2}}),
                         doctest::Contains("DuplicateGenerator"), ValidationError);
}

TEST_CASE("term signatures") {
    auto a = TapeTerm::gen("a"), b = TapeTerm::gen("b");
    CHECK(term_signature(TapeTerm::seq(a, b), ab()) == TermSignature{1, 1});
    CHECK(term_signature(TapeTerm::par(a, b), ab()) == TermSignature{2, 2});
    CHECK(term_signature(TapeTerm::seq(TapeTerm::copy(), TapeTerm::par(a, a)), ab()) ==
          TermSignature{1, 2});
    CHECK_THROWS_AS(term_signature(TapeTerm::seq(TapeTerm::copy(), a), ab()), IllTypedError);
    CHECK_THROWS_AS(term_signature(TapeTerm::gen("z"), ab()), UnknownGeneratorError);
}

TEST_CASE("term degree counts generators only") {
    CHECK(term_degree(encode_word("aba", ab()), ab()) == 3);
    CHECK(term_degree(TapeTerm::id(1), ab()) == 0);
    auto t = TapeTerm::seq(TapeTerm::copy(), TapeTerm::par(TapeTerm::gen("a"), TapeTerm::discard()));
    CHECK(term_degree(t, ab()) == 1);
}

TEST_CASE("word encoding") {
    CHECK(encode_word("", ab()) == TapeTerm::id(1));
    CHECK(encode_word("ab", ab()) == TapeTerm::seq(TapeTerm::gen("a"), TapeTerm::gen("b")));
    CHECK(term_signature(encode_word("aba", ab()), ab()) == TermSignature{1, 1});
    CHECK_THROWS_AS(encode_word("az", ab()), UnknownGeneratorError);
    auto merge = mk_tape_category("M", {{"f", 2, 1, 1}});
    CHECK_THROWS_WITH_AS(encode_word("f", merge), doctest::Contains("NonEndomorphism"),
                         ValidationError);
}

TEST_CASE("degree is exactly additive over composition and product") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> len(0, 6);
    auto word = [&] {
        std::string w;
        for (int i = len(rng); i > 0; --i) w += (rng() & 1) ? 'a' : 'b';
        return encode_word(w, ab());
    };
    for (int i = 0; i < 200; ++i) {
        TapeTerm f = word(), g = word();
        CHECK(term_degree(TapeTerm::seq(f, g), ab()) ==
              term_degree(f, ab()) + term_degree(g, ab()));
        CHECK(term_degree(TapeTerm::par(f, g), ab()) ==
              term_degree(f, ab()) + term_degree(g, ab()));
    }
}

TEST_CASE("flattening inverts encoding on plain words") {
    auto letters = flatten_word(encode_word("abba", ab()), ab());
    REQUIRE(letters.has_value());
    CHECK(*letters == std::vector<std::string>{"a", "b", "b", "a"});
    CHECK(flatten_word(TapeTerm::id(1), ab())->empty());
    CHECK(flatten_word(TapeTerm::seq(TapeTerm::id(1), TapeTerm::gen("b")), ab()).value() ==
          std::vector<std::string>{"b"});
    CHECK_FALSE(flatten_word(TapeTerm::par(TapeTerm::gen("a"), TapeTerm::gen("b")), ab()));
    CHECK_FALSE(flatten_word(TapeTerm::copy(), ab()));
}

TEST_CASE("term grammar parses and prints") {
    CHECK(parse_term("a ; b", ab()) == TapeTerm::seq(TapeTerm::gen("a"), TapeTerm::gen("b")));
    // ';' binds looser than '*'
    CHECK(parse_term("a ; b * b", ab()) ==
          TapeTerm::seq(TapeTerm::gen("a"), TapeTerm::par(TapeTerm::gen("b"), TapeTerm::gen("b"))));
    CHECK(parse_term("(a ; b) * b", ab()) ==
          TapeTerm::par(TapeTerm::seq(TapeTerm::gen("a"), TapeTerm::gen("b")), TapeTerm::gen("b")));
    CHECK(parse_term("id 2", ab()) == TapeTerm::id(2));
    CHECK(parse_term("copy ; a * discard", ab()) ==
          TapeTerm::seq(TapeTerm::copy(), TapeTerm::par(TapeTerm::gen("a"), TapeTerm::discard())));
    CHECK_THROWS_AS(parse_term("a ;", ab()), IllTypedError);
    CHECK_THROWS_AS(parse_term("q", ab()), UnknownGeneratorError);

    for (const char* text : {"a ; b ; a", "copy ; a * b", "(a ; b) * (b ; a)", "swap ; a * b",
                             "id 1", "a * b ; swap"}) {
        std::string once = term_to_string(parse_term(text, ab()));
        CHECK(term_to_string(parse_term(once, ab())) == once);
    }
}

#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "strmach/statecat.hpp"

using namespace strmach;

namespace {

struct Setup {
    std::shared_ptr<const TapeCategory> cat = fixtures::ab_category();
    BaseCategory base = BaseCategory::tape_base(cat);
    PortSig endo = TapePortSig{"X", 1, 1};

    StateObjectPtr object(std::vector<std::string> states,
                          std::vector<std::vector<Degree2>> degrees) const {
        std::vector<VarContext> vars;
        for (auto& row : degrees) {
            VarContext ctx;
            for (auto d : row) ctx.push_back(VarDecl{endo, d});
            vars.push_back(std::move(ctx));
        }
        return mk_state_object(base, std::move(states), std::move(vars));
    }
};

bool morphisms_equal(const StateMorphism& a, const StateMorphism& b) {
    if (!(*a.source == *b.source) || !(*a.target == *b.target)) return false;
    if (a.transition != b.transition) return false;
    for (Nat x = 0; x < a.outputs.size(); ++x) {
        if (a.outputs[x].size() != b.outputs[x].size()) return false;
        for (Nat j = 0; j < a.outputs[x].size(); ++j)
            if (!FreeTerm::structurally_equal(a.outputs[x][j], b.outputs[x][j])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("degree-bound validation") {
    Setup s;
    auto a = s.object({"x"}, {{{1, 0}}});

    CHECK(validate_state_morphism(identity_state_morphism(a)).ok);

    // doubling a (1,0) variable under ell = 0 exceeds the linear bound
    auto v = FreeTerm::var(s.base, a->vars[0], 0);
    auto bad = mk_state_morphism_unchecked(a, a, 0, {0}, {{FreeTerm::seq(v, v)}});
    auto report = validate_state_morphism(bad);
    CHECK_FALSE(report.ok);
    CHECK(report.joined().find("(2,0)") != std::string::npos);
    CHECK_THROWS_AS(mk_state_morphism(a, a, 0, {0}, {{FreeTerm::seq(v, v)}}), ValidationError);

    // a degree-3 constant fits a (0,5) variable at ell = 0
    auto heavy = std::make_shared<const TapeCategory>(
        mk_tape_category("X", {{"a", 1, 1, 1}, {"b", 1, 1, 1}, {"g", 1, 1, 3}}));
    BaseCategory hbase = BaseCategory::tape_base(heavy);
    auto c = mk_state_object(hbase, {"x"}, {{VarDecl{TapePortSig{"X", 1, 1}, Degree2{0, 5}}}});
    CHECK_NOTHROW(mk_state_morphism(
        c, c, 0, {0}, {{FreeTerm::lift(hbase, c->vars[0], TapeTerm::gen("g"))}}));
}

TEST_CASE("composition adds degrees and stays valid") {
    Setup s;
    fixtures::RandomMorphisms gen(99);
    for (int i = 0; i < 50; ++i) {
        auto [f, g] = gen.random_composable_pair();
        StateMorphism gf = compose_state(g, f);
        CHECK(gf.degree == f.degree + g.degree);
        CHECK(validate_state_morphism(gf).ok);
    }
}

TEST_CASE("composition with the identity is neutral") {
    Setup s;
    fixtures::RandomMorphisms gen(5);
    for (int i = 0; i < 20; ++i) {
        auto [f, g] = gen.random_composable_pair();
        (void)g;
        CHECK(morphisms_equal(compose_state(identity_state_morphism(f.target), f), f));
        CHECK(morphisms_equal(compose_state(f, identity_state_morphism(f.source)), f));
    }
}

TEST_CASE("composition is associative") {
    fixtures::RandomMorphisms gen(17);
    for (int i = 0; i < 30; ++i) {
        auto a = gen.random_object();
        auto b = gen.random_object();
        auto c = gen.random_object();
        auto d = gen.random_object();
        auto f = gen.random_morphism(a, b);
        auto g = gen.random_morphism(b, c);
        auto h = gen.random_morphism(c, d);
        CHECK(morphisms_equal(compose_state(h, compose_state(g, f)),
                              compose_state(compose_state(h, g), f)));
    }
}

TEST_CASE("object mismatch is rejected") {
    fixtures::RandomMorphisms gen(3);
    Setup s;
    auto a = s.object({"x"}, {{{1, 0}}});
    auto b = s.object({"x", "y"}, {{}, {}});
    auto f = identity_state_morphism(a);
    auto g = identity_state_morphism(b);
    CHECK_THROWS_WITH_AS(compose_state(g, f), doctest::Contains("ObjectMismatch"), IllTypedError);
}

TEST_CASE("tensor multiplies state spaces and concatenates variables") {
    Setup s;
    auto a = s.object({"x0", "x1"}, {{{1, 0}}, {{1, 0}}});
    auto b = s.object({"y0", "y1", "y2"}, {{{1, 1}, {2, 0}}, {}, {{1, 0}}});
    auto ab = tensor_state(a, b);
    CHECK(ab->states.size() == 6);
    CHECK(ab->states[0] == "x0|y0");
    CHECK(ab->vars_at(0).size() == 3);
    CHECK(ab->vars_at(0)[1].degree == Degree2{1, 1});

    auto unit = unit_state_object(s.base);
    CHECK(*tensor_state(a, unit) == *a);
    CHECK(*tensor_state(unit, a) == *a);
    CHECK(*tensor_state(unit, unit) == *unit);
}

TEST_CASE("copy duplicates states and variables") {
    Setup s;
    auto a = s.object({"x"}, {{{1, 0}}});
    auto copy = copy_state_morphism(a);
    CHECK(copy.degree == 0);
    CHECK(copy.target->states[0] == "x|x");
    REQUIRE(copy.outputs[0].size() == 2);
    CHECK(FreeTerm::structurally_equal(copy.outputs[0][0], FreeTerm::var(s.base, a->vars[0], 0)));
    CHECK(FreeTerm::structurally_equal(copy.outputs[0][1], FreeTerm::var(s.base, a->vars[0], 0)));
    CHECK(validate_state_morphism(copy).ok);

    auto plain = s.object({"x", "y"}, {{}, {}});
    auto dup = copy_state_morphism(plain);
    CHECK(dup.target->states.size() == 4);
    CHECK(dup.target->states[dup.transition[1]] == "y|y");
}

TEST_CASE("application substitutes stored values") {
    Setup s;
    auto a = s.object({"x"}, {{{1, 0}}});

    auto store = mk_var_store(a, "x", {encode_word("a", *s.cat)});
    auto unchanged = apply_state_morphism(identity_state_morphism(a), store);
    CHECK(base_morphism_equal(unchanged.values[0], store.values[0]));

    // append through a base generator: a |-> ab
    auto term = FreeTerm::seq(FreeTerm::var(s.base, a->vars[0], 0),
                              FreeTerm::lift(s.base, a->vars[0], TapeTerm::gen("b")));
    auto appender = mk_state_morphism(a, a, 1, {0}, {{term}});
    auto after = apply_state_morphism(appender, store);
    CHECK(base_morphism_equal(after.values[0], BaseMorphism{encode_word("ab", *s.cat)}));

    // transition-only morphism between variable-free objects
    auto plain = s.object({"p", "q"}, {{}, {}});
    auto move = mk_state_morphism(plain, plain, 0, {1, 0}, {{}, {}});
    auto moved = apply_state_morphism(move, mk_var_store(plain, "p", {}));
    CHECK(moved.object->states[moved.state] == "q");
    CHECK(moved.values.empty());

    CHECK_THROWS_AS(apply_state_morphism(appender, mk_var_store(plain, "p", {})),
                    EvaluationError);
}

TEST_CASE("evaluation commutes with composition") {
    Setup s;
    fixtures::RandomMorphisms gen(41);
    std::mt19937 rng(4);
    auto word_of = [&](Nat max) {
        std::string w;
        Nat len = std::uniform_int_distribution<Nat>(0, max)(rng);
        for (Nat i = 0; i < len; ++i) w += (rng() & 1) ? 'a' : 'b';
        return encode_word(w, *s.cat);
    };
    for (int i = 0; i < 60; ++i) {
        auto [f, g] = gen.random_composable_pair();
        Nat x = std::uniform_int_distribution<Nat>(0, f.source->states.size() - 1)(rng);
        std::vector<BaseMorphism> values;
        for (Nat j = 0; j < f.source->vars_at(x).size(); ++j) values.push_back(word_of(3));
        VarStore store = mk_var_store(f.source, f.source->states[x], values);

        VarStore staged = apply_state_morphism(g, apply_state_morphism(f, store));
        VarStore direct = apply_state_morphism(compose_state(g, f), store);
        CHECK(staged.state == direct.state);
        REQUIRE(staged.values.size() == direct.values.size());
        for (Nat j = 0; j < staged.values.size(); ++j)
            CHECK(base_morphism_equal(staged.values[j], direct.values[j]));
    }
}

TEST_CASE("tensor respects application") {
    Setup s;
    fixtures::RandomMorphisms gen(77);
    std::mt19937 rng(8);
    for (int i = 0; i < 40; ++i) {
        auto a = gen.random_object();
        auto b = gen.random_object();
        auto c = gen.random_object();
        auto d = gen.random_object();
        auto f = gen.random_morphism(a, c);
        auto g = gen.random_morphism(b, d);
        auto fg = tensor_state_morphism(f, g);

        Nat xa = std::uniform_int_distribution<Nat>(0, a->states.size() - 1)(rng);
        Nat xb = std::uniform_int_distribution<Nat>(0, b->states.size() - 1)(rng);
        std::vector<BaseMorphism> va, vb;
        for (Nat j = 0; j < a->vars_at(xa).size(); ++j) va.push_back(encode_word("a", *s.cat));
        for (Nat j = 0; j < b->vars_at(xb).size(); ++j) vb.push_back(encode_word("b", *s.cat));

        VarStore ra = apply_state_morphism(f, mk_var_store(a, a->states[xa], va));
        VarStore rb = apply_state_morphism(g, mk_var_store(b, b->states[xb], vb));

        std::vector<BaseMorphism> paired = va;
        paired.insert(paired.end(), vb.begin(), vb.end());
        auto source = tensor_state(a, b);
        std::string paired_state = is_unit_like(*a)   ? b->states[xb]
                                   : is_unit_like(*b) ? a->states[xa]
                                                      : a->states[xa] + "|" + b->states[xb];
        VarStore rab = apply_state_morphism(fg, mk_var_store(source, paired_state, paired));

        std::string expect_state = is_unit_like(*c)   ? d->states[rb.state]
                                   : is_unit_like(*d) ? c->states[ra.state]
                                                      : c->states[ra.state] + "|" +
                                                            d->states[rb.state];
        CHECK(rab.object->states[rab.state] == expect_state);
        REQUIRE(rab.values.size() == ra.values.size() + rb.values.size());
        for (Nat j = 0; j < ra.values.size(); ++j)
            CHECK(base_morphism_equal(rab.values[j], ra.values[j]));
        for (Nat j = 0; j < rb.values.size(); ++j)
            CHECK(base_morphism_equal(rab.values[ra.values.size() + j], rb.values[j]));
    }
}

TEST_CASE("inferred minimal degree") {
    Setup s;
    auto a = s.object({"x"}, {{{1, 0}}});
    CHECK(inferred_min_degree(identity_state_morphism(a)) == 0);

    auto term = FreeTerm::seq(FreeTerm::var(s.base, a->vars[0], 0),
                              FreeTerm::lift(s.base, a->vars[0], TapeTerm::gen("b")));
    auto appender = mk_state_morphism(a, a, 3, {0}, {{term}});
    CHECK(inferred_min_degree(appender) == 1);

    auto v = FreeTerm::var(s.base, a->vars[0], 0);
    auto bad = mk_state_morphism_unchecked(a, a, 0, {0}, {{FreeTerm::seq(v, v)}});
    CHECK_FALSE(inferred_min_degree(bad).has_value());
}

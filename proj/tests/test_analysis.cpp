#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "strmach/analysis.hpp"

using namespace strmach;

namespace {

// Transducer with declared variable degrees at two chained states, for
// pinning the output-degree formula.
TransducerPtr two_degree_transducer(Degree2 first, Degree2 second) {
    auto cat = fixtures::ab_category();
    BaseCategory base = BaseCategory::tape_base(cat);
    PortSig sig = TapePortSig{"X", 1, 1};
    auto states = mk_state_object(base, {"q0", "q1"},
                                  {{VarDecl{sig, first}}, {VarDecl{sig, second}}});
    Transducer t;
    t.name = "two_degree";
    t.input_cat = cat;
    t.output_cat = base;
    t.aux_signatures = {sig};
    t.output_signatures = {sig};
    t.state_image = states;
    t.initial_state = "q0";
    for (const auto& g : cat->generators) {
        std::vector<std::vector<FreeTerm>> outputs{
            {FreeTerm::var(base, states->vars[0], 0)},
            {FreeTerm::var(base, states->vars[1], 0)}};
        t.generator_images.emplace(
            g.name, mk_state_morphism(states, states, g.degree, {1, 1}, std::move(outputs)));
    }
    return mk_transducer(std::move(t));
}

}  // namespace

TEST_CASE("output-degree triples follow the formula") {
    // a_min = 1, a'_max = 2, b'_max = 3
    CHECK(output_degree(*two_degree_transducer({1, 0}, {2, 3}), 0) ==
          OutputDegreeTriple{2, 2, 3});
    // a_min = 2, a'_max = 2, b'_max = 0
    CHECK(output_degree(*two_degree_transducer({2, 0}, {2, 0}), 0) ==
          OutputDegreeTriple{2, 1, 0});
    // identity-like: all variables (1,0)
    CHECK(output_degree(*fixtures::pass_transducer(fixtures::ab_category()), 0) ==
          OutputDegreeTriple{1, 1, 0});
}

TEST_CASE("zero linear input variables violate the precondition") {
    CHECK_THROWS_WITH_AS(output_degree(*two_degree_transducer({0, 1}, {1, 0}), 0),
                         doctest::Contains("ZeroLinearInputVariable"), ValidationError);
}

TEST_CASE("duplication stays within the bound") {
    auto strip = strip_transducer(fixtures::abr_category(), "a", "r");
    DuplicationReport r = check_duplication(*strip, 6);
    CHECK(r.ok());
    CHECK(r.bound == 1);
    CHECK(r.max_observed == 1);

    auto dup = fixtures::duplicator_transducer(fixtures::ab_category());
    DuplicationReport d = check_duplication(*dup, 6);
    CHECK(d.ok());
    CHECK(d.bound == 2);
    CHECK(d.max_observed == 2);  // the doubling step realizes the bound

    auto dfa = dfa_transducer(fixtures::even_a_dfa(), fixtures::ab_category());
    DuplicationReport n = check_duplication(*dfa, 5);
    CHECK(n.ok());
    CHECK(n.max_observed == 0);
}

TEST_CASE("serial and parallel sweeps produce identical reports") {
    auto dup = fixtures::duplicator_transducer(fixtures::ab_category());
    DuplicationReport serial = check_duplication(*dup, 6, Exec::Serial);
    DuplicationReport parallel = check_duplication(*dup, 6, Exec::Parallel);
    CHECK(serial.max_observed == parallel.max_observed);
    CHECK(serial.checked_inputs == parallel.checked_inputs);
    CHECK(serial.violations == parallel.violations);

    OutputBoundReport s2 = check_output_bound(*dup, 5, Exec::Serial);
    OutputBoundReport p2 = check_output_bound(*dup, 5, Exec::Parallel);
    CHECK(s2.checked == p2.checked);
    CHECK(s2.equality_hits == p2.equality_hits);
    CHECK(s2.violations == p2.violations);
}

TEST_CASE("output degrees respect the linear bound") {
    auto strip = strip_transducer(fixtures::abr_category(), "a", "r");
    OutputBoundReport r = check_output_bound(*strip, 6);
    CHECK(r.ok());
    CHECK(r.checked > 0);

    auto dup = fixtures::duplicator_transducer(fixtures::ab_category());
    OutputBoundReport d = check_output_bound(*dup, 6);
    CHECK(d.ok());
    CHECK(d.equality_hits > 0);  // tight at (2,2,0)

    auto constant = fixtures::constant_output_transducer(fixtures::abr_category());
    OutputBoundReport c = check_output_bound(*constant, 5);
    CHECK(c.ok());
}

TEST_CASE("constant-output transducers emit a fixed degree") {
    auto abr = fixtures::abr_category();
    auto constant = fixtures::constant_output_transducer(abr);
    for (const std::string& w : {"a", "ab", "bba", "abab"}) {
        auto result = evaluate_transducer(*constant, "q", encode_word(w, *abr),
                                          {TapeTerm::id(1)});
        CHECK(term_degree(std::get<TapeTerm>(result.outputs[0]), *abr) == 1);
    }
}

TEST_CASE("static IPD bounds dominate measured IPD") {
    auto abr = fixtures::abr_category();
    auto ab = fixtures::ab_category();

    MachinePtr single = machine_from_transducer(strip_transducer(abr, "a", "r"), "single");
    LinearBound b1 = ipd_linear_bound(*single);
    CHECK(b1.slope == 1);
    CHECK(b1.offset == 0);

    auto p1 = machine_from_transducer(fixtures::pass_transducer(ab), "p1");
    auto p2 = machine_from_transducer(fixtures::pass_transducer(ab), "p2");
    MachinePtr chain = wire_machines(*p1, *p2, {MergePair{0, 0, 1, 0}}, "chain");
    LinearBound b2 = ipd_linear_bound(*chain);
    CHECK(b2.slope == 2);

    auto d1 = machine_from_transducer(fixtures::duplicator_transducer(ab), "d1");
    MachinePtr dup_chain = wire_machines(*d1, *p2, {MergePair{0, 0, 1, 0}}, "dup_chain");
    LinearBound b3 = ipd_linear_bound(*dup_chain);
    CHECK(b3.slope == 3);

    for (Nat n = 1; n <= 20; ++n) {
        std::string word(n, 'a');
        Nat measured = ipd(run_machine_on_word(*dup_chain, *ab, word).trace);
        CHECK(measured <= b3.slope * n + b3.offset);
    }
}

TEST_CASE("family growth: pass-through stays linear") {
    auto ab = fixtures::ab_category();
    FamilySpec f;
    f.name = "pass";
    f.base = fixtures::pass_transducer(ab);
    f.stages = {FamilyStage{std::nullopt, f.base, {1, 0, 0}}};
    FamilyReport r = family_growth(f, 20, *ab, "abab");
    CHECK(r.expansion_stages == 0);
    for (const auto& row : r.rows) CHECK(row.ipd_value == 4 * row.n);
    CHECK(r.rows[4].has_ratio);
    CHECK(r.rows[4].doubling_ratio == doctest::Approx(2.0));
    CHECK(r.fitted_exponent == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("family growth: doubling explodes") {
    auto ab = fixtures::ab_category();
    FamilySpec f;
    f.name = "doubling";
    f.base = fixtures::duplicator_transducer(ab);
    f.stages = {FamilyStage{std::nullopt, f.base, {2, 0, 0}}};
    FamilyReport r = family_growth(f, 8, *ab, "a");
    CHECK(r.expansion_stages == 7);
    // IPD_N = 2^N - 1 for a degree-1 word
    for (const auto& row : r.rows) CHECK(row.ipd_value == (Nat(1) << row.n) - 1);
    for (Nat n = 1; n + 1 <= r.rows.size(); ++n)
        if (n + 1 <= 8)
            CHECK(double(r.rows[n].ipd_value) / double(r.rows[n - 1].ipd_value) >= 1.9);
}

TEST_CASE("family growth: one doubling stage doubles the slope") {
    auto ab = fixtures::ab_category();
    FamilySpec f;
    f.name = "one_double";
    f.base = fixtures::pass_transducer(ab);
    f.stages = {FamilyStage{2, fixtures::duplicator_transducer(ab), {2, 0, 0}},
                FamilyStage{std::nullopt, fixtures::pass_transducer(ab), {1, 0, 0}}};
    FamilyReport r = family_growth(f, 12, *ab, "a");
    // the doubling stage receives degree 1, every pass after it degree 2:
    // IPD_N = 1 + 1 + 2(N-2) = 2N - 2
    CHECK(r.rows[0].ipd_value == 1);
    for (Nat n = 2; n <= 12; ++n) CHECK(r.rows[n - 1].ipd_value == 2 * n - 2);
    CHECK(r.expansion_stages == 1);
}

TEST_CASE("understated family declarations are refused") {
    auto ab = fixtures::ab_category();
    FamilySpec f;
    f.name = "lying";
    f.base = fixtures::duplicator_transducer(ab);
    f.stages = {FamilyStage{std::nullopt, f.base, {1, 0, 0}}};
    CHECK_THROWS_WITH_AS(family_growth(f, 4, *ab, "a"),
                         doctest::Contains("DeclaredParametersTooSmall"), ValidationError);
}

TEST_CASE("incremental sessions track states in constant space") {
    auto ab = fixtures::ab_category();
    auto t = dfa_transducer(fixtures::mod3_dfa(), ab);
    IncrementalSession session(t, "s0");
    CHECK(session.footprint() == 3);

    Nat footprint_after_first = 0;
    for (int i = 0; i < 1000; ++i) {
        session.apply(inc_post_compose(encode_word("a", *ab)));
        if (i == 0) footprint_after_first = session.footprint();
    }
    CHECK(session.footprint() == footprint_after_first);
    CHECK(session.operations() == 1000);
    // 1000 a's from s0: 1000 mod 3 = 1
    CHECK(session.state() == "s1");
}

TEST_CASE("incremental sessions agree with full re-evaluation") {
    auto ab = fixtures::ab_category();
    auto t = dfa_transducer(fixtures::mod3_dfa(), ab);
    std::mt19937 rng(2024);
    auto random_word = [&](Nat max_len) {
        std::string w;
        Nat len = std::uniform_int_distribution<Nat>(0, max_len)(rng);
        for (Nat i = 0; i < len; ++i) w += (rng() & 1) ? 'a' : 'b';
        return w;
    };
    for (int trial = 0; trial < 25; ++trial) {
        IncrementalSession session(t, "s0");
        std::vector<IncOp> ops;
        for (int step = 0; step < 25; ++step) {
            IncOp op = [&]() -> IncOp {
                switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
                    case 0: return inc_replace(encode_word(random_word(4), *ab));
                    case 1: return inc_post_compose(encode_word(random_word(4), *ab));
                    default:
                        return inc_pre_post_compose(encode_word(random_word(4), *ab),
                                                    encode_word(random_word(4), *ab));
                }
            }();
            ops.push_back(op);
            session.apply(op);
            CHECK(session.state() == oracles::full_reeval(*t, "s0", ops));
        }
        CHECK(session.footprint() == 3);
    }
}

TEST_CASE("branch operations split and merge correctly") {
    auto t = fixtures::branching_state_transducer();
    const TapeCategory& cat = *t->input_cat;
    std::mt19937 rng(5150);
    auto random_word = [&](Nat max_len) {
        std::string w;
        Nat len = std::uniform_int_distribution<Nat>(0, max_len)(rng);
        for (Nat i = 0; i < len; ++i) w += (rng() & 1) ? 'a' : 'b';
        return w;
    };
    for (int trial = 0; trial < 25; ++trial) {
        IncrementalSession session(t, "s0");
        std::vector<IncOp> ops;
        for (int step = 0; step < 15; ++step) {
            IncOp op = [&]() -> IncOp {
                switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
                    case 0: return inc_post_compose(encode_word(random_word(3), cat));
                    case 1: {
                        bool hole_left = rng() & 1;
                        std::vector<std::optional<TapeTerm>> branches(2);
                        branches[hole_left ? 1 : 0] = encode_word(random_word(3), cat);
                        return inc_branch(TapeTerm::gen("s"), std::move(branches),
                                          TapeTerm::gen("m"));
                    }
                    default:
                        return inc_pre_post_compose(encode_word(random_word(3), cat),
                                                    encode_word(random_word(3), cat));
                }
            }();
            ops.push_back(op);
            session.apply(op);
            CHECK(session.state() == oracles::full_reeval(*t, "s0", ops));
        }
        CHECK(session.footprint() == 3);
    }

    IncrementalSession session(t, "s0");
    std::vector<std::optional<TapeTerm>> two_holes(2);
    CHECK_THROWS_WITH_AS(
        session.apply(inc_branch(TapeTerm::gen("s"), std::move(two_holes), TapeTerm::gen("m"))),
        doctest::Contains("MultipleGeneratorOccurrences"), EvaluationError);
}

TEST_CASE("residual probe counts Myhill-Nerode classes") {
    auto ab = fixtures::ab_category();

    MachinePtr even = intersection_chain({fixtures::even_a_dfa()}, ab, "even");
    CHECK(residual_probe(*even, *ab, 4) == 2);

    MachinePtr chain =
        intersection_chain({fixtures::even_a_dfa(), fixtures::ends_b_dfa()}, ab, "both");
    Nat at4 = residual_probe(*chain, *ab, 4);
    Nat at6 = residual_probe(*chain, *ab, 6);
    CHECK(at4 <= 4);
    CHECK(at6 <= 4);
    CHECK(at4 == at6);  // stabilized

    CHECK(residual_probe(*chain, *ab, 5, Exec::Serial) ==
          residual_probe(*chain, *ab, 5, Exec::Parallel));

    auto abr = fixtures::abr_category();
    MachinePtr pal = palindrome_machine(abr, "r");
    CHECK_THROWS_WITH_AS(residual_probe(*pal, *abr, 4),
                         doctest::Contains("MetaVertexPresent"), EvaluationError);
}

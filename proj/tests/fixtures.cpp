#include "fixtures.hpp"

#include <algorithm>

namespace strmach::fixtures {

std::shared_ptr<const TapeCategory> ab_category() {
    static const auto cat =
        std::make_shared<const TapeCategory>(alphabet_category("X", "ab"));
    return cat;
}

std::shared_ptr<const TapeCategory> abr_category() {
    static const auto cat =
        std::make_shared<const TapeCategory>(alphabet_category("X", "abr"));
    return cat;
}

TransducerPtr pass_transducer(std::shared_ptr<const TapeCategory> cat) {
    BaseCategory base = BaseCategory::tape_base(cat);
    PortSig sig = TapePortSig{cat->name, 1, 1};
    StateObjectPtr states = mk_state_object(base, {"q"}, {{VarDecl{sig, Degree2{1, 0}}}});

    Transducer t;
    t.name = "pass";
    t.input_cat = cat;
    t.output_cat = base;
    t.aux_signatures = {sig};
    t.output_signatures = {sig};
    t.state_image = states;
    t.initial_state = "q";
    for (const auto& g : cat->generators) {
        std::vector<std::vector<FreeTerm>> outputs{{FreeTerm::seq(
            FreeTerm::var(base, states->vars[0], 0),
            FreeTerm::lift(base, states->vars[0], TapeTerm::gen(g.name)))}};
        t.generator_images.emplace(
            g.name, mk_state_morphism(states, states, g.degree, {0}, std::move(outputs)));
    }
    return mk_transducer(std::move(t));
}

TransducerPtr duplicator_transducer(std::shared_ptr<const TapeCategory> cat) {
    BaseCategory base = BaseCategory::tape_base(cat);
    PortSig sig = TapePortSig{cat->name, 1, 1};
    StateObjectPtr states = mk_state_object(
        base, {"q0", "q1"},
        {{VarDecl{sig, Degree2{1, 0}}}, {VarDecl{sig, Degree2{2, 0}}}});

    Transducer t;
    t.name = "duplicator";
    t.input_cat = cat;
    t.output_cat = base;
    t.aux_signatures = {sig};
    t.output_signatures = {sig};
    t.state_image = states;
    t.initial_state = "q0";
    for (const auto& g : cat->generators) {
        auto gen = [&](Nat state) {
            return FreeTerm::lift(base, states->vars[state], TapeTerm::gen(g.name));
        };
        auto var = [&](Nat state) { return FreeTerm::var(base, states->vars[state], 0); };
        // q0: double the stored value, then append the character twice
        FreeTerm from_q0 = FreeTerm::seq(
            FreeTerm::seq(FreeTerm::seq(var(0), var(0)), gen(0)), gen(0));
        // q1: append the character twice
        FreeTerm from_q1 = FreeTerm::seq(FreeTerm::seq(var(1), gen(1)), gen(1));
        t.generator_images.emplace(
            g.name,
            mk_state_morphism(states, states, g.degree, {1, 1},
                              {{std::move(from_q0)}, {std::move(from_q1)}}));
    }
    return mk_transducer(std::move(t));
}

TransducerPtr constant_output_transducer(std::shared_ptr<const TapeCategory> cat_with_r) {
    BaseCategory base = BaseCategory::tape_base(cat_with_r);
    PortSig sig = TapePortSig{cat_with_r->name, 1, 1};
    StateObjectPtr states =
        mk_state_object(base, {"q"}, {{VarDecl{sig, Degree2{1, 0}}}});

    Transducer t;
    t.name = "constant";
    t.input_cat = cat_with_r;
    t.output_cat = base;
    t.aux_signatures = {sig};
    t.output_signatures = {sig};
    t.state_image = states;
    t.initial_state = "q";
    for (const auto& g : cat_with_r->generators) {
        std::vector<std::vector<FreeTerm>> outputs{
            {FreeTerm::lift(base, states->vars[0], TapeTerm::gen("r"))}};
        t.generator_images.emplace(
            g.name, mk_state_morphism(states, states, g.degree, {0}, std::move(outputs)));
    }
    return mk_transducer(std::move(t));
}

Dfa even_a_dfa() {
    Dfa dfa;
    dfa.name = "evenA";
    dfa.states = {"even", "odd"};
    dfa.start = "even";
    dfa.accepting = {"even"};
    dfa.transition["even"]["a"] = "odd";
    dfa.transition["even"]["b"] = "even";
    dfa.transition["odd"]["a"] = "even";
    dfa.transition["odd"]["b"] = "odd";
    return dfa;
}

Dfa ends_b_dfa() {
    Dfa dfa;
    dfa.name = "endsB";
    dfa.states = {"no", "yes"};
    dfa.start = "no";
    dfa.accepting = {"yes"};
    dfa.transition["no"]["a"] = "no";
    dfa.transition["no"]["b"] = "yes";
    dfa.transition["yes"]["a"] = "no";
    dfa.transition["yes"]["b"] = "yes";
    return dfa;
}

Dfa mod3_dfa() {
    Dfa dfa;
    dfa.name = "mod3";
    dfa.states = {"s0", "s1", "s2"};
    dfa.start = "s0";
    dfa.accepting = {"s0"};
    dfa.transition["s0"]["a"] = "s1";
    dfa.transition["s1"]["a"] = "s2";
    dfa.transition["s2"]["a"] = "s0";
    dfa.transition["s0"]["b"] = "s0";
    dfa.transition["s1"]["b"] = "s2";
    dfa.transition["s2"]["b"] = "s1";
    return dfa;
}

TransducerPtr branching_state_transducer() {
    auto cat = std::make_shared<const TapeCategory>(mk_tape_category(
        "B", {{"a", 1, 1, 1}, {"b", 1, 1, 1}, {"s", 1, 2, 1}, {"m", 2, 1, 1}}));
    BaseCategory base = BaseCategory::tape_base(cat);
    auto states = mk_state_object(base, {"s0", "s1", "s2"}, {{}, {}, {}});
    auto pair_obj = tensor_state(states, states);

    Transducer t;
    t.name = "branchy";
    t.input_cat = cat;
    t.output_cat = base;
    t.state_image = states;
    t.initial_state = "s0";

    auto endo = [&](std::vector<Nat> map) {
        return mk_state_morphism(states, states, 0, std::move(map),
                                 std::vector<std::vector<FreeTerm>>(3));
    };
    t.generator_images.emplace("a", endo({1, 2, 0}));
    t.generator_images.emplace("b", endo({0, 2, 1}));

    // s: X -> X^2, thread the state into both components with a twist
    std::vector<Nat> split(3);
    for (Nat i = 0; i < 3; ++i)
        split[i] = pair_obj->index_of(states->states[i] + "|" + states->states[(i + 1) % 3]);
    t.generator_images.emplace(
        "s", mk_state_morphism(states, pair_obj, 1, std::move(split),
                               std::vector<std::vector<FreeTerm>>(3)));

    // m: X^2 -> X, sum of component indices
    std::vector<Nat> merge(9);
    for (Nat i = 0; i < 3; ++i)
        for (Nat j = 0; j < 3; ++j)
            merge[pair_obj->index_of(states->states[i] + "|" + states->states[j])] = (i + j) % 3;
    t.generator_images.emplace(
        "m", mk_state_morphism(pair_obj, states, 1, std::move(merge),
                               std::vector<std::vector<FreeTerm>>(9)));
    return mk_transducer(std::move(t));
}

RandomMorphisms::RandomMorphisms(unsigned seed)
    : rng_(seed), cat_(ab_category()), base_(BaseCategory::tape_base(cat_)) {}

Nat RandomMorphisms::pick(Nat lo, Nat hi) {
    return std::uniform_int_distribution<Nat>(lo, hi)(rng_);
}

StateObjectPtr RandomMorphisms::random_object() {
    Nat n_states = pick(1, 3);
    std::vector<std::string> states;
    std::vector<VarContext> vars;
    PortSig sig = TapePortSig{cat_->name, 1, 1};
    for (Nat i = 0; i < n_states; ++i) {
        states.push_back("s" + std::to_string(i));
        VarContext ctx;
        Nat n_vars = pick(0, 2);
        for (Nat v = 0; v < n_vars; ++v)
            ctx.push_back(VarDecl{sig, Degree2{pick(1, 2), pick(0, 2)}});
        vars.push_back(std::move(ctx));
    }
    return mk_state_object(base_, std::move(states), std::move(vars));
}

StateMorphism RandomMorphisms::random_morphism(const StateObjectPtr& source,
                                               const StateObjectPtr& target) {
    Nat ell = pick(0, 3);
    std::vector<Nat> transition;
    std::vector<std::vector<FreeTerm>> outputs;
    for (Nat x = 0; x < source->states.size(); ++x) {
        Nat y = pick(0, target->states.size() - 1);
        transition.push_back(y);
        const VarContext& src_vars = source->vars_at(x);
        std::vector<FreeTerm> row;
        for (const VarDecl& tv : target->vars_at(y)) {
            Degree2 bound = deg2_shift(tv.degree, ell);
            // Greedily spend the linear budget on variable occurrences and
            // part of the constant budget on generators.
            std::vector<FreeTerm> leaves;
            Degree2 spent{0, 0};
            for (Nat attempt = 0; attempt < 6 && !src_vars.empty(); ++attempt) {
                Nat i = pick(0, src_vars.size() - 1);
                Degree2 next = spent + src_vars[i].degree;
                if (!deg2_leq(next, bound)) continue;
                leaves.push_back(FreeTerm::var(base_, source->vars[x], i));
                spent = next;
            }
            Nat gen_budget = bound.constant - spent.constant;
            Nat gens = pick(0, std::min<Nat>(gen_budget, 3));
            for (Nat k = 0; k < gens; ++k) {
                const auto& g = cat_->generators[pick(0, cat_->generators.size() - 1)];
                leaves.push_back(FreeTerm::lift(base_, source->vars[x], TapeTerm::gen(g.name)));
                spent.constant += g.degree;
            }
            std::shuffle(leaves.begin(), leaves.end(), rng_);
            FreeTerm term = FreeTerm::id(base_, source->vars[x], 1);
            for (auto& leaf : leaves) term = FreeTerm::seq(std::move(term), std::move(leaf));
            row.push_back(std::move(term));
        }
        outputs.push_back(std::move(row));
    }
    return mk_state_morphism(source, target, ell, std::move(transition), std::move(outputs));
}

std::pair<StateMorphism, StateMorphism> RandomMorphisms::random_composable_pair() {
    StateObjectPtr a = random_object();
    StateObjectPtr b = random_object();
    StateObjectPtr c = random_object();
    return {random_morphism(a, b), random_morphism(b, c)};
}

}  // namespace strmach::fixtures

#include "strmach/builtins.hpp"

#include <algorithm>

namespace strmach {

namespace {

PortSig endo_sig(const TapeCategory& cat) { return TapePortSig{cat.name, 1, 1}; }

void require_alphabet(const TapeCategory& cat, const std::string& reserved) {
    bool has_reserved = false;
    for (const auto& g : cat.generators) {
        if (g.arity_in != 1 || g.arity_out != 1)
            throw ValidationError("palindrome construction needs an alphabet of endomorphisms; '" +
                                  g.name + "' is " + std::to_string(g.arity_in) + "->" +
                                  std::to_string(g.arity_out));
        has_reserved = has_reserved || g.name == reserved;
    }
    if (!has_reserved)
        throw ValidationError("reserved generator '" + reserved + "' is not in the alphabet");
}

}  // namespace

TransducerPtr strip_transducer(std::shared_ptr<const TapeCategory> alphabet,
                               const std::string& alpha, const std::string& reserved) {
    require_alphabet(*alphabet, reserved);
    if (alpha == reserved)
        throw ValidationError("strip transducer cannot be built for the reserved generator");
    alphabet->at(alpha);

    BaseCategory base = BaseCategory::tape_base(alphabet);
    PortSig sig = endo_sig(*alphabet);
    VarContext one_var{VarDecl{sig, Degree2{1, 0}}};
    StateObjectPtr states =
        mk_state_object(base, {"q0", "acc", "rej"}, {one_var, one_var, one_var});
    const Nat q0 = 0, acc = 1, rej = 2;

    Transducer t;
    t.name = "T_" + alpha;
    t.input_cat = alphabet;
    t.output_cat = base;
    t.primary_in = t.primary_out = 1;
    t.aux_signatures = {sig};
    t.output_signatures = {sig};
    t.state_image = states;
    t.initial_state = "q0";

    for (const auto& g : alphabet->generators) {
        std::vector<Nat> transition(3);
        std::vector<std::vector<FreeTerm>> outputs(3);
        // start state: match strips the character, mismatch poisons with r
        if (g.name == alpha) {
            transition[q0] = acc;
            outputs[q0] = {FreeTerm::lift(base, states->vars[q0], TapeTerm::id(1))};
        } else {
            transition[q0] = rej;
            outputs[q0] = {FreeTerm::lift(base, states->vars[q0], TapeTerm::gen(reserved))};
        }
        // accepting state: append the character to the stored remainder
        transition[acc] = acc;
        outputs[acc] = {FreeTerm::seq(
            FreeTerm::var(base, states->vars[acc], 0),
            FreeTerm::lift(base, states->vars[acc], TapeTerm::gen(g.name)))};
        // rejecting state: absorb
        transition[rej] = rej;
        outputs[rej] = {FreeTerm::var(base, states->vars[rej], 0)};
        t.generator_images.emplace(
            g.name, mk_state_morphism(states, states, g.degree, std::move(transition),
                                      std::move(outputs)));
    }
    return mk_transducer(std::move(t));
}

TransducerPtr prepend_builder_transducer(std::shared_ptr<const TapeCategory> alphabet,
                                         const std::string& reserved) {
    require_alphabet(*alphabet, reserved);
    BaseCategory base = BaseCategory::machines(1);

    // signature of the stored machine: (X->X) -> (X->X)
    auto word_iface = std::make_shared<const MachineObject>(
        MachineObject{{}, {endo_sig(*alphabet)}});
    PortSig machine_sig = MachinePortSig{1, word_iface, word_iface};

    VarContext one_var{VarDecl{machine_sig, Degree2{1, 0}}};
    StateObjectPtr states = mk_state_object(base, {"s"}, {one_var});

    Transducer t;
    t.name = "builder";
    t.input_cat = alphabet;
    t.output_cat = base;
    t.primary_in = t.primary_out = 1;
    t.aux_signatures = {machine_sig};
    t.output_signatures = {machine_sig};
    t.state_image = states;
    t.initial_state = "s";

    for (const auto& g : alphabet->generators) {
        std::vector<std::vector<FreeTerm>> outputs(1);
        Nat degree = 0;
        if (g.name == reserved) {
            outputs[0] = {FreeTerm::var(base, states->vars[0], 0)};
        } else {
            MachinePtr strip = machine_from_transducer(
                strip_transducer(alphabet, g.name, reserved), "T_" + g.name);
            outputs[0] = {FreeTerm::seq(FreeTerm::lift(base, states->vars[0], strip),
                                        FreeTerm::var(base, states->vars[0], 0))};
            degree = g.degree;
        }
        t.generator_images.emplace(
            g.name, mk_state_morphism(states, states, degree, {0}, std::move(outputs)));
    }
    return mk_transducer(std::move(t));
}

MachinePtr palindrome_machine(std::shared_ptr<const TapeCategory> alphabet,
                              const std::string& reserved) {
    TransducerPtr builder = prepend_builder_transducer(alphabet, reserved);
    PortSig word_sig = endo_sig(*alphabet);
    auto word_iface = std::make_shared<const MachineObject>(MachineObject{{}, {word_sig}});

    StringMachine m;
    m.name = "palindrome";
    m.meta_level = 1;
    m.reserved_generators = {reserved};
    m.nodes.push_back(MachineNode{"fanout", CopyMachineNode{MachineObject{{}, {word_sig}}}});
    m.nodes.push_back(MachineNode{"builder", TransducerMachineNode{builder}});
    m.nodes.push_back(MachineNode{"run", MetaMachineNode{1, word_iface, word_iface}});
    m.inputs.push_back(BoundaryInput{"word", word_sig});

    const Nat fanout = 0, build = 1, run = 2;
    m.wires.push_back(Wire{LegRef{LegRef::kBoundary, 0}, LegRef{fanout, 0}});  // word -> copy
    m.wires.push_back(Wire{LegRef{fanout, 0}, LegRef{build, 1}});              // copy -> primary
    m.wires.push_back(Wire{LegRef{fanout, 1}, LegRef{run, 1}});                // copy -> meta word
    m.wires.push_back(Wire{LegRef{build, 1}, LegRef{run, 0}});                 // machine -> meta
    m.outputs.push_back(LegRef{run, 0});
    return mk_machine(std::move(m));
}

TransducerPtr dfa_transducer(const Dfa& dfa, std::shared_ptr<const TapeCategory> alphabet) {
    BaseCategory base = BaseCategory::tape_base(alphabet);
    std::vector<VarContext> vars(dfa.states.size());
    StateObjectPtr states = mk_state_object(base, dfa.states, std::move(vars));

    Transducer t;
    t.name = dfa.name;
    t.input_cat = alphabet;
    t.output_cat = base;
    t.primary_in = t.primary_out = 1;
    t.state_image = states;
    t.initial_state = dfa.start;

    for (const auto& g : alphabet->generators) {
        std::vector<Nat> transition;
        for (const auto& s : dfa.states) {
            auto row = dfa.transition.find(s);
            if (row == dfa.transition.end() || !row->second.count(g.name))
                throw ValidationError("PartialTransition: DFA '" + dfa.name + "' state '" + s +
                                      "' has no transition on '" + g.name + "'");
            transition.push_back(states->index_of(row->second.at(g.name)));
        }
        std::vector<std::vector<FreeTerm>> outputs(dfa.states.size());
        t.generator_images.emplace(
            g.name, mk_state_morphism(states, states, 0, std::move(transition), std::move(outputs)));
    }
    return mk_transducer(std::move(t));
}

TransducerPtr dfa_pass_transducer(const Dfa& dfa, std::shared_ptr<const TapeCategory> alphabet) {
    BaseCategory base = BaseCategory::tape_base(alphabet);
    PortSig sig = endo_sig(*alphabet);
    VarContext one_var{VarDecl{sig, Degree2{1, 0}}};
    std::vector<VarContext> vars(dfa.states.size(), one_var);
    StateObjectPtr states = mk_state_object(base, dfa.states, std::move(vars));

    Transducer t;
    t.name = dfa.name;
    t.input_cat = alphabet;
    t.output_cat = base;
    t.primary_in = t.primary_out = 1;
    t.aux_signatures = {sig};
    t.output_signatures = {sig};
    t.state_image = states;
    t.initial_state = dfa.start;

    for (const auto& g : alphabet->generators) {
        std::vector<Nat> transition;
        std::vector<std::vector<FreeTerm>> outputs;
        for (Nat x = 0; x < dfa.states.size(); ++x) {
            const std::string& s = dfa.states[x];
            auto row = dfa.transition.find(s);
            if (row == dfa.transition.end() || !row->second.count(g.name))
                throw ValidationError("PartialTransition: DFA '" + dfa.name + "' state '" + s +
                                      "' has no transition on '" + g.name + "'");
            transition.push_back(states->index_of(row->second.at(g.name)));
            outputs.push_back({FreeTerm::seq(
                FreeTerm::var(base, states->vars[x], 0),
                FreeTerm::lift(base, states->vars[x], TapeTerm::gen(g.name)))});
        }
        t.generator_images.emplace(
            g.name, mk_state_morphism(states, states, g.degree, std::move(transition),
                                      std::move(outputs)));
    }
    return mk_transducer(std::move(t));
}

MachinePtr intersection_chain(const std::vector<Dfa>& dfas,
                              std::shared_ptr<const TapeCategory> alphabet, std::string name) {
    if (dfas.empty()) throw UsageError("intersection_chain needs at least one DFA");

    StringMachine m;
    m.name = std::move(name);
    std::vector<TransducerPtr> ts;
    for (const auto& dfa : dfas) {
        for (const auto& s : dfa.states) {
            auto row = dfa.transition.find(s);
            for (const auto& g : alphabet->generators)
                if (row == dfa.transition.end() || !row->second.count(g.name))
                    throw ValidationError("AlphabetMismatch: DFA '" + dfa.name + "' state '" + s +
                                          "' does not cover generator '" + g.name + "'");
        }
        ts.push_back(dfa_pass_transducer(dfa, alphabet));
        m.nodes.push_back(MachineNode{dfa.name, TransducerMachineNode{ts.back()}});
    }
    m.inputs.push_back(
        BoundaryInput{"word", PortSig{TapePortSig{alphabet->name, 1, 1}}});
    m.wires.push_back(Wire{LegRef{LegRef::kBoundary, 0}, LegRef{0, 1}});
    for (Nat i = 0; i + 1 < ts.size(); ++i)
        m.wires.push_back(Wire{LegRef{i, 1}, LegRef{i + 1, 1}});  // word out -> next primary
    for (Nat i = 0; i < ts.size(); ++i) {
        m.accepting.push_back(AcceptRule{
            Nat(m.outputs.size()),
            std::set<std::string>(dfas[i].accepting.begin(), dfas[i].accepting.end())});
        m.outputs.push_back(LegRef{i, 0});  // state leg
    }
    return mk_machine(std::move(m));
}

}  // namespace strmach

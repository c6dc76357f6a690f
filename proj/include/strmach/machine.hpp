#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "strmach/transducer.hpp"

namespace strmach {

// One leg of a machine node or boundary: a state space or a morphism slot.
using LegType = std::variant<StateSpace, PortSig>;

bool leg_type_equal(const LegType& a, const LegType& b);
std::string to_string(const LegType& t);

struct TransducerMachineNode {
    TransducerPtr transducer;
};

// Duplicates the legs of an object (the copy map of StrMach).
struct CopyMachineNode {
    MachineObject object;
};

// Runs a received machine of meta level strictly below `level` on the
// received dom inputs and forwards its outputs.
struct MetaMachineNode {
    Nat level = 1;
    std::shared_ptr<const MachineObject> dom;
    std::shared_ptr<const MachineObject> cod;
};

struct MachineNode {
    std::string name;
    std::variant<TransducerMachineNode, CopyMachineNode, MetaMachineNode> v;
};

struct Leg {
    std::string name;
    LegType type;
};

std::vector<Leg> node_input_legs(const MachineNode& node);
std::vector<Leg> node_output_legs(const MachineNode& node);
Nat node_input_leg(const MachineNode& node, std::string_view leg_name);
Nat node_output_leg(const MachineNode& node, std::string_view leg_name);

// Producer or consumer endpoint; node == kBoundary refers to the machine's
// own input list (as a producer).
struct LegRef {
    static constexpr Nat kBoundary = ~Nat(0);
    Nat node = 0;
    Nat leg = 0;
    friend bool operator==(const LegRef&, const LegRef&) = default;
};

struct Wire {
    LegRef from;  // node output leg or boundary input
    LegRef to;    // node input leg
};

struct BoundaryInput {
    std::string name;
    LegType type;
};

// Accepts when the state value on the designated output lies in the set;
// a machine with several rules accepts when all of them do.
struct AcceptRule {
    Nat output = 0;  // index into StringMachine::outputs, must be state-typed
    std::set<std::string> accepting;
};

struct StringMachine {
    std::string name;
    Nat meta_level = 0;
    std::vector<MachineNode> nodes;
    std::vector<Wire> wires;
    std::vector<BoundaryInput> inputs;
    std::vector<LegRef> outputs;  // producer refs; boundary refs pass inputs through
    std::vector<AcceptRule> accepting;
    std::vector<std::string> reserved_generators;  // rejected in evaluation inputs

    Nat input_index(std::string_view name) const;
    LegType output_type(Nat output_index) const;
    Nat transducer_count() const;
};

ValidationReport validate_machine(const StringMachine& m);
MachinePtr mk_machine(StringMachine m);  // eager; throws ValidationError

// Domain/codomain as StrMach objects (state legs and morphism legs of the
// boundary, partitioned).
MachineObject machine_dom(const StringMachine& m);
MachineObject machine_cod(const StringMachine& m);

// Zero-node machine passing every leg of the interface through unchanged.
MachinePtr identity_machine(const MachineObject& iface, std::string name = "id");

struct WrapOptions {
    bool expose_state_input = false;
    bool expose_state_output = false;
};

// Single-node machine exposing the transducer's primary input and morphism
// outputs; the state legs are exposed on request.
MachinePtr machine_from_transducer(TransducerPtr t, std::string machine_name, WrapOptions = {});

// Leg contraction between two machines. Endpoints index the machines' own
// outputs/inputs lists; machine 0 is f, machine 1 is g. Contracted legs
// disappear from the merged boundary.
struct MergePair {
    Nat from_machine = 0;
    Nat from_output = 0;
    Nat to_machine = 1;
    Nat to_input = 0;
};

MachinePtr wire_machines(const StringMachine& f, const StringMachine& g,
                         const std::vector<MergePair>& pairing, std::string name);

// Values carried on legs during evaluation.
using Value = std::variant<std::string, TapeTerm, MachinePtr>;

std::string value_to_string(const Value& v);

struct TraceNode {
    std::string node;
    bool is_transducer = false;
    Nat primary_degree = 0;
    std::vector<Nat> output_degrees;
    std::string start_state;
    std::string end_state;
    std::vector<TraceNode> inner;  // machines run inside a meta vertex
};

struct EvalTrace {
    std::vector<TraceNode> nodes;
};

// Internal total primary input degree: the sum, over all transducers
// executed (including those inside meta-evaluated machines), of the degree
// of the primary input each received.
Nat ipd(const EvalTrace& trace);

struct MachineResult {
    std::vector<Value> outputs;    // aligned with StringMachine::outputs
    std::optional<bool> accepted;  // present when accept rules are declared
    EvalTrace trace;
};

// Nodes run in topological order (lexicographic node-name tie-break).
// Missing state inputs fall back to the node transducer's initial state;
// missing morphism inputs are an error. Unwired transducer auxiliary legs
// are fed the identity of their signature.
MachineResult evaluate_machine(const StringMachine& m,
                               const std::vector<std::optional<Value>>& inputs);

// Convenience: feed one tape word to every free endomorphism input.
MachineResult run_machine_on_word(const StringMachine& m, const TapeCategory& cat,
                                  std::string_view word,
                                  const std::vector<std::string>& start_states = {});

}  // namespace strmach

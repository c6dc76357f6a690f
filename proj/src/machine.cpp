#include "strmach/machine.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "strmach/util.hpp"

namespace strmach {

bool leg_type_equal(const LegType& a, const LegType& b) {
    if (a.index() != b.index()) return false;
    if (const auto* s = std::get_if<StateSpace>(&a))
        return same_state_space(*s, std::get<StateSpace>(b));
    return std::get<PortSig>(a) == std::get<PortSig>(b);
}

std::string to_string(const LegType& t) {
    if (const auto* s = std::get_if<StateSpace>(&t))
        return "states[" + std::to_string(s->size()) + "]";
    return to_string(std::get<PortSig>(t));
}

namespace {

void object_legs(const MachineObject& obj, const std::string& state_prefix,
                 const std::string& morph_prefix, std::vector<Leg>& out, Nat rounds = 1) {
    for (Nat r = 0; r < rounds; ++r)
        for (Nat i = 0; i < obj.state_spaces.size(); ++i)
            out.push_back(Leg{state_prefix + std::to_string(r * obj.state_spaces.size() + i),
                              obj.state_spaces[i]});
    for (Nat r = 0; r < rounds; ++r)
        for (Nat i = 0; i < obj.morphism_sigs.size(); ++i)
            out.push_back(Leg{morph_prefix + std::to_string(r * obj.morphism_sigs.size() + i),
                              obj.morphism_sigs[i]});
}

}  // namespace

std::vector<Leg> node_input_legs(const MachineNode& node) {
    std::vector<Leg> legs;
    std::visit(overloaded{
                   [&](const TransducerMachineNode& n) {
                       const Transducer& t = *n.transducer;
                       legs.push_back(Leg{"state", t.input_state_object()->states});
                       legs.push_back(Leg{"primary", PortSig{TapePortSig{t.input_cat->name,
                                                                         t.primary_in,
                                                                         t.primary_out}}});
                       for (Nat i = 0; i < t.aux_signatures.size(); ++i)
                           legs.push_back(Leg{"aux" + std::to_string(i), t.aux_signatures[i]});
                   },
                   [&](const CopyMachineNode& n) { object_legs(n.object, "sin", "in", legs); },
                   [&](const MetaMachineNode& n) {
                       legs.push_back(
                           Leg{"machine", PortSig{MachinePortSig{n.level, n.dom, n.cod}}});
                       object_legs(*n.dom, "sin", "in", legs);
                   },
               },
               node.v);
    return legs;
}

std::vector<Leg> node_output_legs(const MachineNode& node) {
    std::vector<Leg> legs;
    std::visit(overloaded{
                   [&](const TransducerMachineNode& n) {
                       const Transducer& t = *n.transducer;
                       legs.push_back(Leg{"state", t.output_state_object()->states});
                       for (Nat j = 0; j < t.output_signatures.size(); ++j)
                           legs.push_back(Leg{"out" + std::to_string(j), t.output_signatures[j]});
                   },
                   [&](const CopyMachineNode& n) { object_legs(n.object, "sout", "out", legs, 2); },
                   [&](const MetaMachineNode& n) { object_legs(*n.cod, "sout", "out", legs); },
               },
               node.v);
    return legs;
}

namespace {

Nat leg_index(const std::vector<Leg>& legs, std::string_view name, const std::string& node_name) {
    for (Nat i = 0; i < legs.size(); ++i)
        if (legs[i].name == name) return i;
    throw ValidationError("node '" + node_name + "' has no leg named '" + std::string(name) + "'");
}

}  // namespace

Nat node_input_leg(const MachineNode& node, std::string_view leg_name) {
    return leg_index(node_input_legs(node), leg_name, node.name);
}

Nat node_output_leg(const MachineNode& node, std::string_view leg_name) {
    return leg_index(node_output_legs(node), leg_name, node.name);
}

Nat StringMachine::input_index(std::string_view input_name) const {
    for (Nat i = 0; i < inputs.size(); ++i)
        if (inputs[i].name == input_name) return i;
    throw ValidationError("machine '" + name + "' has no input named '" + std::string(input_name) +
                          "'");
}

LegType StringMachine::output_type(Nat output_index) const {
    const LegRef& ref = outputs.at(output_index);
    if (ref.node == LegRef::kBoundary) return inputs.at(ref.leg).type;
    return node_output_legs(nodes.at(ref.node)).at(ref.leg).type;
}

Nat StringMachine::transducer_count() const {
    Nat n = 0;
    for (const auto& node : nodes)
        if (std::holds_alternative<TransducerMachineNode>(node.v)) ++n;
    return n;
}

MachineObject machine_dom(const StringMachine& m) {
    MachineObject obj;
    for (const auto& in : m.inputs) {
        if (const auto* s = std::get_if<StateSpace>(&in.type))
            obj.state_spaces.push_back(*s);
        else
            obj.morphism_sigs.push_back(std::get<PortSig>(in.type));
    }
    return obj;
}

MachineObject machine_cod(const StringMachine& m) {
    MachineObject obj;
    for (Nat i = 0; i < m.outputs.size(); ++i) {
        LegType t = m.output_type(i);
        if (const auto* s = std::get_if<StateSpace>(&t))
            obj.state_spaces.push_back(*s);
        else
            obj.morphism_sigs.push_back(std::get<PortSig>(t));
    }
    return obj;
}

PortSig machine_value_sig(const StringMachine& m) {
    return MachinePortSig{m.meta_level + 1, std::make_shared<const MachineObject>(machine_dom(m)),
                          std::make_shared<const MachineObject>(machine_cod(m))};
}

Nat machine_value_degree(const StringMachine& m) { return m.transducer_count(); }

const std::string& machine_value_name(const StringMachine& m) { return m.name; }

namespace {

void collect_machine_leaves(const FreeNodePtr& n, std::vector<MachinePtr>& out) {
    std::visit(overloaded{
                   [&](const FBase& b) {
                       if (const auto* m = std::get_if<MachinePtr>(&b.value)) out.push_back(*m);
                   },
                   [&](const FSeq& s) {
                       collect_machine_leaves(s.first, out);
                       collect_machine_leaves(s.second, out);
                   },
                   [&](const FPar& p) {
                       collect_machine_leaves(p.left, out);
                       collect_machine_leaves(p.right, out);
                   },
                   [&](const auto&) {},
               },
               n->v);
}

// Kahn's algorithm with a lexicographic-name tie-break; nullopt on a cycle.
std::optional<std::vector<Nat>> topological_order(const StringMachine& m) {
    std::vector<Nat> indegree(m.nodes.size(), 0);
    for (const auto& w : m.wires)
        if (w.from.node != LegRef::kBoundary) ++indegree[w.to.node];
    std::set<std::pair<std::string, Nat>> ready;
    for (Nat i = 0; i < m.nodes.size(); ++i)
        if (indegree[i] == 0) ready.insert({m.nodes[i].name, i});
    std::vector<Nat> order;
    while (!ready.empty()) {
        Nat n = ready.begin()->second;
        ready.erase(ready.begin());
        order.push_back(n);
        for (const auto& w : m.wires)
            if (w.from.node == n && --indegree[w.to.node] == 0)
                ready.insert({m.nodes[w.to.node].name, w.to.node});
    }
    if (order.size() != m.nodes.size()) return std::nullopt;
    return order;
}

}  // namespace

ValidationReport validate_machine(const StringMachine& m) {
    ValidationReport report;
    std::set<std::string> names;
    for (const auto& node : m.nodes) {
        if (node.name.empty() || node.name.find('.') != std::string::npos)
            report.fail("machine '" + m.name + "': node name '" + node.name + "' is invalid");
        if (!names.insert(node.name).second)
            report.fail("machine '" + m.name + "': duplicate node name '" + node.name + "'");
    }
    std::set<std::string> input_names;
    for (const auto& in : m.inputs)
        if (!input_names.insert(in.name).second)
            report.fail("machine '" + m.name + "': duplicate input name '" + in.name + "'");

    auto producer_type = [&](const LegRef& ref) -> std::optional<LegType> {
        if (ref.node == LegRef::kBoundary) {
            if (ref.leg >= m.inputs.size()) return std::nullopt;
            return m.inputs[ref.leg].type;
        }
        if (ref.node >= m.nodes.size()) return std::nullopt;
        auto legs = node_output_legs(m.nodes[ref.node]);
        if (ref.leg >= legs.size()) return std::nullopt;
        return legs[ref.leg].type;
    };

    std::map<std::pair<Nat, Nat>, Nat> consumers;  // producer leg -> count
    std::set<std::pair<Nat, Nat>> wired_consumers;
    for (const auto& w : m.wires) {
        auto from_type = producer_type(w.from);
        if (!from_type) {
            report.fail("machine '" + m.name + "': wire from invalid leg");
            continue;
        }
        if (w.to.node >= m.nodes.size()) {
            report.fail("machine '" + m.name + "': wire to invalid node");
            continue;
        }
        auto in_legs = node_input_legs(m.nodes[w.to.node]);
        if (w.to.leg >= in_legs.size()) {
            report.fail("machine '" + m.name + "': wire to invalid leg of node '" +
                        m.nodes[w.to.node].name + "'");
            continue;
        }
        if (!leg_type_equal(*from_type, in_legs[w.to.leg].type))
            report.fail("SignatureMismatch: machine '" + m.name + "' wire into '" +
                        m.nodes[w.to.node].name + "." + in_legs[w.to.leg].name + "' carries " +
                        to_string(*from_type) + ", leg expects " +
                        to_string(in_legs[w.to.leg].type));
        if (!wired_consumers.insert({w.to.node, w.to.leg}).second)
            report.fail("machine '" + m.name + "': node '" + m.nodes[w.to.node].name + "' leg '" +
                        in_legs[w.to.leg].name + "' has two incoming wires");
        ++consumers[{w.from.node, w.from.leg}];
    }
    for (Nat i = 0; i < m.outputs.size(); ++i) {
        if (!producer_type(m.outputs[i])) {
            report.fail("machine '" + m.name + "': output " + std::to_string(i) +
                        " references an invalid leg");
            continue;
        }
        ++consumers[{m.outputs[i].node, m.outputs[i].leg}];
    }
    for (const auto& [leg, count] : consumers) {
        if (count <= 1) continue;
        bool from_copy = leg.first != LegRef::kBoundary &&
                         std::holds_alternative<CopyMachineNode>(m.nodes[leg.first].v);
        if (!from_copy)
            report.fail("machine '" + m.name +
                        "': producer leg feeds more than one consumer (fan out through a copy "
                        "node)");
    }

    if (!topological_order(m)) report.fail("CycleDetected: machine '" + m.name + "'");

    for (const auto& rule : m.accepting) {
        if (rule.output >= m.outputs.size()) {
            report.fail("machine '" + m.name + "': accept rule on missing output " +
                        std::to_string(rule.output));
            continue;
        }
        LegType t = m.output_type(rule.output);
        const auto* space = std::get_if<StateSpace>(&t);
        if (!space) {
            report.fail("machine '" + m.name + "': accept rule on non-state output " +
                        std::to_string(rule.output));
            continue;
        }
        for (const auto& s : rule.accepting)
            if (std::find(space->begin(), space->end(), s) == space->end())
                report.fail("machine '" + m.name + "': accepting state '" + s +
                            "' is not in the output state space");
    }

    Nat needed_level = 0;
    for (const auto& node : m.nodes) {
        std::visit(overloaded{
                       [&](const TransducerMachineNode& n) {
                           for (const auto& [gen, image] : n.transducer->generator_images) {
                               (void)gen;
                               for (const auto& row : image.outputs)
                                   for (const auto& term : row) {
                                       std::vector<MachinePtr> leaves;
                                       collect_machine_leaves(term.root(), leaves);
                                       for (const auto& leaf : leaves)
                                           needed_level =
                                               std::max(needed_level, leaf->meta_level + 1);
                                   }
                           }
                       },
                       [&](const CopyMachineNode&) {},
                       [&](const MetaMachineNode& n) {
                           if (n.level == 0)
                               report.fail("machine '" + m.name +
                                           "': meta vertex must have level >= 1");
                           if (!n.dom || !n.cod)
                               report.fail("machine '" + m.name +
                                           "': meta vertex missing interface");
                           needed_level = std::max(needed_level, n.level);
                       },
                   },
                   node.v);
    }
    if (m.meta_level < needed_level)
        report.fail("machine '" + m.name + "': meta level " + std::to_string(m.meta_level) +
                    " is below the required " + std::to_string(needed_level));
    return report;
}

MachinePtr mk_machine(StringMachine m) {
    ValidationReport report = validate_machine(m);
    if (!report.ok) throw ValidationError(report.joined());
    return std::make_shared<const StringMachine>(std::move(m));
}

MachinePtr identity_machine(const MachineObject& iface, std::string name) {
    StringMachine m;
    m.name = std::move(name);
    std::vector<Leg> legs;
    object_legs(iface, "sin", "in", legs);
    for (Nat i = 0; i < legs.size(); ++i) {
        m.inputs.push_back(BoundaryInput{legs[i].name, legs[i].type});
        m.outputs.push_back(LegRef{LegRef::kBoundary, i});
    }
    return mk_machine(std::move(m));
}

MachinePtr machine_from_transducer(TransducerPtr t, std::string machine_name, WrapOptions opt) {
    StringMachine m;
    m.name = std::move(machine_name);
    m.nodes.push_back(MachineNode{t->name, TransducerMachineNode{t}});
    if (opt.expose_state_input) {
        m.inputs.push_back(BoundaryInput{"state", t->input_state_object()->states});
        m.wires.push_back(Wire{LegRef{LegRef::kBoundary, 0}, LegRef{0, 0}});
    }
    Nat primary_leg = 1;  // node input legs: state, primary, aux...
    m.inputs.push_back(BoundaryInput{"primary", PortSig{TapePortSig{t->input_cat->name,
                                                                    t->primary_in,
                                                                    t->primary_out}}});
    m.wires.push_back(
        Wire{LegRef{LegRef::kBoundary, Nat(m.inputs.size() - 1)}, LegRef{0, primary_leg}});
    if (opt.expose_state_output) m.outputs.push_back(LegRef{0, 0});
    for (Nat j = 0; j < t->output_signatures.size(); ++j)
        m.outputs.push_back(LegRef{0, j + 1});
    return mk_machine(std::move(m));
}

MachinePtr wire_machines(const StringMachine& f, const StringMachine& g,
                         const std::vector<MergePair>& pairing, std::string name) {
    const StringMachine* side[2] = {&f, &g};

    std::map<std::pair<Nat, Nat>, const MergePair*> feeder;  // consumed input -> pair
    std::set<std::pair<Nat, Nat>> used_outputs;
    for (const auto& p : pairing) {
        if (p.from_machine > 1 || p.to_machine > 1)
            throw UsageError("wire_machines: machine index out of range");
        if (p.from_output >= side[p.from_machine]->outputs.size())
            throw UsageError("wire_machines: output index out of range");
        if (p.to_input >= side[p.to_machine]->inputs.size())
            throw UsageError("wire_machines: input index out of range");
        LegType from_type = side[p.from_machine]->output_type(p.from_output);
        const LegType& to_type = side[p.to_machine]->inputs[p.to_input].type;
        if (!leg_type_equal(from_type, to_type))
            throw ValidationError("SignatureMismatch: contracting " + to_string(from_type) +
                                  " onto " + to_string(to_type));
        if (!feeder.emplace(std::make_pair(p.to_machine, p.to_input), &p).second)
            throw ValidationError("wire_machines: input contracted twice");
        if (!used_outputs.insert({p.from_machine, p.from_output}).second)
            throw ValidationError("wire_machines: output contracted twice");
    }

    StringMachine merged;
    merged.name = std::move(name);
    merged.meta_level = std::max(f.meta_level, g.meta_level);

    Nat node_offset[2] = {0, f.nodes.size()};
    std::set<std::string> node_names;
    for (Nat s = 0; s < 2; ++s) {
        for (const auto& node : side[s]->nodes) {
            MachineNode copy = node;
            if (!node_names.insert(copy.name).second) {
                Nat k = 2;
                while (!node_names.insert(copy.name + "#" + std::to_string(k)).second) ++k;
                copy.name += "#" + std::to_string(k);
            }
            merged.nodes.push_back(std::move(copy));
        }
    }

    std::map<std::pair<Nat, Nat>, Nat> new_input_index;
    std::set<std::string> taken_inputs;
    for (Nat s = 0; s < 2; ++s) {
        for (Nat i = 0; i < side[s]->inputs.size(); ++i) {
            if (feeder.count({s, i})) continue;
            BoundaryInput in = side[s]->inputs[i];
            if (!taken_inputs.insert(in.name).second) {
                Nat k = 2;
                while (!taken_inputs.insert(in.name + "#" + std::to_string(k)).second) ++k;
                in.name += "#" + std::to_string(k);
            }
            new_input_index[{s, i}] = merged.inputs.size();
            merged.inputs.push_back(std::move(in));
        }
    }

    std::function<LegRef(Nat, LegRef, std::set<std::pair<Nat, Nat>>&)> resolve =
        [&](Nat s, LegRef ref, std::set<std::pair<Nat, Nat>>& visiting) -> LegRef {
        if (ref.node != LegRef::kBoundary) return LegRef{ref.node + node_offset[s], ref.leg};
        auto key = std::make_pair(s, ref.leg);
        auto fed = feeder.find(key);
        if (fed == feeder.end()) return LegRef{LegRef::kBoundary, new_input_index.at(key)};
        if (!visiting.insert(key).second)
            throw ValidationError("CycleDetected: pass-through contraction loop");
        const MergePair* p = fed->second;
        return resolve(p->from_machine, side[p->from_machine]->outputs[p->from_output], visiting);
    };
    auto resolve_fresh = [&](Nat s, LegRef ref) {
        std::set<std::pair<Nat, Nat>> visiting;
        return resolve(s, ref, visiting);
    };

    for (Nat s = 0; s < 2; ++s)
        for (const auto& w : side[s]->wires)
            merged.wires.push_back(
                Wire{resolve_fresh(s, w.from), LegRef{w.to.node + node_offset[s], w.to.leg}});

    std::map<std::pair<Nat, Nat>, Nat> new_output_index;
    for (Nat s = 0; s < 2; ++s) {
        for (Nat i = 0; i < side[s]->outputs.size(); ++i) {
            if (used_outputs.count({s, i})) continue;
            new_output_index[{s, i}] = merged.outputs.size();
            merged.outputs.push_back(resolve_fresh(s, side[s]->outputs[i]));
        }
    }
    for (Nat s = 0; s < 2; ++s) {
        for (const auto& rule : side[s]->accepting) {
            auto it = new_output_index.find({s, rule.output});
            if (it == new_output_index.end()) continue;
            merged.accepting.push_back(AcceptRule{it->second, rule.accepting});
        }
    }
    for (Nat s = 0; s < 2; ++s)
        for (const auto& r : side[s]->reserved_generators)
            if (std::find(merged.reserved_generators.begin(), merged.reserved_generators.end(),
                          r) == merged.reserved_generators.end())
                merged.reserved_generators.push_back(r);

    return mk_machine(std::move(merged));
}

// --- evaluation -------------------------------------------------------------

namespace {

bool term_mentions(const TapeTerm& t, const std::vector<std::string>& names) {
    return std::visit(
        overloaded{
            [&](const GenNode& g) {
                return std::find(names.begin(), names.end(), g.name) != names.end();
            },
            [&](const SeqNode& s) {
                return term_mentions(s.first, names) || term_mentions(s.second, names);
            },
            [&](const ParNode& p) {
                return term_mentions(p.left, names) || term_mentions(p.right, names);
            },
            [&](const auto&) { return false; },
        },
        t.node().v);
}

BaseMorphism identity_fill(const PortSig& sig) {
    if (const auto* t = std::get_if<TapePortSig>(&sig)) {
        if (t->in != t->out)
            throw EvaluationError("UnfilledAuxiliaryLeg: no identity for signature " +
                                  to_string(sig));
        return TapeTerm::id(t->in);
    }
    const auto& ms = std::get<MachinePortSig>(sig);
    if (!(*ms.dom == *ms.cod))
        throw EvaluationError("UnfilledAuxiliaryLeg: no identity for signature " + to_string(sig));
    return identity_machine(*ms.dom);
}

BaseMorphism value_to_base(const Value& v, const std::string& where) {
    if (const auto* t = std::get_if<TapeTerm>(&v)) return *t;
    if (const auto* m = std::get_if<MachinePtr>(&v)) return *m;
    throw EvaluationError("state value arrived on morphism leg at " + where);
}

Nat value_degree(const Value& v, const Transducer& t) {
    if (const auto* term = std::get_if<TapeTerm>(&v)) {
        if (t.output_cat.is_tape()) return term_degree(*term, t.output_cat.tape_cat());
        return 0;
    }
    if (const auto* m = std::get_if<MachinePtr>(&v)) return machine_value_degree(**m);
    return 0;
}

}  // namespace

Nat ipd(const EvalTrace& trace) {
    Nat total = 0;
    std::function<void(const std::vector<TraceNode>&)> walk = [&](const std::vector<TraceNode>& ns) {
        for (const auto& n : ns) {
            if (n.is_transducer) total = nat_add(total, n.primary_degree);
            walk(n.inner);
        }
    };
    walk(trace.nodes);
    return total;
}

std::string value_to_string(const Value& v) {
    return std::visit(overloaded{
                          [](const std::string& s) { return s; },
                          [](const TapeTerm& t) { return term_to_string(t); },
                          [](const MachinePtr& m) { return machine_value_name(*m); },
                      },
                      v);
}

MachineResult evaluate_machine(const StringMachine& m,
                               const std::vector<std::optional<Value>>& inputs) {
    if (inputs.size() != m.inputs.size())
        throw EvaluationError("machine '" + m.name + "' expects " +
                              std::to_string(m.inputs.size()) + " inputs, got " +
                              std::to_string(inputs.size()));
    for (Nat i = 0; i < inputs.size(); ++i) {
        if (!inputs[i]) continue;
        if (const auto* term = std::get_if<TapeTerm>(&*inputs[i]))
            if (!m.reserved_generators.empty() && term_mentions(*term, m.reserved_generators))
                throw EvaluationError("ReservedCharacterInInput: machine '" + m.name +
                                      "' input " + std::to_string(i));
        if (const auto* state = std::get_if<std::string>(&*inputs[i])) {
            const auto* space = std::get_if<StateSpace>(&m.inputs[i].type);
            if (!space || std::find(space->begin(), space->end(), *state) == space->end())
                throw EvaluationError("input " + std::to_string(i) + " carries state '" + *state +
                                      "' outside its state space");
        }
    }

    auto order = topological_order(m);
    if (!order) throw ValidationError("CycleDetected: machine '" + m.name + "'");

    std::map<std::pair<Nat, Nat>, Value> produced;  // (node, out leg) -> value
    auto producer_value = [&](const LegRef& ref) -> std::optional<Value> {
        if (ref.node == LegRef::kBoundary) return inputs.at(ref.leg);
        auto it = produced.find({ref.node, ref.leg});
        if (it == produced.end()) return std::nullopt;
        return it->second;
    };

    // wire lookup per consumer leg
    std::map<std::pair<Nat, Nat>, const Wire*> incoming;
    for (const auto& w : m.wires) incoming[{w.to.node, w.to.leg}] = &w;

    MachineResult result;
    for (Nat n : *order) {
        const MachineNode& node = m.nodes[n];
        auto in_legs = node_input_legs(node);
        std::vector<std::optional<Value>> in_values(in_legs.size());
        for (Nat l = 0; l < in_legs.size(); ++l) {
            auto it = incoming.find({n, l});
            if (it == incoming.end()) continue;
            in_values[l] = producer_value(it->second->from);
            if (!in_values[l])
                throw EvaluationError("node '" + node.name + "' leg '" + in_legs[l].name +
                                      "' is wired to an absent value");
        }
        TraceNode tn;
        tn.node = node.name;
        std::visit(
            overloaded{
                [&](const TransducerMachineNode& nn) {
                    const Transducer& t = *nn.transducer;
                    std::string start;
                    if (in_values[0]) {
                        const auto* s = std::get_if<std::string>(&*in_values[0]);
                        if (!s)
                            throw EvaluationError("node '" + node.name +
                                                  "' state leg carries a non-state value");
                        start = *s;
                    } else if (t.initial_state) {
                        start = *t.initial_state;
                    } else {
                        throw EvaluationError("node '" + node.name +
                                              "' has no start state (wire one or declare an "
                                              "initial state)");
                    }
                    if (!in_values[1])
                        throw EvaluationError("node '" + node.name +
                                              "' primary input is not connected");
                    const auto* primary = std::get_if<TapeTerm>(&*in_values[1]);
                    if (!primary)
                        throw EvaluationError("node '" + node.name +
                                              "' primary leg carries a non-term value");
                    std::vector<BaseMorphism> aux;
                    for (Nat a = 0; a < t.aux_signatures.size(); ++a) {
                        if (in_values[2 + a])
                            aux.push_back(value_to_base(*in_values[2 + a],
                                                        node.name + ".aux" + std::to_string(a)));
                        else
                            aux.push_back(identity_fill(t.aux_signatures[a]));
                    }
                    TransducerResult r = evaluate_transducer(t, start, *primary, aux);
                    produced[{n, 0}] = r.output_state;
                    tn.is_transducer = true;
                    tn.primary_degree = r.primary_degree_consumed;
                    tn.start_state = start;
                    tn.end_state = r.output_state;
                    for (Nat j = 0; j < r.outputs.size(); ++j) {
                        Value v = std::visit([](auto x) -> Value { return x; }, r.outputs[j]);
                        tn.output_degrees.push_back(value_degree(v, t));
                        produced[{n, j + 1}] = std::move(v);
                    }
                },
                [&](const CopyMachineNode& nn) {
                    Nat states = nn.object.state_spaces.size();
                    Nat morphs = nn.object.morphism_sigs.size();
                    for (Nat l = 0; l < in_legs.size(); ++l)
                        if (!in_values[l])
                            throw EvaluationError("node '" + node.name + "' leg '" +
                                                  in_legs[l].name + "' has no value");
                    for (Nat j = 0; j < 2 * states; ++j) produced[{n, j}] = *in_values[j % states];
                    for (Nat j = 0; j < 2 * morphs; ++j)
                        produced[{n, 2 * states + j}] = *in_values[states + (j % morphs)];
                },
                [&](const MetaMachineNode& nn) {
                    if (!in_values[0])
                        throw EvaluationError("meta vertex '" + node.name +
                                              "' received no machine");
                    const auto* mp = std::get_if<MachinePtr>(&*in_values[0]);
                    if (!mp || !*mp)
                        throw EvaluationError("meta vertex '" + node.name +
                                              "' received a non-machine value");
                    const StringMachine& inner = **mp;
                    if (inner.meta_level >= nn.level)
                        throw EvaluationError("MetaLevelViolation: meta vertex '" + node.name +
                                              "' (level " + std::to_string(nn.level) +
                                              ") received machine '" + inner.name + "' of level " +
                                              std::to_string(inner.meta_level));
                    if (!(machine_dom(inner) == *nn.dom) || !(machine_cod(inner) == *nn.cod))
                        throw EvaluationError("meta vertex '" + node.name +
                                              "' received machine '" + inner.name +
                                              "' with a different interface");
                    // dom legs follow the machine leg: states then morphisms
                    std::vector<std::optional<Value>> inner_inputs;
                    Nat state_at = 1;
                    Nat morph_at = 1 + nn.dom->state_spaces.size();
                    for (const auto& in : inner.inputs) {
                        Nat leg = std::holds_alternative<StateSpace>(in.type) ? state_at++
                                                                              : morph_at++;
                        inner_inputs.push_back(in_values.at(leg));
                    }
                    MachineResult r = evaluate_machine(inner, inner_inputs);
                    // cod values partitioned back onto the out legs
                    Nat souts = 0, mouts = 0;
                    Nat total_states = nn.cod->state_spaces.size();
                    for (Nat j = 0; j < r.outputs.size(); ++j) {
                        LegType t = inner.output_type(j);
                        Nat leg = std::holds_alternative<StateSpace>(t)
                                      ? souts++
                                      : total_states + mouts++;
                        produced[{n, leg}] = r.outputs[j];
                    }
                    tn.inner = std::move(r.trace.nodes);
                },
            },
            node.v);
        result.trace.nodes.push_back(std::move(tn));
    }

    for (const auto& ref : m.outputs) {
        auto v = producer_value(ref);
        if (!v)
            throw EvaluationError("machine '" + m.name + "' output references an absent value");
        result.outputs.push_back(std::move(*v));
    }
    if (!m.accepting.empty()) {
        bool ok = true;
        for (const auto& rule : m.accepting) {
            const auto* s = std::get_if<std::string>(&result.outputs[rule.output]);
            ok = ok && s && rule.accepting.count(*s) > 0;
        }
        result.accepted = ok;
    }
    return result;
}

MachineResult run_machine_on_word(const StringMachine& m, const TapeCategory& cat,
                                  std::string_view word,
                                  const std::vector<std::string>& start_states) {
    std::vector<std::optional<Value>> inputs;
    Nat state_at = 0;
    for (const auto& in : m.inputs) {
        if (std::holds_alternative<StateSpace>(in.type)) {
            if (state_at < start_states.size())
                inputs.emplace_back(Value{start_states[state_at]});
            else
                inputs.emplace_back(std::nullopt);
            ++state_at;
            continue;
        }
        const auto& sig = std::get<PortSig>(in.type);
        const auto* t = std::get_if<TapePortSig>(&sig);
        if (t && t->category == cat.name && t->in == 1 && t->out == 1)
            inputs.emplace_back(Value{encode_word(word, cat)});
        else
            inputs.emplace_back(std::nullopt);
    }
    return evaluate_machine(m, inputs);
}

// --- machine-valued free terms ----------------------------------------------

namespace {

MachinePtr compose_machine_values(const MachinePtr& a, const MachinePtr& b) {
    std::vector<Nat> a_state_outs, a_morph_outs, b_state_ins, b_morph_ins;
    for (Nat i = 0; i < a->outputs.size(); ++i) {
        if (std::holds_alternative<StateSpace>(a->output_type(i)))
            a_state_outs.push_back(i);
        else
            a_morph_outs.push_back(i);
    }
    for (Nat i = 0; i < b->inputs.size(); ++i) {
        if (std::holds_alternative<StateSpace>(b->inputs[i].type))
            b_state_ins.push_back(i);
        else
            b_morph_ins.push_back(i);
    }
    if (a_state_outs.size() != b_state_ins.size() || a_morph_outs.size() != b_morph_ins.size())
        throw IllTypedError("machine composition interface mismatch");
    std::vector<MergePair> pairing;
    for (Nat i = 0; i < a_state_outs.size(); ++i)
        pairing.push_back(MergePair{0, a_state_outs[i], 1, b_state_ins[i]});
    for (Nat i = 0; i < a_morph_outs.size(); ++i)
        pairing.push_back(MergePair{0, a_morph_outs[i], 1, b_morph_ins[i]});
    return wire_machines(*a, *b, pairing, "(" + a->name + " ; " + b->name + ")");
}

}  // namespace

MachinePtr realize_machine_term(const FreeTerm& t) {
    std::function<MachinePtr(const FreeNodePtr&)> build = [&](const FreeNodePtr& n) -> MachinePtr {
        return std::visit(
            overloaded{
                [&](const FBase& b) -> MachinePtr {
                    const auto* m = std::get_if<MachinePtr>(&b.value);
                    if (!m || !*m)
                        throw IllTypedError("tape term leaf in a machines-base term");
                    return *m;
                },
                [&](const FVar&) -> MachinePtr {
                    throw IllTypedError("cannot realize a term with free variables");
                },
                [&](const FSeq& s) -> MachinePtr {
                    return compose_machine_values(build(s.first), build(s.second));
                },
                [&](const auto&) -> MachinePtr {
                    throw IllTypedError(
                        "only sequential structure is supported in machines-base terms");
                },
            },
            n->v);
    };
    return build(t.root());
}

}  // namespace strmach

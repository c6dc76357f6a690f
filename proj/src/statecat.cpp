#include "strmach/statecat.hpp"

#include <algorithm>
#include <unordered_set>

namespace strmach {

Nat StateObject::index_of(std::string_view state) const {
    for (Nat i = 0; i < states.size(); ++i)
        if (states[i] == state) return i;
    throw EvaluationError("StoreMismatch: unknown state '" + std::string(state) + "'");
}

const VarContext& StateObject::vars_at(Nat state_index) const {
    return *vars.at(state_index);
}

bool operator==(const StateObject& a, const StateObject& b) {
    if (!(a.base == b.base) || a.states != b.states) return false;
    for (std::size_t i = 0; i < a.vars.size(); ++i)
        if (!(a.vars[i] == b.vars[i] || *a.vars[i] == *b.vars[i])) return false;
    return true;
}

namespace {

// Product states carry canonical "x|y" names; atomic ids may not use '|'.
StateObjectPtr mk_state_object_impl(BaseCategory base, std::vector<std::string> states,
                                    std::vector<VarContext> vars, bool allow_products) {
    if (states.empty()) throw ValidationError("state object requires at least one state");
    if (vars.size() != states.size())
        throw ValidationError("state object: variable lists do not match states");
    std::unordered_set<std::string> seen;
    for (const auto& s : states) {
        if (!allow_products && s.find('|') != std::string::npos)
            throw ValidationError("state id '" + s + "' may not contain '|'");
        if (!seen.insert(s).second) throw ValidationError("duplicate state id '" + s + "'");
    }
    auto obj = std::make_shared<StateObject>();
    obj->base = std::move(base);
    obj->states = std::move(states);
    obj->vars.reserve(vars.size());
    for (auto& v : vars) obj->vars.push_back(std::make_shared<const VarContext>(std::move(v)));
    return obj;
}

}  // namespace

StateObjectPtr mk_state_object(BaseCategory base, std::vector<std::string> states,
                               std::vector<VarContext> vars) {
    return mk_state_object_impl(std::move(base), std::move(states), std::move(vars), false);
}

StateObjectPtr unit_state_object(BaseCategory base) {
    return mk_state_object(std::move(base), {"*"}, {VarContext{}});
}

bool is_unit_like(const StateObject& a) {
    return a.states.size() == 1 && a.vars_at(0).empty();
}

namespace {

Nat pair_index(const StateObject& a, const StateObject& b, Nat ia, Nat ib) {
    if (is_unit_like(a)) return ib;
    if (is_unit_like(b)) return ia;
    return ia * b.states.size() + ib;
}

}  // namespace

StateObjectPtr tensor_state(const StateObjectPtr& a, const StateObjectPtr& b) {
    if (!(a->base == b->base))
        throw ValidationError("BaseCategoryMismatch: tensor across base categories");
    if (is_unit_like(*a)) return b;
    if (is_unit_like(*b)) return a;
    std::vector<std::string> states;
    std::vector<VarContext> vars;
    states.reserve(a->states.size() * b->states.size());
    for (Nat i = 0; i < a->states.size(); ++i) {
        for (Nat j = 0; j < b->states.size(); ++j) {
            states.push_back(a->states[i] + "|" + b->states[j]);
            VarContext ctx = a->vars_at(i);
            const VarContext& right = b->vars_at(j);
            ctx.insert(ctx.end(), right.begin(), right.end());
            vars.push_back(std::move(ctx));
        }
    }
    return mk_state_object_impl(a->base, std::move(states), std::move(vars), true);
}

StateObjectPtr tensor_power(const StateObjectPtr& a, Nat n) {
    StateObjectPtr acc = unit_state_object(a->base);
    for (Nat i = 0; i < n; ++i) acc = tensor_state(acc, a);
    return acc;
}

std::string ValidationReport::joined() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "\n";
        out += v;
    }
    return out;
}

ValidationReport validate_state_morphism(const StateMorphism& f) {
    ValidationReport report;
    for (Nat x = 0; x < f.source->states.size(); ++x) {
        Nat y = f.transition.at(x);
        const VarContext& target_vars = f.target->vars_at(y);
        const auto& row = f.outputs.at(x);
        for (Nat j = 0; j < target_vars.size(); ++j) {
            const FreeTerm& term = row.at(j);
            PortSig sig = free_signature(term);
            if (!sig_fits(sig, target_vars[j].sig)) {
                report.fail("state '" + f.source->states[x] + "' output " + std::to_string(j) +
                            ": signature " + to_string(sig) + " does not match variable " +
                            to_string(target_vars[j].sig));
                continue;
            }
            Degree2 found = free_degree(term);
            Degree2 bound = deg2_shift(target_vars[j].degree, f.degree);
            if (!deg2_leq(found, bound))
                report.fail("state '" + f.source->states[x] + "' output " + std::to_string(j) +
                            ": degree " + to_string(found) + " exceeds bound " + to_string(bound) +
                            " (variable " + to_string(target_vars[j].degree) + ", ell " +
                            std::to_string(f.degree) + ")");
        }
    }
    return report;
}

StateMorphism mk_state_morphism_unchecked(StateObjectPtr source, StateObjectPtr target, Nat degree,
                                          std::vector<Nat> transition,
                                          std::vector<std::vector<FreeTerm>> outputs) {
    if (transition.size() != source->states.size() || outputs.size() != source->states.size())
        throw IllTypedError("state morphism: transition/output rows do not match source states");
    for (Nat x = 0; x < transition.size(); ++x) {
        if (transition[x] >= target->states.size())
            throw IllTypedError("state morphism: transition image out of range");
        const VarContext& tv = target->vars_at(transition[x]);
        if (outputs[x].size() != tv.size())
            throw IllTypedError("state morphism: output row at '" + source->states[x] + "' has " +
                                std::to_string(outputs[x].size()) + " terms, target state has " +
                                std::to_string(tv.size()) + " variables");
        for (const FreeTerm& term : outputs[x]) {
            if (!(term.base() == source->base))
                throw IllTypedError("state morphism: output term over a different base category");
            if (!(term.context() == source->vars[x] || *term.context() == *source->vars[x]))
                throw IllTypedError("state morphism: output term context differs from source vars");
        }
    }
    StateMorphism f;
    f.source = std::move(source);
    f.target = std::move(target);
    f.degree = degree;
    f.transition = std::move(transition);
    f.outputs = std::move(outputs);
    return f;
}

StateMorphism mk_state_morphism(StateObjectPtr source, StateObjectPtr target, Nat degree,
                                std::vector<Nat> transition,
                                std::vector<std::vector<FreeTerm>> outputs) {
    StateMorphism f = mk_state_morphism_unchecked(std::move(source), std::move(target), degree,
                                                  std::move(transition), std::move(outputs));
    ValidationReport report = validate_state_morphism(f);
    if (!report.ok) throw ValidationError("state morphism degree bound:\n" + report.joined());
    return f;
}

StateMorphism identity_state_morphism(const StateObjectPtr& a) {
    std::vector<Nat> transition(a->states.size());
    std::vector<std::vector<FreeTerm>> outputs(a->states.size());
    for (Nat x = 0; x < a->states.size(); ++x) {
        transition[x] = x;
        const VarContext& ctx = a->vars_at(x);
        for (Nat j = 0; j < ctx.size(); ++j)
            outputs[x].push_back(FreeTerm::var(a->base, a->vars[x], j));
    }
    return mk_state_morphism(a, a, 0, std::move(transition), std::move(outputs));
}

StateMorphism compose_state(const StateMorphism& g, const StateMorphism& f) {
    if (!(*f.target == *g.source))
        throw IllTypedError("ObjectMismatch: composing state morphisms across objects");
    std::vector<Nat> transition(f.source->states.size());
    std::vector<std::vector<FreeTerm>> outputs(f.source->states.size());
    for (Nat x = 0; x < f.source->states.size(); ++x) {
        Nat mid = f.transition[x];
        transition[x] = g.transition[mid];
        outputs[x].reserve(g.outputs[mid].size());
        for (const FreeTerm& term : g.outputs[mid])
            outputs[x].push_back(substitute_free(term, f.outputs[x], f.source->vars[x]));
    }
    return mk_state_morphism(f.source, g.target, nat_add(f.degree, g.degree),
                             std::move(transition), std::move(outputs));
}

StateMorphism tensor_state_morphism(const StateMorphism& f, const StateMorphism& g) {
    StateObjectPtr source = tensor_state(f.source, g.source);
    StateObjectPtr target = tensor_state(f.target, g.target);
    std::vector<Nat> transition(source->states.size());
    std::vector<std::vector<FreeTerm>> outputs(source->states.size());
    for (Nat xa = 0; xa < f.source->states.size(); ++xa) {
        for (Nat xb = 0; xb < g.source->states.size(); ++xb) {
            Nat x = pair_index(*f.source, *g.source, xa, xb);
            Nat y = pair_index(*f.target, *g.target, f.transition[xa], g.transition[xb]);
            transition[x] = y;
            const VarContextPtr& ctx = source->vars[x];
            Nat offset = f.source->vars_at(xa).size();
            std::vector<FreeTerm> row;
            for (const FreeTerm& term : f.outputs[xa]) {
                std::vector<FreeTerm> fills;
                for (Nat i = 0; i < f.source->vars_at(xa).size(); ++i)
                    fills.push_back(FreeTerm::var(source->base, ctx, i));
                row.push_back(substitute_free(term, fills, ctx));
            }
            for (const FreeTerm& term : g.outputs[xb]) {
                std::vector<FreeTerm> fills;
                for (Nat i = 0; i < g.source->vars_at(xb).size(); ++i)
                    fills.push_back(FreeTerm::var(source->base, ctx, nat_add(offset, i)));
                row.push_back(substitute_free(term, fills, ctx));
            }
            outputs[x] = std::move(row);
        }
    }
    return mk_state_morphism(source, target, nat_add(f.degree, g.degree), std::move(transition),
                             std::move(outputs));
}

StateMorphism copy_state_morphism(const StateObjectPtr& a) {
    StateObjectPtr target = tensor_state(a, a);
    std::vector<Nat> transition(a->states.size());
    std::vector<std::vector<FreeTerm>> outputs(a->states.size());
    for (Nat x = 0; x < a->states.size(); ++x) {
        transition[x] = pair_index(*a, *a, x, x);
        const VarContext& ctx = a->vars_at(x);
        for (Nat round = 0; round < 2; ++round)
            for (Nat j = 0; j < ctx.size(); ++j)
                outputs[x].push_back(FreeTerm::var(a->base, a->vars[x], j));
    }
    return mk_state_morphism(a, target, 0, std::move(transition), std::move(outputs));
}

StateMorphism discard_state_morphism(const StateObjectPtr& a) {
    StateObjectPtr target = unit_state_object(a->base);
    std::vector<Nat> transition(a->states.size(), 0);
    std::vector<std::vector<FreeTerm>> outputs(a->states.size());
    return mk_state_morphism(a, target, 0, std::move(transition), std::move(outputs));
}

StateMorphism swap_state_morphism(const StateObjectPtr& a, const StateObjectPtr& b) {
    StateObjectPtr source = tensor_state(a, b);
    StateObjectPtr target = tensor_state(b, a);
    std::vector<Nat> transition(source->states.size());
    std::vector<std::vector<FreeTerm>> outputs(source->states.size());
    for (Nat ia = 0; ia < a->states.size(); ++ia) {
        for (Nat ib = 0; ib < b->states.size(); ++ib) {
            Nat x = pair_index(*a, *b, ia, ib);
            transition[x] = pair_index(*b, *a, ib, ia);
            Nat a_vars = a->vars_at(ia).size();
            Nat b_vars = b->vars_at(ib).size();
            std::vector<FreeTerm> row;
            for (Nat j = 0; j < b_vars; ++j)
                row.push_back(FreeTerm::var(source->base, source->vars[x], nat_add(a_vars, j)));
            for (Nat j = 0; j < a_vars; ++j)
                row.push_back(FreeTerm::var(source->base, source->vars[x], j));
            outputs[x] = std::move(row);
        }
    }
    return mk_state_morphism(source, target, 0, std::move(transition), std::move(outputs));
}

std::optional<Nat> inferred_min_degree(const StateMorphism& f) {
    Nat needed = 0;
    for (Nat x = 0; x < f.source->states.size(); ++x) {
        const VarContext& target_vars = f.target->vars_at(f.transition[x]);
        for (Nat j = 0; j < target_vars.size(); ++j) {
            Degree2 found = free_degree(f.outputs[x][j]);
            Degree2 var = target_vars[j].degree;
            if (found.linear > var.linear) return std::nullopt;
            if (found.constant <= var.constant) continue;
            if (var.linear == 0) return std::nullopt;
            Nat gap = found.constant - var.constant;
            needed = std::max(needed, (gap + var.linear - 1) / var.linear);
        }
    }
    return needed;
}

VarStore mk_var_store(StateObjectPtr object, std::string_view state,
                      std::vector<BaseMorphism> values) {
    VarStore store;
    store.state = object->index_of(state);
    const VarContext& ctx = object->vars_at(store.state);
    if (values.size() != ctx.size())
        throw EvaluationError("StoreMismatch: state '" + std::string(state) + "' has " +
                              std::to_string(ctx.size()) + " variables, got " +
                              std::to_string(values.size()) + " values");
    for (Nat j = 0; j < ctx.size(); ++j)
        if (!sig_fits(base_morphism_sig(values[j], object->base), ctx[j].sig))
            throw EvaluationError("StoreMismatch: value " + std::to_string(j) +
                                  " does not fit variable signature " + to_string(ctx[j].sig));
    store.object = std::move(object);
    store.values = std::move(values);
    return store;
}

VarStore apply_state_morphism(const StateMorphism& f, const VarStore& store) {
    if (!(*store.object == *f.source))
        throw EvaluationError("StoreMismatch: store object differs from morphism source");
    Nat x = store.state;
    VarStore out;
    out.object = f.target;
    out.state = f.transition.at(x);
    out.values.reserve(f.outputs[x].size());
    for (const FreeTerm& term : f.outputs[x])
        out.values.push_back(substitute_concrete(term, store.values));
    return out;
}

}  // namespace strmach

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strmach/freecat.hpp"

namespace strmach {

// An object of the filtered state category over a base category: a finite
// ordered state set with an ordered variable list (signature + N^2 degree)
// per state. State identifiers must not contain '|'; product states are
// rendered "x|y".
struct StateObject {
    BaseCategory base;
    std::vector<std::string> states;
    std::vector<VarContextPtr> vars;  // parallel to states

    Nat index_of(std::string_view state) const;  // throws EvaluationError
    const VarContext& vars_at(Nat state_index) const;

    friend bool operator==(const StateObject& a, const StateObject& b);
};

using StateObjectPtr = std::shared_ptr<const StateObject>;

StateObjectPtr mk_state_object(BaseCategory base, std::vector<std::string> states,
                               std::vector<VarContext> vars);

// The monoidal identity: one state, no variables.
StateObjectPtr unit_state_object(BaseCategory base);

// A single-state no-variable object is the monoidal identity up to canonical
// isomorphism; the tensor treats every such object strictly, so tensoring
// with one returns the other operand unchanged.
bool is_unit_like(const StateObject& a);

StateObjectPtr tensor_state(const StateObjectPtr& a, const StateObjectPtr& b);
StateObjectPtr tensor_power(const StateObjectPtr& a, Nat n);

// A morphism of the filtered state category. `outputs[x][j]` is the term,
// over the variables at source state x, producing target variable j at
// transition[x]. Every output must satisfy
//   free_degree(outputs[x][j]) <= deg2_shift(target var degree, degree).
struct StateMorphism {
    StateObjectPtr source;
    StateObjectPtr target;
    Nat degree = 0;  // the ell of the morphism
    std::vector<Nat> transition;            // per source state index
    std::vector<std::vector<FreeTerm>> outputs;  // per source state, per target variable
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;

    void fail(std::string msg) {
        ok = false;
        violations.push_back(std::move(msg));
    }
    std::string joined() const;
};

// Reports signature mismatches and shifted-degree-bound violations; never
// throws on a structurally complete morphism.
ValidationReport validate_state_morphism(const StateMorphism& f);

// Eagerly validated constructor (structure checks throw IllTypedError,
// bound violations throw ValidationError with the report text).
StateMorphism mk_state_morphism(StateObjectPtr source, StateObjectPtr target, Nat degree,
                                std::vector<Nat> transition,
                                std::vector<std::vector<FreeTerm>> outputs);

// Structure-checked but not bound-checked; for tests exercising validation.
StateMorphism mk_state_morphism_unchecked(StateObjectPtr source, StateObjectPtr target, Nat degree,
                                          std::vector<Nat> transition,
                                          std::vector<std::vector<FreeTerm>> outputs);

StateMorphism identity_state_morphism(const StateObjectPtr& a);
StateMorphism compose_state(const StateMorphism& g, const StateMorphism& f);  // f applied first
StateMorphism tensor_state_morphism(const StateMorphism& f, const StateMorphism& g);
StateMorphism copy_state_morphism(const StateObjectPtr& a);     // A -> A (x) A, degree 0
StateMorphism discard_state_morphism(const StateObjectPtr& a);  // A -> I, degree 0
StateMorphism swap_state_morphism(const StateObjectPtr& a, const StateObjectPtr& b);

// Least declared degree under which all outputs satisfy the bound; nullopt
// if a linear part already exceeds its variable's. Diagnostics only.
std::optional<Nat> inferred_min_degree(const StateMorphism& f);

// Runtime assignment of concrete morphisms to the variables at one state.
struct VarStore {
    StateObjectPtr object;
    Nat state = 0;
    std::vector<BaseMorphism> values;
};

VarStore mk_var_store(StateObjectPtr object, std::string_view state,
                      std::vector<BaseMorphism> values);

VarStore apply_state_morphism(const StateMorphism& f, const VarStore& store);

}  // namespace strmach

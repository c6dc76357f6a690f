#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strmach/builtins.hpp"
#include "strmach/machine.hpp"
#include "strmach/sweep.hpp"

namespace strmach {

// Coefficients of deg(output) <= a*deg(primary) + b*max aux degree + c,
// computed from the variable degrees of the state image.
struct OutputDegreeTriple {
    Nat a = 0;
    Nat b = 0;
    Nat c = 0;
    friend bool operator==(const OutputDegreeTriple&, const OutputDegreeTriple&) = default;
};

OutputDegreeTriple output_degree(const Transducer& t, Nat output_index);

// The duplication bound: maximal linear variable degree over all output
// states, capping how often any auxiliary generator can appear in an output.
Nat duplication_bound(const Transducer& t);

struct DuplicationReport {
    Nat bound = 0;
    Nat max_observed = 0;
    Nat checked_inputs = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Exhausts primary words up to the degree cap from every start state and
// counts auxiliary-generator occurrences in every realized output term.
DuplicationReport check_duplication(const Transducer& t, Nat max_input_degree,
                                    Exec exec = Exec::Parallel);

struct OutputBoundReport {
    std::vector<OutputDegreeTriple> triples;
    Nat checked = 0;
    Nat equality_hits = 0;  // inputs where some output meets its bound exactly
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Exhausts primary words up to the cap with extremal auxiliary degrees
// {0, 1, cap} per slot and asserts the output-degree inequality.
OutputBoundReport check_output_bound(const Transducer& t, Nat max_input_degree,
                                     Exec exec = Exec::Parallel);

// Static IPD bound A*n + C over total input degree n, propagated through a
// meta-free machine's DAG from the per-node output-degree triples.
struct LinearBound {
    Nat slope = 0;
    Nat offset = 0;
};

LinearBound ipd_linear_bound(const StringMachine& m);

// --- parameterized families ---------------------------------------------------

struct FamilyStage {
    std::optional<Nat> upto;  // rule applies while N <= upto; absent = open-ended
    TransducerPtr transducer;
    OutputDegreeTriple declared;  // user-declared (a_N, b_N, c_N)
};

struct FamilySpec {
    std::string name;
    TransducerPtr base;  // K_1
    std::vector<FamilyStage> stages;
};

const FamilyStage& family_stage_for(const FamilySpec& f, Nat n);

struct FamilyRow {
    Nat n = 0;
    Nat ipd_value = 0;
    double doubling_ratio = 0.0;  // IPD_{2N}/IPD_N when 2N is in range
    bool has_ratio = false;
};

struct FamilyReport {
    std::vector<FamilyRow> rows;
    Nat expansion_stages = 0;      // count of N with declared a_N + b_N > 1
    double fitted_exponent = 0.0;  // log-log slope over the upper half of N
};

// Materializes K_1..K_n_max by composing each stage's designated output into
// the next transducer's primary input, measures IPD on the given word, and
// verifies the declared parameters dominate the computed triples (the b
// component is exempt while stage auxiliaries are fed only constants of
// degree zero, as they are in this chain construction). Throws
// ValidationError("DeclaredParametersTooSmall...") otherwise.
FamilyReport family_growth(const FamilySpec& f, Nat n_max, const TapeCategory& cat,
                           const std::string& word);

// --- incremental state evaluation ----------------------------------------------

// One construction step for the primary input g of a state-only transducer;
// the tracked morphisms may mention the current g at most once.
struct IncOp {
    enum class Kind { Replace, PostCompose, PrePostCompose, Branch };
    Kind kind = Kind::Replace;
    TapeTerm first = TapeTerm::id(1);   // Replace/PostCompose payload, pre, or alpha
    TapeTerm second = TapeTerm::id(1);  // post, or beta
    std::vector<std::optional<TapeTerm>> branches;  // Branch fills; the g slot is nullopt
};

IncOp inc_replace(TapeTerm constant);
IncOp inc_post_compose(TapeTerm endo);
IncOp inc_pre_post_compose(TapeTerm pre, TapeTerm post);
IncOp inc_branch(TapeTerm alpha, std::vector<std::optional<TapeTerm>> branches, TapeTerm beta);

// Tracks, for every possible start state, the state reached after the
// accumulated g; the footprint never depends on deg(g).
class IncrementalSession {
  public:
    IncrementalSession(TransducerPtr t, std::string_view start);

    void apply(const IncOp& op);
    const std::string& state() const;
    Nat footprint() const { return tracked_.size(); }
    Nat operations() const { return ops_; }

  private:
    TransducerPtr transducer_;
    Nat start_ = 0;
    std::vector<Nat> tracked_;  // state after g from each start state
    Nat ops_ = 0;
};

// --- regularity probe ------------------------------------------------------------

// Counts distinct residual classes among prefixes of length <= max_len,
// distinguishing prefixes by acceptance over all suffixes of length
// <= max_len. Requires a meta-free accepting machine.
Nat residual_probe(const StringMachine& m, const TapeCategory& cat, Nat max_len,
                   Exec exec = Exec::Parallel);

}  // namespace strmach

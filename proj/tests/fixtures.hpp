#pragma once

// Shared fixture transducers, DFAs and random generators used across the
// unit suites and the acceptance harness.

#include <random>
#include <utility>

#include "strmach/analysis.hpp"
#include "strmach/builtins.hpp"

namespace strmach::fixtures {

std::shared_ptr<const TapeCategory> ab_category();
std::shared_ptr<const TapeCategory> abr_category();

// One state, one accumulator variable; re-emits the consumed word.
TransducerPtr pass_transducer(std::shared_ptr<const TapeCategory> cat);

// Two states; the first consumed character doubles the stored auxiliary and
// every character is appended twice, so deg(out) = 2*deg(aux) + 2*deg(word).
// Tight against its (2, 2, 0) output-degree triple, with auxiliary
// multiplicity 2.
TransducerPtr duplicator_transducer(std::shared_ptr<const TapeCategory> cat);

// Emits the reserved generator for every nonempty input.
TransducerPtr constant_output_transducer(std::shared_ptr<const TapeCategory> cat_with_r);

Dfa even_a_dfa();
Dfa ends_b_dfa();
// Three states: 'a' steps the counter, 'b' swaps two of them.
Dfa mod3_dfa();

// State-only transducer over a category with splitting and merging
// generators (s: X->X^2, m: X^2->X), so incremental Branch operations have
// material to work with.
TransducerPtr branching_state_transducer();

// Random but always-valid filtered state morphisms over the ab tape base
// (endomorphism variable signatures only).
class RandomMorphisms {
  public:
    explicit RandomMorphisms(unsigned seed);

    StateObjectPtr random_object();
    StateMorphism random_morphism(const StateObjectPtr& source, const StateObjectPtr& target);
    std::pair<StateMorphism, StateMorphism> random_composable_pair();

  private:
    Nat pick(Nat lo, Nat hi);

    std::mt19937 rng_;
    std::shared_ptr<const TapeCategory> cat_;
    BaseCategory base_;
};

}  // namespace strmach::fixtures

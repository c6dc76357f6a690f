#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strmach/statecat.hpp"

namespace strmach {

// A filtered deterministic transducer, represented intensionally: the
// strong monoidal structure functor F is stored as its images on the input
// category's generators; images of arbitrary terms are computed by
// structural recursion. state_image is F(X).
struct Transducer {
    std::string name;
    std::shared_ptr<const TapeCategory> input_cat;
    BaseCategory output_cat;
    Nat primary_in = 1;
    Nat primary_out = 1;
    std::vector<PortSig> aux_signatures;
    std::vector<PortSig> output_signatures;
    StateObjectPtr state_image;
    std::map<std::string, StateMorphism> generator_images;
    std::optional<std::string> initial_state;  // machine-wiring metadata

    const StateMorphism& image_of(std::string_view gen) const;
    StateObjectPtr input_state_object() const;   // F(X^m)
    StateObjectPtr output_state_object() const;  // F(X^n)
};

using TransducerPtr = std::shared_ptr<const Transducer>;

// Checks the filtered-functor bound on every generator image, both prefix
// conditions, image object shapes, and every image's degree bounds.
ValidationReport validate_transducer(const Transducer& t);

// Eager constructor; throws ValidationError with the report text.
TransducerPtr mk_transducer(Transducer t);

// F(term) by structural recursion: generators from the image table, Seq to
// composition, Par to tensor, copy/discard/swap to the Markov structure of
// the state category. degree(result) <= term_degree(term).
StateMorphism functor_image(const Transducer& t, const TapeTerm& term);

struct TransducerResult {
    std::string output_state;
    std::vector<BaseMorphism> outputs;  // one per output signature
    Nat primary_degree_consumed = 0;
};

// Applies F(primary) to the variable store (start, aux). aux must cover the
// variable prefix at start; longer aux lists are truncated to it.
TransducerResult evaluate_transducer(const Transducer& t, std::string_view start,
                                     const TapeTerm& primary,
                                     const std::vector<BaseMorphism>& aux);

}  // namespace strmach

#pragma once

#include <map>
#include <string>
#include <vector>

#include "strmach/machine.hpp"

namespace strmach {

// The character-stripping transducer of the palindrome construction: three
// states; from the start state, alpha moves to the accepting state storing
// the identity, anything else moves to the rejecting state storing r; the
// accepting state appends each further character, the rejecting state is
// absorbing. Output: the input minus its first character iff it starts with
// alpha, r otherwise.
TransducerPtr strip_transducer(std::shared_ptr<const TapeCategory> alphabet,
                               const std::string& alpha, const std::string& reserved);

// The machine-building transducer: one state, one machine-valued variable,
// prepends the strip transducer for each consumed character.
TransducerPtr prepend_builder_transducer(std::shared_ptr<const TapeCategory> alphabet,
                                         const std::string& reserved);

// The meta-vertex palindrome recognizer: the builder's machine output and a
// copy of the input word feed a level-1 meta vertex. Outputs id on
// palindromes and r otherwise; words containing the reserved generator are
// rejected at evaluation time.
MachinePtr palindrome_machine(std::shared_ptr<const TapeCategory> alphabet,
                              const std::string& reserved);

// A classical DFA over single-character generators.
struct Dfa {
    std::string name;
    std::vector<std::string> states;
    std::string start;
    std::vector<std::string> accepting;
    // transition[state][character] = state; must be total
    std::map<std::string, std::map<std::string, std::string>> transition;
};

// Embeds a DFA as a transducer with state-space output only: no variables,
// generator images are pure transitions.
TransducerPtr dfa_transducer(const Dfa& dfa, std::shared_ptr<const TapeCategory> alphabet);

// DFA embedding that additionally accumulates the consumed word in one
// variable and re-emits it, so transducers can be chained on one input.
TransducerPtr dfa_pass_transducer(const Dfa& dfa, std::shared_ptr<const TapeCategory> alphabet);

// Chain of pass-through DFA transducers over a common alphabet, each feeding
// the re-emitted word to the next; accepts iff every component accepts.
// Description size is linear in the sum of the DFA sizes, against the
// product automaton's state count.
MachinePtr intersection_chain(const std::vector<Dfa>& dfas,
                              std::shared_ptr<const TapeCategory> alphabet, std::string name);

}  // namespace strmach

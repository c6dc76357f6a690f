#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "strmach/degrees.hpp"
#include "strmach/errors.hpp"

namespace strmach {

// A tape category: free copy-discard symmetric monoidal category over one
// object X with finitely many generators X^m -> X^n of positive degree.
// Objects are represented by their width n (for X^n).
struct TapeGenerator {
    std::string name;
    Nat arity_in = 1;
    Nat arity_out = 1;
    Nat degree = 1;

    friend bool operator==(const TapeGenerator&, const TapeGenerator&) = default;
};

struct TapeCategory {
    std::string name;
    std::vector<TapeGenerator> generators;

    const TapeGenerator* find(std::string_view gen) const;
    const TapeGenerator& at(std::string_view gen) const;  // throws UnknownGeneratorError

    friend bool operator==(const TapeCategory&, const TapeCategory&) = default;
};

// Validates generator-name uniqueness and degree positivity.
TapeCategory mk_tape_category(std::string name, std::vector<TapeGenerator> generators);

// Convenience: one endomorphism generator of degree 1 per character.
TapeCategory alphabet_category(std::string name, std::string_view characters);

// String-diagram terms over a tape category. Immutable shared trees.
struct TapeNode;

class TapeTerm {
  public:
    static TapeTerm gen(std::string name);
    static TapeTerm id(Nat width);
    static TapeTerm seq(TapeTerm first, TapeTerm second);  // first applied, then second
    static TapeTerm par(TapeTerm left, TapeTerm right);
    static TapeTerm copy();
    static TapeTerm discard();
    static TapeTerm swap();

    const TapeNode& node() const { return *node_; }

    friend bool operator==(const TapeTerm& a, const TapeTerm& b) { return structurally_equal(a, b); }

    static bool structurally_equal(const TapeTerm& a, const TapeTerm& b);

  private:
    explicit TapeTerm(std::shared_ptr<const TapeNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const TapeNode> node_;
};

struct GenNode {
    std::string name;
};
struct IdNode {
    Nat width = 1;
};
struct SeqNode {
    TapeTerm first;
    TapeTerm second;
};
struct ParNode {
    TapeTerm left;
    TapeTerm right;
};
struct CopyNode {};
struct DiscardNode {};
struct SwapNode {};

struct TapeNode {
    std::variant<GenNode, IdNode, SeqNode, ParNode, CopyNode, DiscardNode, SwapNode> v;
};

struct TermSignature {
    Nat in = 0;
    Nat out = 0;
    friend bool operator==(const TermSignature&, const TermSignature&) = default;
};

// (in-width, out-width) of a well-typed term; throws IllTypedError on a Seq
// whose widths do not meet, UnknownGeneratorError on unresolved names.
TermSignature term_signature(const TapeTerm& t, const TapeCategory& cat);

// Sum of generator degrees over all Gen occurrences; structural nodes are
// degree zero. Requires t well-typed in cat.
Nat term_degree(const TapeTerm& t, const TapeCategory& cat);

// A string as a Seq chain of endomorphism generators, first character
// applied first; "" maps to id 1.
TapeTerm encode_word(std::string_view word, const TapeCategory& cat);

// Inverse of encode_word on terms that are Seq/Id chains of endomorphism
// generators (identity factors are dropped). nullopt if the term contains
// copy/discard/swap/par or a non-endomorphism generator.
std::optional<std::vector<std::string>> flatten_word(const TapeTerm& t, const TapeCategory& cat);

// Term grammar:  term := seq ; seq := par (';' par)* ; par := atom ('*' atom)*
//                atom := 'id' NAT | 'copy' | 'discard' | 'swap' | IDENT | '(' term ')'
// ';' is diagrammatic order (left operand applied first) and binds looser
// than '*'.
TapeTerm parse_term(std::string_view text, const TapeCategory& cat);
std::string term_to_string(const TapeTerm& t);

}  // namespace strmach

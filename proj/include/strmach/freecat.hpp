#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "strmach/degrees.hpp"
#include "strmach/signatures.hpp"
#include "strmach/tape.hpp"

namespace strmach {

// The category a transducer writes into: a tape category, or the category
// whose morphisms are string machines of meta level strictly below `level`.
struct BaseCategory {
    enum class Kind { Tape, Machines };
    Kind kind = Kind::Tape;
    std::shared_ptr<const TapeCategory> tape;  // Kind::Tape
    Nat level = 0;                             // Kind::Machines, >= 1

    static BaseCategory tape_base(std::shared_ptr<const TapeCategory> cat);
    static BaseCategory machines(Nat level);

    bool is_tape() const { return kind == Kind::Tape; }
    const TapeCategory& tape_cat() const;

    friend bool operator==(const BaseCategory& a, const BaseCategory& b);
};

using MachinePtr = std::shared_ptr<const StringMachine>;

// A concrete morphism of a base category.
using BaseMorphism = std::variant<TapeTerm, MachinePtr>;

// Signature/degree of concrete base morphisms. Machine cases are defined in
// machine.cpp; a machine's degree is its transducer count.
PortSig base_morphism_sig(const BaseMorphism& m, const BaseCategory& base);
Nat base_morphism_degree(const BaseMorphism& m, const BaseCategory& base);
bool base_morphism_equal(const BaseMorphism& a, const BaseMorphism& b);
std::string base_morphism_to_string(const BaseMorphism& m);

PortSig machine_value_sig(const StringMachine& m);          // defined in machine.cpp
Nat machine_value_degree(const StringMachine& m);           // defined in machine.cpp
const std::string& machine_value_name(const StringMachine& m);  // defined in machine.cpp

// Declaration of one free generator: its signature and N^2 degree.
struct VarDecl {
    PortSig sig;
    Degree2 degree;
    friend bool operator==(const VarDecl&, const VarDecl&);
};

using VarContext = std::vector<VarDecl>;
using VarContextPtr = std::shared_ptr<const VarContext>;

// Terms of the freely generated N^2-filtered category over a base category:
// base-morphism leaves plus numbered variable generators, under the same
// structural nodes as tape terms. Immutable shared trees; the context and
// base category ride along with every term value.
struct FreeNode;
using FreeNodePtr = std::shared_ptr<const FreeNode>;

struct FBase {
    BaseMorphism value;
};
struct FVar {
    Nat index = 0;
};
struct FId {
    Nat width = 1;
};
struct FSeq {
    FreeNodePtr first;
    FreeNodePtr second;
};
struct FPar {
    FreeNodePtr left;
    FreeNodePtr right;
};
struct FCopy {};
struct FDiscard {};
struct FSwap {};

struct FreeNode {
    std::variant<FBase, FVar, FId, FSeq, FPar, FCopy, FDiscard, FSwap> v;
};

class FreeTerm {
  public:
    static FreeTerm var(BaseCategory base, VarContextPtr ctx, Nat index);
    static FreeTerm lift(BaseCategory base, VarContextPtr ctx, BaseMorphism value);
    static FreeTerm id(BaseCategory base, VarContextPtr ctx, Nat width);
    static FreeTerm copy(BaseCategory base, VarContextPtr ctx);
    static FreeTerm discard(BaseCategory base, VarContextPtr ctx);
    static FreeTerm swap(BaseCategory base, VarContextPtr ctx);
    static FreeTerm seq(FreeTerm first, FreeTerm second);
    static FreeTerm par(FreeTerm left, FreeTerm right);

    const FreeNode& node() const { return *root_; }
    const FreeNodePtr& root() const { return root_; }
    const BaseCategory& base() const { return base_; }
    const VarContextPtr& context() const { return ctx_; }

    static bool structurally_equal(const FreeTerm& a, const FreeTerm& b);

    friend FreeTerm substitute_free(const FreeTerm& t, const std::vector<FreeTerm>& fills,
                                    VarContextPtr result_ctx);

  private:
    FreeTerm(BaseCategory base, VarContextPtr ctx, FreeNodePtr root)
        : base_(std::move(base)), ctx_(std::move(ctx)), root_(std::move(root)) {}

    BaseCategory base_;
    VarContextPtr ctx_;
    FreeNodePtr root_;
};

// Signature of a well-typed term; throws IllTypedError otherwise. Over a
// machines base only Seq/Var/Base structure is admitted (machine-level
// monoidal structure lives in the machine layer, not in terms).
PortSig free_signature(const FreeTerm& t);

// (sum of variable-occurrence linear parts, sum of variable-occurrence
// constant parts + sum of base-leaf degrees). Strictly additive over Seq
// and Par. Computed, never cached.
Degree2 free_degree(const FreeTerm& t);

// Number of Var(i) leaves.
Nat var_occurrences(const FreeTerm& t, Nat index);

// Replace every Var(i) with the concrete morphism fills[i] and collapse the
// result to a single base morphism. fills[i] must fit the declared signature.
BaseMorphism substitute_concrete(const FreeTerm& t, const std::vector<BaseMorphism>& fills);

// Replace every Var(i) with the term fills[i]; all fills must share one
// context, which becomes the context of the result. When fills may be empty
// the result context is supplied explicitly.
FreeTerm substitute_free(const FreeTerm& t, const std::vector<FreeTerm>& fills,
                         VarContextPtr result_ctx = nullptr);

// Collapse a variable-free term to one base morphism. Machine-base folding
// is defined in machine.cpp (sequential wiring of the leaves).
BaseMorphism realize_base_term(const FreeTerm& t);
MachinePtr realize_machine_term(const FreeTerm& t);  // defined in machine.cpp

using MachineResolver = std::function<MachinePtr(const std::string&)>;

// Shared term grammar plus 'var' NAT leaves (written var0, var1, ...). Over
// a machines base, identifiers resolve through the supplied resolver.
FreeTerm parse_free_term(std::string_view text, BaseCategory base, VarContextPtr ctx,
                         const MachineResolver& machines = {});
std::string free_term_to_string(const FreeTerm& t);

}  // namespace strmach

#include "strmach/freecat.hpp"

#include <algorithm>

#include "strmach/detail/term_parser.hpp"
#include "strmach/util.hpp"

namespace strmach {

// --- signatures ------------------------------------------------------------

bool same_state_space(const StateSpace& a, const StateSpace& b) {
    if (a.size() != b.size()) return false;
    StateSpace sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return sa == sb;
}

bool operator==(const MachinePortSig& a, const MachinePortSig& b) {
    if (a.level != b.level) return false;
    if (!a.dom != !b.dom || !a.cod != !b.cod) return false;
    if (a.dom && !(*a.dom == *b.dom)) return false;
    if (a.cod && !(*a.cod == *b.cod)) return false;
    return true;
}

bool operator==(const MachineObject& a, const MachineObject& b) {
    if (a.state_spaces.size() != b.state_spaces.size()) return false;
    for (std::size_t i = 0; i < a.state_spaces.size(); ++i)
        if (!same_state_space(a.state_spaces[i], b.state_spaces[i])) return false;
    return a.morphism_sigs == b.morphism_sigs;
}

bool sig_fits(const PortSig& actual, const PortSig& declared) {
    if (const auto* ta = std::get_if<TapePortSig>(&actual)) {
        const auto* td = std::get_if<TapePortSig>(&declared);
        return td && *ta == *td;
    }
    const auto& ma = std::get<MachinePortSig>(actual);
    const auto* md = std::get_if<MachinePortSig>(&declared);
    if (!md) return false;
    if (ma.level > md->level) return false;
    return *ma.dom == *md->dom && *ma.cod == *md->cod;
}

std::string to_string(const MachineObject& obj) {
    std::string out = "(";
    for (std::size_t i = 0; i < obj.state_spaces.size(); ++i) {
        if (i) out += ",";
        out += "S" + std::to_string(obj.state_spaces[i].size());
    }
    out += ";";
    for (std::size_t i = 0; i < obj.morphism_sigs.size(); ++i) {
        if (i) out += ",";
        out += to_string(obj.morphism_sigs[i]);
    }
    return out + ")";
}

std::string to_string(const PortSig& sig) {
    return std::visit(
        overloaded{
            [](const TapePortSig& t) {
                return t.category + ":" + std::to_string(t.in) + "->" + std::to_string(t.out);
            },
            [](const MachinePortSig& m) {
                return "mach@" + std::to_string(m.level) + ":" + to_string(*m.dom) + "->" +
                       to_string(*m.cod);
            },
        },
        sig);
}

// --- base category ----------------------------------------------------------

BaseCategory BaseCategory::tape_base(std::shared_ptr<const TapeCategory> cat) {
    BaseCategory b;
    b.kind = Kind::Tape;
    b.tape = std::move(cat);
    return b;
}

BaseCategory BaseCategory::machines(Nat level) {
    if (level == 0) throw ValidationError("machines base category requires level >= 1");
    BaseCategory b;
    b.kind = Kind::Machines;
    b.level = level;
    return b;
}

const TapeCategory& BaseCategory::tape_cat() const {
    if (!is_tape() || !tape) throw IllTypedError("base category is not a tape category");
    return *tape;
}

bool operator==(const BaseCategory& a, const BaseCategory& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == BaseCategory::Kind::Machines) return a.level == b.level;
    return a.tape == b.tape || (a.tape && b.tape && *a.tape == *b.tape);
}

bool operator==(const VarDecl& a, const VarDecl& b) {
    return a.sig == b.sig && a.degree == b.degree;
}

// --- base morphisms ----------------------------------------------------------

PortSig base_morphism_sig(const BaseMorphism& m, const BaseCategory& base) {
    return std::visit(overloaded{
                          [&](const TapeTerm& t) -> PortSig {
                              const auto& cat = base.tape_cat();
                              auto sig = term_signature(t, cat);
                              return TapePortSig{cat.name, sig.in, sig.out};
                          },
                          [&](const MachinePtr& m2) -> PortSig {
                              if (!m2) throw IllTypedError("null machine value");
                              return machine_value_sig(*m2);
                          },
                      },
                      m);
}

Nat base_morphism_degree(const BaseMorphism& m, const BaseCategory& base) {
    return std::visit(
        overloaded{
            [&](const TapeTerm& t) { return term_degree(t, base.tape_cat()); },
            [&](const MachinePtr& m2) {
                if (!m2) throw IllTypedError("null machine value");
                return machine_value_degree(*m2);
            },
        },
        m);
}

std::string base_morphism_to_string(const BaseMorphism& m) {
    return std::visit(overloaded{
                          [](const TapeTerm& t) { return term_to_string(t); },
                          [](const MachinePtr& p) { return machine_value_name(*p); },
                      },
                      m);
}

bool base_morphism_equal(const BaseMorphism& a, const BaseMorphism& b) {
    if (a.index() != b.index()) return false;
    if (const auto* t = std::get_if<TapeTerm>(&a))
        return TapeTerm::structurally_equal(*t, std::get<TapeTerm>(b));
    return std::get<MachinePtr>(a) == std::get<MachinePtr>(b);
}

// --- free terms ---------------------------------------------------------------

namespace {

VarContextPtr empty_context() {
    static const VarContextPtr ctx = std::make_shared<VarContext>();
    return ctx;
}

FreeNodePtr mk(FreeNode node) { return std::make_shared<const FreeNode>(std::move(node)); }

bool context_equal(const VarContextPtr& a, const VarContextPtr& b) {
    if (a == b) return true;
    if (!a || !b) return (!a || a->empty()) && (!b || b->empty());
    return *a == *b;
}

}  // namespace

FreeTerm FreeTerm::var(BaseCategory base, VarContextPtr ctx, Nat index) {
    if (!ctx || index >= ctx->size())
        throw IllTypedError("variable index " + std::to_string(index) + " outside context of size " +
                            std::to_string(ctx ? ctx->size() : 0));
    return FreeTerm(std::move(base), std::move(ctx), mk(FreeNode{FVar{index}}));
}

FreeTerm FreeTerm::lift(BaseCategory base, VarContextPtr ctx, BaseMorphism value) {
    if (!ctx) ctx = empty_context();
    return FreeTerm(std::move(base), std::move(ctx), mk(FreeNode{FBase{std::move(value)}}));
}

FreeTerm FreeTerm::id(BaseCategory base, VarContextPtr ctx, Nat width) {
    if (!ctx) ctx = empty_context();
    return FreeTerm(std::move(base), std::move(ctx), mk(FreeNode{FId{width}}));
}

FreeTerm FreeTerm::copy(BaseCategory base, VarContextPtr ctx) {
    if (!ctx) ctx = empty_context();
    return FreeTerm(std::move(base), std::move(ctx), mk(FreeNode{FCopy{}}));
}

FreeTerm FreeTerm::discard(BaseCategory base, VarContextPtr ctx) {
    if (!ctx) ctx = empty_context();
    return FreeTerm(std::move(base), std::move(ctx), mk(FreeNode{FDiscard{}}));
}

FreeTerm FreeTerm::swap(BaseCategory base, VarContextPtr ctx) {
    if (!ctx) ctx = empty_context();
    return FreeTerm(std::move(base), std::move(ctx), mk(FreeNode{FSwap{}}));
}

FreeTerm FreeTerm::seq(FreeTerm first, FreeTerm second) {
    if (!(first.base_ == second.base_) || !context_equal(first.ctx_, second.ctx_))
        throw IllTypedError("ContextMismatch: sequential composition across different contexts");
    return FreeTerm(first.base_, first.ctx_, mk(FreeNode{FSeq{first.root_, second.root_}}));
}

FreeTerm FreeTerm::par(FreeTerm left, FreeTerm right) {
    if (!(left.base_ == right.base_) || !context_equal(left.ctx_, right.ctx_))
        throw IllTypedError("ContextMismatch: parallel product across different contexts");
    return FreeTerm(left.base_, left.ctx_, mk(FreeNode{FPar{left.root_, right.root_}}));
}

bool FreeTerm::structurally_equal(const FreeTerm& a, const FreeTerm& b) {
    std::function<bool(const FreeNodePtr&, const FreeNodePtr&)> eq =
        [&](const FreeNodePtr& x, const FreeNodePtr& y) -> bool {
        if (x == y) return true;
        if (x->v.index() != y->v.index()) return false;
        return std::visit(
            overloaded{
                [&](const FBase& n) {
                    return base_morphism_equal(n.value, std::get<FBase>(y->v).value);
                },
                [&](const FVar& n) { return n.index == std::get<FVar>(y->v).index; },
                [&](const FId& n) { return n.width == std::get<FId>(y->v).width; },
                [&](const FSeq& n) {
                    const auto& m = std::get<FSeq>(y->v);
                    return eq(n.first, m.first) && eq(n.second, m.second);
                },
                [&](const FPar& n) {
                    const auto& m = std::get<FPar>(y->v);
                    return eq(n.left, m.left) && eq(n.right, m.right);
                },
                [&](const FCopy&) { return true; },
                [&](const FDiscard&) { return true; },
                [&](const FSwap&) { return true; },
            },
            x->v);
    };
    return eq(a.root(), b.root());
}

namespace {

struct WidthSig {
    Nat in, out;
};

WidthSig tape_widths(const PortSig& sig, const std::string& cat_name) {
    const auto* t = std::get_if<TapePortSig>(&sig);
    if (!t || t->category != cat_name)
        throw IllTypedError("signature " + to_string(sig) + " is not in tape category '" +
                            cat_name + "'");
    return WidthSig{t->in, t->out};
}

WidthSig tape_signature_of(const FreeNodePtr& n, const BaseCategory& base, const VarContext& ctx) {
    const auto& cat = base.tape_cat();
    return std::visit(
        overloaded{
            [&](const FBase& b) {
                if (!std::holds_alternative<TapeTerm>(b.value))
                    throw IllTypedError("machine value in a tape-category term");
                auto sig = term_signature(std::get<TapeTerm>(b.value), cat);
                return WidthSig{sig.in, sig.out};
            },
            [&](const FVar& v) { return tape_widths(ctx.at(v.index).sig, cat.name); },
            [&](const FId& i) { return WidthSig{i.width, i.width}; },
            [&](const FSeq& s) {
                auto a = tape_signature_of(s.first, base, ctx);
                auto b = tape_signature_of(s.second, base, ctx);
                if (a.out != b.in)
                    throw IllTypedError("IllTyped: sequential composition mismatch in free term");
                return WidthSig{a.in, b.out};
            },
            [&](const FPar& p) {
                auto a = tape_signature_of(p.left, base, ctx);
                auto b = tape_signature_of(p.right, base, ctx);
                return WidthSig{nat_add(a.in, b.in), nat_add(a.out, b.out)};
            },
            [&](const FCopy&) { return WidthSig{1, 2}; },
            [&](const FDiscard&) { return WidthSig{1, 0}; },
            [&](const FSwap&) { return WidthSig{2, 2}; },
        },
        n->v);
}

MachinePortSig machine_signature_of(const FreeNodePtr& n, const BaseCategory& base,
                                    const VarContext& ctx) {
    return std::visit(
        overloaded{
            [&](const FBase& b) -> MachinePortSig {
                if (!std::holds_alternative<MachinePtr>(b.value))
                    throw IllTypedError("tape term used as a machine-category morphism");
                const auto& m = std::get<MachinePtr>(b.value);
                if (!m) throw IllTypedError("null machine value");
                return std::get<MachinePortSig>(machine_value_sig(*m));
            },
            [&](const FVar& v) -> MachinePortSig {
                const auto* s = std::get_if<MachinePortSig>(&ctx.at(v.index).sig);
                if (!s) throw IllTypedError("tape-signature variable in a machines-base term");
                if (s->level > base.level)
                    throw IllTypedError("variable meta level exceeds base category level");
                return *s;
            },
            [&](const FSeq& s) -> MachinePortSig {
                auto a = machine_signature_of(s.first, base, ctx);
                auto b = machine_signature_of(s.second, base, ctx);
                if (!(*a.cod == *b.dom))
                    throw IllTypedError(
                        "IllTyped: machine composition interface mismatch in free term");
                return MachinePortSig{std::max(a.level, b.level), a.dom, b.cod};
            },
            [&](const auto&) -> MachinePortSig {
                throw IllTypedError(
                    "only sequential structure is supported in machines-base terms");
            },
        },
        n->v);
}

}  // namespace

PortSig free_signature(const FreeTerm& t) {
    const VarContext& ctx = t.context() ? *t.context() : VarContext{};
    if (t.base().is_tape()) {
        auto w = tape_signature_of(t.root(), t.base(), ctx);
        return TapePortSig{t.base().tape_cat().name, w.in, w.out};
    }
    return machine_signature_of(t.root(), t.base(), ctx);
}

namespace {

void accumulate_degree(const FreeNodePtr& n, const BaseCategory& base, const VarContext& ctx,
                       Degree2& acc) {
    std::visit(overloaded{
                   [&](const FBase& b) {
                       acc = acc + Degree2{0, base_morphism_degree(b.value, base)};
                   },
                   [&](const FVar& v) { acc = acc + ctx.at(v.index).degree; },
                   [&](const FSeq& s) {
                       accumulate_degree(s.first, base, ctx, acc);
                       accumulate_degree(s.second, base, ctx, acc);
                   },
                   [&](const FPar& p) {
                       accumulate_degree(p.left, base, ctx, acc);
                       accumulate_degree(p.right, base, ctx, acc);
                   },
                   [&](const auto&) {},
               },
               n->v);
}

void count_vars(const FreeNodePtr& n, Nat index, Nat& acc) {
    std::visit(overloaded{
                   [&](const FVar& v) {
                       if (v.index == index) ++acc;
                   },
                   [&](const FSeq& s) {
                       count_vars(s.first, index, acc);
                       count_vars(s.second, index, acc);
                   },
                   [&](const FPar& p) {
                       count_vars(p.left, index, acc);
                       count_vars(p.right, index, acc);
                   },
                   [&](const auto&) {},
               },
               n->v);
}

FreeNodePtr splice(const FreeNodePtr& n, const std::vector<FreeNodePtr>& fills) {
    return std::visit(
        overloaded{
            [&](const FVar& v) { return fills.at(v.index); },
            [&](const FSeq& s) {
                return mk(FreeNode{FSeq{splice(s.first, fills), splice(s.second, fills)}});
            },
            [&](const FPar& p) {
                return mk(FreeNode{FPar{splice(p.left, fills), splice(p.right, fills)}});
            },
            [&](const auto&) { return n; },
        },
        n->v);
}

}  // namespace

Degree2 free_degree(const FreeTerm& t) {
    free_signature(t);  // reject ill-typed terms
    Degree2 acc{0, 0};
    accumulate_degree(t.root(), t.base(), t.context() ? *t.context() : VarContext{}, acc);
    return acc;
}

Nat var_occurrences(const FreeTerm& t, Nat index) {
    Nat acc = 0;
    count_vars(t.root(), index, acc);
    return acc;
}

FreeTerm substitute_free(const FreeTerm& t, const std::vector<FreeTerm>& fills,
                         VarContextPtr result_ctx) {
    const VarContext& ctx = t.context() ? *t.context() : VarContext{};
    if (fills.size() != ctx.size())
        throw IllTypedError("SignatureMismatch: expected " + std::to_string(ctx.size()) +
                            " fills, got " + std::to_string(fills.size()));
    VarContextPtr shared = result_ctx        ? std::move(result_ctx)
                           : fills.empty()   ? empty_context()
                                             : fills.front().context();
    std::vector<FreeNodePtr> roots;
    roots.reserve(fills.size());
    for (std::size_t i = 0; i < fills.size(); ++i) {
        if (!(fills[i].base() == t.base()) || !context_equal(fills[i].context(), shared))
            throw IllTypedError("ContextMismatch: fill " + std::to_string(i) +
                                " does not share the common context");
        if (!sig_fits(free_signature(fills[i]), ctx[i].sig))
            throw IllTypedError("SignatureMismatch: fill " + std::to_string(i) + " has signature " +
                                to_string(free_signature(fills[i])) + ", variable declares " +
                                to_string(ctx[i].sig));
        roots.push_back(fills[i].root());
    }
    return FreeTerm(t.base(), shared, splice(t.root(), roots));
}

BaseMorphism realize_base_term(const FreeTerm& t) {
    if (t.base().is_tape()) {
        std::function<TapeTerm(const FreeNodePtr&)> build =
            [&](const FreeNodePtr& n) -> TapeTerm {
            return std::visit(
                overloaded{
                    [&](const FBase& b) {
                        if (!std::holds_alternative<TapeTerm>(b.value))
                            throw IllTypedError("machine value in a tape-category term");
                        return std::get<TapeTerm>(b.value);
                    },
                    [&](const FVar&) -> TapeTerm {
                        throw IllTypedError("cannot realize a term with free variables");
                    },
                    [&](const FId& i) { return TapeTerm::id(i.width); },
                    [&](const FSeq& s) { return TapeTerm::seq(build(s.first), build(s.second)); },
                    [&](const FPar& p) { return TapeTerm::par(build(p.left), build(p.right)); },
                    [&](const FCopy&) { return TapeTerm::copy(); },
                    [&](const FDiscard&) { return TapeTerm::discard(); },
                    [&](const FSwap&) { return TapeTerm::swap(); },
                },
                n->v);
        };
        return build(t.root());
    }
    return realize_machine_term(t);
}

BaseMorphism substitute_concrete(const FreeTerm& t, const std::vector<BaseMorphism>& fills) {
    const VarContext& ctx = t.context() ? *t.context() : VarContext{};
    if (fills.size() < ctx.size())
        throw IllTypedError("SignatureMismatch: expected " + std::to_string(ctx.size()) +
                            " fills, got " + std::to_string(fills.size()));
    std::vector<FreeTerm> lifted;
    lifted.reserve(ctx.size());
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        if (!sig_fits(base_morphism_sig(fills[i], t.base()), ctx[i].sig))
            throw IllTypedError("SignatureMismatch: fill " + std::to_string(i) + " has signature " +
                                to_string(base_morphism_sig(fills[i], t.base())) +
                                ", variable declares " + to_string(ctx[i].sig));
        lifted.push_back(FreeTerm::lift(t.base(), nullptr, fills[i]));
    }
    return realize_base_term(substitute_free(t, lifted));
}

// --- grammar -------------------------------------------------------------------

namespace {

struct FreeBuilder {
    using Term = FreeTerm;
    BaseCategory base;
    VarContextPtr ctx;
    const MachineResolver& machines;

    Term id(Nat w) { return FreeTerm::id(base, ctx, w); }
    Term copy() { return FreeTerm::copy(base, ctx); }
    Term discard() { return FreeTerm::discard(base, ctx); }
    Term swap() { return FreeTerm::swap(base, ctx); }
    Term seq(Term a, Term b) { return FreeTerm::seq(std::move(a), std::move(b)); }
    Term par(Term a, Term b) { return FreeTerm::par(std::move(a), std::move(b)); }
    Term leaf(const std::string& name) {
        if (name.size() > 3 && name.rfind("var", 0) == 0 &&
            std::all_of(name.begin() + 3, name.end(),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            return FreeTerm::var(base, ctx, std::stoull(name.substr(3)));
        if (base.is_tape()) {
            base.tape_cat().at(name);  // resolve or throw
            return FreeTerm::lift(base, ctx, TapeTerm::gen(name));
        }
        if (machines)
            if (MachinePtr m = machines(name)) return FreeTerm::lift(base, ctx, std::move(m));
        throw UnknownGeneratorError("UnknownGenerator: '" + name +
                                    "' does not name a machine in scope");
    }
};

int base_print_prec(const TapeTerm& t) {
    switch (t.node().v.index()) {
        case 2: return 0;  // Seq
        case 3: return 1;  // Par
        default: return 2;
    }
}

void print_free(const FreeNodePtr& n, int min_prec, std::string& out);

void print_free_atom(const FBase& b, std::string& out) {
    if (const auto* t = std::get_if<TapeTerm>(&b.value)) {
        if (base_print_prec(*t) < 2) {
            out += "(" + term_to_string(*t) + ")";
        } else {
            out += term_to_string(*t);
        }
        return;
    }
    out += machine_value_name(*std::get<MachinePtr>(b.value));
}

void print_free(const FreeNodePtr& n, int min_prec, std::string& out) {
    std::visit(overloaded{
                   [&](const FBase& b) { print_free_atom(b, out); },
                   [&](const FVar& v) { out += "var" + std::to_string(v.index); },
                   [&](const FId& i) { out += "id " + std::to_string(i.width); },
                   [&](const FSeq& s) {
                       bool paren = min_prec > 0;
                       if (paren) out += "(";
                       print_free(s.first, 0, out);
                       out += " ; ";
                       print_free(s.second, 0, out);
                       if (paren) out += ")";
                   },
                   [&](const FPar& p) {
                       bool paren = min_prec > 1;
                       if (paren) out += "(";
                       print_free(p.left, 1, out);
                       out += " * ";
                       print_free(p.right, 1, out);
                       if (paren) out += ")";
                   },
                   [&](const FCopy&) { out += "copy"; },
                   [&](const FDiscard&) { out += "discard"; },
                   [&](const FSwap&) { out += "swap"; },
               },
               n->v);
}

}  // namespace

FreeTerm parse_free_term(std::string_view text, BaseCategory base, VarContextPtr ctx,
                         const MachineResolver& machines) {
    FreeBuilder builder{std::move(base), ctx ? std::move(ctx) : VarContextPtr{}, machines};
    if (!builder.ctx) builder.ctx = empty_context();
    return detail::TermParser<FreeBuilder>(text, builder).parse();
}

std::string free_term_to_string(const FreeTerm& t) {
    std::string out;
    print_free(t.root(), 0, out);
    return out;
}

}  // namespace strmach

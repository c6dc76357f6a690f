#include "strmach/tape.hpp"

#include <algorithm>

#include "strmach/detail/term_parser.hpp"
#include "strmach/util.hpp"

namespace strmach {

const TapeGenerator* TapeCategory::find(std::string_view gen) const {
    for (const auto& g : generators)
        if (g.name == gen) return &g;
    return nullptr;
}

const TapeGenerator& TapeCategory::at(std::string_view gen) const {
    if (const auto* g = find(gen)) return *g;
    throw UnknownGeneratorError("UnknownGenerator: '" + std::string(gen) + "' in tape category '" +
                                name + "'");
}

TapeCategory mk_tape_category(std::string name, std::vector<TapeGenerator> generators) {
    for (std::size_t i = 0; i < generators.size(); ++i) {
        if (generators[i].degree == 0)
            throw ValidationError("ZeroDegreeGenerator: '" + generators[i].name +
                                  "' in tape category '" + name + "'");
        for (std::size_t j = i + 1; j < generators.size(); ++j)
            if (generators[i].name == generators[j].name)
                throw ValidationError("DuplicateGenerator: '" + generators[i].name +
                                      "' in tape category '" + name + "'");
    }
    return TapeCategory{std::move(name), std::move(generators)};
}

TapeCategory alphabet_category(std::string name, std::string_view characters) {
    std::vector<TapeGenerator> gens;
    for (char c : characters) gens.push_back(TapeGenerator{std::string(1, c), 1, 1, 1});
    return mk_tape_category(std::move(name), std::move(gens));
}

TapeTerm TapeTerm::gen(std::string name) {
    return TapeTerm(std::make_shared<const TapeNode>(TapeNode{GenNode{std::move(name)}}));
}
TapeTerm TapeTerm::id(Nat width) {
    return TapeTerm(std::make_shared<const TapeNode>(TapeNode{IdNode{width}}));
}
TapeTerm TapeTerm::seq(TapeTerm first, TapeTerm second) {
    return TapeTerm(
        std::make_shared<const TapeNode>(TapeNode{SeqNode{std::move(first), std::move(second)}}));
}
TapeTerm TapeTerm::par(TapeTerm left, TapeTerm right) {
    return TapeTerm(
        std::make_shared<const TapeNode>(TapeNode{ParNode{std::move(left), std::move(right)}}));
}
TapeTerm TapeTerm::copy() { return TapeTerm(std::make_shared<const TapeNode>(TapeNode{CopyNode{}})); }
TapeTerm TapeTerm::discard() {
    return TapeTerm(std::make_shared<const TapeNode>(TapeNode{DiscardNode{}}));
}
TapeTerm TapeTerm::swap() { return TapeTerm(std::make_shared<const TapeNode>(TapeNode{SwapNode{}})); }

bool TapeTerm::structurally_equal(const TapeTerm& a, const TapeTerm& b) {
    if (a.node_ == b.node_) return true;
    if (a.node().v.index() != b.node().v.index()) return false;
    return std::visit(
        overloaded{
            [&](const GenNode& x) { return x.name == std::get<GenNode>(b.node().v).name; },
            [&](const IdNode& x) { return x.width == std::get<IdNode>(b.node().v).width; },
            [&](const SeqNode& x) {
                const auto& y = std::get<SeqNode>(b.node().v);
                return structurally_equal(x.first, y.first) &&
                       structurally_equal(x.second, y.second);
            },
            [&](const ParNode& x) {
                const auto& y = std::get<ParNode>(b.node().v);
                return structurally_equal(x.left, y.left) && structurally_equal(x.right, y.right);
            },
            [&](const CopyNode&) { return true; },
            [&](const DiscardNode&) { return true; },
            [&](const SwapNode&) { return true; },
        },
        a.node().v);
}

TermSignature term_signature(const TapeTerm& t, const TapeCategory& cat) {
    return std::visit(
        overloaded{
            [&](const GenNode& g) {
                const auto& def = cat.at(g.name);
                return TermSignature{def.arity_in, def.arity_out};
            },
            [&](const IdNode& i) { return TermSignature{i.width, i.width}; },
            [&](const SeqNode& s) {
                auto a = term_signature(s.first, cat);
                auto b = term_signature(s.second, cat);
                if (a.out != b.in)
                    throw IllTypedError("IllTyped: sequential composition mismatch, " +
                                        std::to_string(a.out) + " outgoing vs " +
                                        std::to_string(b.in) + " incoming in '" +
                                        term_to_string(t) + "'");
                return TermSignature{a.in, b.out};
            },
            [&](const ParNode& p) {
                auto a = term_signature(p.left, cat);
                auto b = term_signature(p.right, cat);
                return TermSignature{nat_add(a.in, b.in), nat_add(a.out, b.out)};
            },
            [&](const CopyNode&) { return TermSignature{1, 2}; },
            [&](const DiscardNode&) { return TermSignature{1, 0}; },
            [&](const SwapNode&) { return TermSignature{2, 2}; },
        },
        t.node().v);
}

Nat term_degree(const TapeTerm& t, const TapeCategory& cat) {
    return std::visit(overloaded{
                          [&](const GenNode& g) { return cat.at(g.name).degree; },
                          [&](const SeqNode& s) {
                              return nat_add(term_degree(s.first, cat), term_degree(s.second, cat));
                          },
                          [&](const ParNode& p) {
                              return nat_add(term_degree(p.left, cat), term_degree(p.right, cat));
                          },
                          [&](const auto&) { return Nat(0); },
                      },
                      t.node().v);
}

TapeTerm encode_word(std::string_view word, const TapeCategory& cat) {
    TapeTerm t = TapeTerm::id(1);
    bool first = true;
    for (char c : word) {
        const auto& g = cat.at(std::string(1, c));
        if (g.arity_in != 1 || g.arity_out != 1)
            throw ValidationError("NonEndomorphismCharacter: '" + g.name + "' has signature " +
                                  std::to_string(g.arity_in) + "->" + std::to_string(g.arity_out));
        TapeTerm gen = TapeTerm::gen(g.name);
        t = first ? std::move(gen) : TapeTerm::seq(std::move(t), std::move(gen));
        first = false;
    }
    return t;
}

namespace {

bool flatten_into(const TapeTerm& t, const TapeCategory& cat, std::vector<std::string>& out) {
    return std::visit(overloaded{
                          [&](const GenNode& g) {
                              const auto* def = cat.find(g.name);
                              if (!def || def->arity_in != 1 || def->arity_out != 1) return false;
                              out.push_back(g.name);
                              return true;
                          },
                          [&](const IdNode& i) { return i.width == 1; },
                          [&](const SeqNode& s) {
                              return flatten_into(s.first, cat, out) &&
                                     flatten_into(s.second, cat, out);
                          },
                          [&](const auto&) { return false; },
                      },
                      t.node().v);
}

}  // namespace

std::optional<std::vector<std::string>> flatten_word(const TapeTerm& t, const TapeCategory& cat) {
    std::vector<std::string> out;
    if (!flatten_into(t, cat, out)) return std::nullopt;
    return out;
}

namespace {

struct TapeBuilder {
    using Term = TapeTerm;
    const TapeCategory& cat;

    Term id(Nat w) { return TapeTerm::id(w); }
    Term copy() { return TapeTerm::copy(); }
    Term discard() { return TapeTerm::discard(); }
    Term swap() { return TapeTerm::swap(); }
    Term seq(Term a, Term b) { return TapeTerm::seq(std::move(a), std::move(b)); }
    Term par(Term a, Term b) { return TapeTerm::par(std::move(a), std::move(b)); }
    Term leaf(const std::string& name) {
        cat.at(name);  // resolve or throw
        return TapeTerm::gen(name);
    }
};

void print_term(const TapeTerm& t, int min_prec, std::string& out) {
    std::visit(overloaded{
                   [&](const GenNode& g) { out += g.name; },
                   [&](const IdNode& i) { out += "id " + std::to_string(i.width); },
                   [&](const SeqNode& s) {
                       bool paren = min_prec > 0;
                       if (paren) out += "(";
                       print_term(s.first, 0, out);
                       out += " ; ";
                       print_term(s.second, 0, out);
                       if (paren) out += ")";
                   },
                   [&](const ParNode& p) {
                       bool paren = min_prec > 1;
                       if (paren) out += "(";
                       print_term(p.left, 1, out);
                       out += " * ";
                       print_term(p.right, 1, out);
                       if (paren) out += ")";
                   },
                   [&](const CopyNode&) { out += "copy"; },
                   [&](const DiscardNode&) { out += "discard"; },
                   [&](const SwapNode&) { out += "swap"; },
               },
               t.node().v);
}

}  // namespace

TapeTerm parse_term(std::string_view text, const TapeCategory& cat) {
    TapeBuilder builder{cat};
    return detail::TermParser<TapeBuilder>(text, builder).parse();
}

std::string term_to_string(const TapeTerm& t) {
    std::string out;
    print_term(t, 0, out);
    return out;
}

}  // namespace strmach

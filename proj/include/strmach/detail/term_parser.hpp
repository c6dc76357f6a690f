#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "strmach/degrees.hpp"
#include "strmach/errors.hpp"

namespace strmach::detail {

struct Token {
    enum class Kind { Ident, Number, Semi, Star, LParen, RParen, End };
    Kind kind = Kind::End;
    std::string text;
    Nat number = 0;
    std::size_t pos = 0;
};

inline std::vector<Token> tokenize_term(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token tok;
        tok.pos = i;
        if (c == ';') {
            tok.kind = Token::Kind::Semi;
            ++i;
        } else if (c == '*') {
            tok.kind = Token::Kind::Star;
            ++i;
        } else if (c == '(') {
            tok.kind = Token::Kind::LParen;
            ++i;
        } else if (c == ')') {
            tok.kind = Token::Kind::RParen;
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            tok.kind = Token::Kind::Number;
            tok.text = std::string(text.substr(i, j - i));
            tok.number = std::stoull(tok.text);
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            tok.kind = Token::Kind::Ident;
            tok.text = std::string(text.substr(i, j - i));
            i = j;
        } else {
            throw IllTypedError("term syntax: unexpected character '" + std::string(1, c) +
                                "' at offset " + std::to_string(i));
        }
        out.push_back(std::move(tok));
    }
    out.push_back(Token{Token::Kind::End, "", 0, text.size()});
    return out;
}

// Recursive-descent parser over the shared term grammar. The Builder supplies
// leaf construction so tape terms and free terms share one syntax:
//   Term Builder::id(Nat width);
//   Term Builder::copy(); Term discard(); Term swap();
//   Term Builder::seq(Term, Term); Term par(Term, Term);
//   Term Builder::leaf(const std::string& name);   // generators, vars, machines
template <class Builder>
class TermParser {
  public:
    using Term = typename Builder::Term;

    TermParser(std::string_view text, Builder& builder)
        : tokens_(tokenize_term(text)), builder_(builder) {}

    Term parse() {
        Term t = parse_seq();
        expect(Token::Kind::End);
        return t;
    }

  private:
    const Token& peek() const { return tokens_[at_]; }
    Token take() { return tokens_[at_++]; }

    void expect(Token::Kind k) {
        if (peek().kind != k)
            throw IllTypedError("term syntax: unexpected token at offset " +
                                std::to_string(peek().pos));
    }

    Term parse_seq() {
        Term t = parse_par();
        while (peek().kind == Token::Kind::Semi) {
            take();
            t = builder_.seq(std::move(t), parse_par());
        }
        return t;
    }

    Term parse_par() {
        Term t = parse_atom();
        while (peek().kind == Token::Kind::Star) {
            take();
            t = builder_.par(std::move(t), parse_atom());
        }
        return t;
    }

    Term parse_atom() {
        const Token& tok = peek();
        switch (tok.kind) {
            case Token::Kind::LParen: {
                take();
                Term t = parse_seq();
                expect(Token::Kind::RParen);
                take();
                return t;
            }
            case Token::Kind::Ident: {
                Token id = take();
                if (id.text == "id") {
                    expect(Token::Kind::Number);
                    return builder_.id(take().number);
                }
                if (id.text == "copy") return builder_.copy();
                if (id.text == "discard") return builder_.discard();
                if (id.text == "swap") return builder_.swap();
                return builder_.leaf(id.text);
            }
            default:
                throw IllTypedError("term syntax: expected a term at offset " +
                                    std::to_string(tok.pos));
        }
    }

    std::vector<Token> tokens_;
    std::size_t at_ = 0;
    Builder& builder_;
};

}  // namespace strmach::detail

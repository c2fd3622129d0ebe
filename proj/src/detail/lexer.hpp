#pragma once

#include "hypergame/error.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace hypergame::detail
{

struct Token
{
    enum class Kind
    {
        ident,
        punct,
        end
    };

    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

inline bool is_ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
}

// Splits text into identifiers and punctuation; '#' starts a comment that runs
// to the end of the line. Recognizes the multi-character operators used by
// the text formats of this project.
inline std::vector<Token> tokenize(std::string_view text)
{
    static constexpr std::string_view multi[] = {"<->", "->", "&&", "||"};
    std::vector<Token> out;
    std::size_t line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n')
                advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c)) != 0) {
            advance(1);
            continue;
        }
        if (is_ident_char(c)) {
            std::size_t j = i;
            while (j < text.size() && is_ident_char(text[j]))
                ++j;
            out.push_back({Token::Kind::ident, std::string(text.substr(i, j - i)), line, col});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (auto m : multi) {
            if (text.substr(i, m.size()) == m) {
                out.push_back({Token::Kind::punct, std::string(m), line, col});
                advance(m.size());
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        out.push_back({Token::Kind::punct, std::string(1, c), line, col});
        advance(1);
    }
    out.push_back({Token::Kind::end, "", line, col});
    return out;
}

class TokenStream
{
public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const
    {
        std::size_t k = pos_ + ahead;
        return k < tokens_.size() ? tokens_[k] : tokens_.back();
    }

    const Token& next()
    {
        const Token& t = peek();
        if (pos_ < tokens_.size() - 1)
            ++pos_;
        return t;
    }

    [[nodiscard]] bool at_end() const { return peek().kind == Token::Kind::end; }

    bool accept(std::string_view text)
    {
        if (peek().kind != Token::Kind::end && peek().text == text) {
            next();
            return true;
        }
        return false;
    }

    const Token& expect(std::string_view text)
    {
        if (peek().text != text || peek().kind == Token::Kind::end)
            fail("expected '" + std::string(text) + "'");
        return next();
    }

    std::string expect_ident(std::string_view what = "identifier")
    {
        if (peek().kind != Token::Kind::ident)
            fail("expected " + std::string(what));
        return next().text;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        const Token& t = peek();
        std::string found = t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + ", found " + found, t.line, t.column);
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace hypergame::detail

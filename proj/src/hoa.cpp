#include "hypergame/automata.hpp"

#include "hypergame/error.hpp"

#include <cctype>
#include <functional>
#include <sstream>

namespace hypergame
{

namespace
{

std::string acceptance_formula(unsigned sets)
{
    if (sets == 0)
        return "f";
    std::string out;
    std::string close;
    for (unsigned i = 0; i < sets; ++i) {
        std::string atom = (i % 2 == 0 ? "Inf(" : "Fin(") + std::to_string(i) + ")";
        if (i + 1 == sets) {
            out += atom;
        } else {
            out += atom + (i % 2 == 0 ? " | (" : " & (");
            close += ")";
        }
    }
    return out + close;
}

IndexedAp ap_from_name(const std::string& name)
{
    auto open = name.find('[');
    if (open != std::string::npos && name.back() == ']')
        return {name.substr(0, open), name.substr(open + 1, name.size() - open - 2)};
    return {name, ""};
}

class HoaReader
{
public:
    explicit HoaReader(std::string_view text) : text_(text) {}

    Dpa read()
    {
        Dpa a;
        std::size_t states = 0;
        bool have_states = false, have_start = false, have_acc = false;
        expect_word("HOA:");
        if (word() != "v1")
            fail("only HOA v1 is supported");
        while (true) {
            std::string key = word();
            if (key == "--BODY--")
                break;
            if (key.empty())
                fail("missing --BODY--");
            if (key == "States:") {
                states = number();
                have_states = true;
            } else if (key == "Start:") {
                a.initial = static_cast<AutState>(number());
                have_start = true;
                if (peek_is_digit())
                    fail("several initial states are not deterministic");
            } else if (key == "AP:") {
                std::size_t k = number();
                for (std::size_t i = 0; i < k; ++i)
                    a.aps.push_back(ap_from_name(quoted()));
            } else if (key == "acc-name:") {
                if (word() != "parity" || word() != "min" || word() != "even")
                    fail("acceptance must be 'parity min even'");
                number();
                have_acc = true;
            } else {
                // Acceptance:, properties:, name:, tool: and the like
                skip_line();
            }
        }
        if (!have_states || !have_start || !have_acc)
            fail("header needs States:, Start: and acc-name:");
        if (a.aps.size() > 16)
            fail("too many atomic propositions");
        a.letters = std::uint32_t{1} << a.aps.size();
        num_aps_ = a.aps.size();
        constexpr AutState missing = ~AutState{0};
        a.delta.assign(states, std::vector<AutState>(a.letters, missing));
        a.color.assign(states, 0);
        std::vector<char> declared(states, 0);
        std::string key = word();
        while (key != "--END--") {
            if (key != "State:")
                fail("expected State:");
            std::size_t s = number();
            if (s >= states)
                fail("state index out of range");
            declared[s] = 1;
            skip_space();
            if (peek() == '"')
                quoted();
            skip_space();
            if (peek() != '{')
                fail("state-based colour {c} required");
            ++pos_;
            a.color[s] = static_cast<unsigned>(number());
            skip_space();
            if (peek() != '}')
                fail("exactly one colour per state");
            ++pos_;
            while (true) {
                skip_space();
                if (peek() != '[')
                    break;
                ++pos_;
                std::size_t label_start = pos_;
                while (pos_ < text_.size() && text_[pos_] != ']')
                    ++pos_;
                if (pos_ >= text_.size())
                    fail("unterminated label");
                std::string_view label = text_.substr(label_start, pos_ - label_start);
                ++pos_;
                std::size_t t = number();
                if (t >= states)
                    fail("edge target out of range");
                for (std::uint32_t l = 0; l < a.letters; ++l) {
                    if (!eval_label(label, l))
                        continue;
                    if (a.delta[s][l] != missing)
                        fail("automaton is not deterministic");
                    a.delta[s][l] = static_cast<AutState>(t);
                }
            }
            key = word();
        }
        for (std::size_t s = 0; s < states; ++s)
            for (auto t : a.delta[s])
                if (t == missing || declared[s] == 0)
                    fail("automaton is not complete");
        if (states == 0 || a.initial >= states)
            fail("bad initial state");
        a.max_color = 0;
        for (auto c : a.color)
            a.max_color = std::max(a.max_color, c);
        return a;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const
    {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(msg, line, col);
    }

    [[nodiscard]] char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool peek_is_digit()
    {
        skip_space();
        return std::isdigit(static_cast<unsigned char>(peek())) != 0;
    }

    void skip_space()
    {
        while (pos_ < text_.size()) {
            if (std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
                ++pos_;
            } else if (text_.substr(pos_, 2) == "/*") {
                auto end = text_.find("*/", pos_ + 2);
                pos_ = end == std::string_view::npos ? text_.size() : end + 2;
            } else {
                break;
            }
        }
    }

    void skip_line()
    {
        // header items may span lines; stop before the next "key:" token
        while (true) {
            skip_space();
            std::size_t save = pos_;
            if (peek() == '"') {
                quoted();
                continue;
            }
            std::string w = word();
            if (w.empty())
                return;
            if (w.back() == ':' || w == "--BODY--") {
                pos_ = save;
                return;
            }
        }
    }

    std::string word()
    {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) == 0)
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    void expect_word(std::string_view w)
    {
        if (word() != w)
            fail("expected '" + std::string(w) + "'");
    }

    std::size_t number()
    {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0)
            ++pos_;
        if (start == pos_)
            fail("expected a number");
        return std::stoull(std::string(text_.substr(start, pos_ - start)));
    }

    std::string quoted()
    {
        skip_space();
        if (peek() != '"')
            fail("expected a quoted string");
        ++pos_;
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size())
                ++pos_;
            out += text_[pos_++];
        }
        if (pos_ >= text_.size())
            fail("unterminated string");
        ++pos_;
        return out;
    }

    // label grammar: or := and ('|' and)*, and := not ('&' not)*,
    // not := '!' not | 't' | 'f' | number | '(' or ')'
    bool eval_label(std::string_view label, std::uint32_t letter)
    {
        std::size_t i = 0;
        auto ws = [&] {
            while (i < label.size() && std::isspace(static_cast<unsigned char>(label[i])) != 0)
                ++i;
        };
        std::function<bool()> parse_or;
        std::function<bool()> parse_not = [&]() -> bool {
            ws();
            if (i >= label.size())
                fail("truncated label");
            char c = label[i];
            if (c == '!') {
                ++i;
                return !parse_not();
            }
            if (c == 't' || c == 'f') {
                ++i;
                return c == 't';
            }
            if (c == '(') {
                ++i;
                bool v = parse_or();
                ws();
                if (i >= label.size() || label[i] != ')')
                    fail("unbalanced label");
                ++i;
                return v;
            }
            std::size_t start = i;
            while (i < label.size() && std::isdigit(static_cast<unsigned char>(label[i])) != 0)
                ++i;
            if (start == i)
                fail("bad label");
            std::size_t ap = std::stoul(std::string(label.substr(start, i - start)));
            if (ap >= num_aps_)
                fail("label mentions an undeclared proposition");
            return ((letter >> ap) & 1U) != 0;
        };
        auto parse_and = [&]() {
            bool v = parse_not();
            while (true) {
                ws();
                if (i < label.size() && label[i] == '&') {
                    ++i;
                    v = parse_not() && v;
                } else {
                    return v;
                }
            }
        };
        parse_or = [&]() {
            bool v = parse_and();
            while (true) {
                ws();
                if (i < label.size() && label[i] == '|') {
                    ++i;
                    v = parse_and() || v;
                } else {
                    return v;
                }
            }
        };
        bool v = parse_or();
        ws();
        if (i != label.size())
            fail("trailing characters in label");
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t num_aps_ = 0;
};

} // namespace

std::string export_hoa(const Dpa& a)
{
    std::ostringstream out;
    const unsigned sets = a.max_color + 1;
    out << "HOA: v1\n";
    out << "States: " << a.size() << "\n";
    out << "Start: " << a.initial << "\n";
    out << "AP: " << a.aps.size();
    for (const auto& ap : a.aps)
        out << " \"" << (ap.var.empty() ? ap.ap : to_string(ap)) << "\"";
    out << "\n";
    out << "acc-name: parity min even " << sets << "\n";
    out << "Acceptance: " << sets << " " << acceptance_formula(sets) << "\n";
    out << "properties: explicit-labels state-acc deterministic complete\n";
    out << "--BODY--\n";
    for (std::size_t q = 0; q < a.size(); ++q) {
        out << "State: " << q << " {" << a.color[q] << "}\n";
        for (std::uint32_t l = 0; l < a.letters; ++l) {
            out << "[";
            if (a.aps.empty())
                out << "t";
            for (std::size_t i = 0; i < a.aps.size(); ++i)
                out << (i ? "&" : "") << (((l >> i) & 1U) != 0 ? "" : "!") << i;
            out << "] " << a.delta[q][l] << "\n";
        }
    }
    out << "--END--\n";
    return out.str();
}

Dpa import_hoa(std::string_view text)
{
    return HoaReader(text).read();
}

} // namespace hypergame

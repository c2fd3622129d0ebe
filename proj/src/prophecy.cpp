#include "hypergame/prophecy.hpp"

#include "hypergame/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace hypergame
{

namespace
{

std::string trim(std::string_view s)
{
    const auto* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

void require_alternating(const HyperLtlFormula& f)
{
    if (!is_strictly_alternating(f))
        throw ValidationError("prophecies need a prefix alternating forall/exists starting with forall; got '" +
                              to_string(f) + "'");
}

std::string valuation_suffix(const std::vector<std::string>& names, std::size_t mask)
{
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < names.size(); ++i)
        if ((mask >> i) & 1U) {
            out += (first ? "" : ",") + names[i];
            first = false;
        }
    return out + "}";
}

// `at <index>: <ltl>`; line is the 1-based source line for errors.
Prophecy parse_entry(const std::string& text, std::size_t line, std::size_t k, const HyperLtlFormula& f)
{
    std::istringstream in(text);
    std::string kw;
    in >> kw;
    if (kw != "at")
        throw ParseError("expected 'at <index>: <formula>'", line, 1);
    std::size_t index = 0;
    if (!(in >> index))
        throw ParseError("expected a prefix index after 'at'", line, 4);
    char colon = 0;
    if (!(in >> colon) || colon != ':')
        throw ParseError("expected ':' after the index", line, 4);
    std::string rest;
    std::getline(in, rest);
    FormulaPtr formula;
    try {
        formula = parse_ltl(rest);
    } catch (const ParseError& e) {
        throw ParseError(std::string("in prophecy: ") + e.what(), line, 1);
    }
    if (index == 0 || index % 2 == 0 || index > f.size())
        throw ValidationError("prophecy index " + std::to_string(index) + " on line " + std::to_string(line) +
                              " is not an odd position of the prefix");
    for (const auto& v : trace_vars(formula)) {
        std::size_t pos = f.var_index(v) + 1;
        if (pos > index)
            throw ValidationError("prophecy at " + std::to_string(index) + " mentions " + v + ", quantified at " +
                                  std::to_string(pos));
    }
    return {"__p" + std::to_string(k), index, std::move(formula)};
}

void check_names(const ProphecyFamily& fam, const HyperLtlFormula& f)
{
    std::set<std::string> used;
    for (const auto& a : indexed_aps(f.body))
        used.insert(a.ap);
    for (const auto& e : fam.entries)
        for (const auto& a : indexed_aps(e.formula))
            used.insert(a.ap);
    for (const auto& e : fam.entries)
        if (used.count(e.name) != 0)
            throw ValidationError("prophecy proposition " + e.name + " collides with a proposition in use");
}

} // namespace

std::vector<std::string> ProphecyFamily::names() const
{
    std::vector<std::string> out;
    for (const auto& e : entries)
        out.push_back(e.name);
    return out;
}

bool is_strictly_alternating(const HyperLtlFormula& f)
{
    if (f.size() % 2 != 0)
        return false;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.prefix[i].quantifier != (i % 2 == 0 ? Quantifier::Forall : Quantifier::Exists))
            return false;
    return true;
}

HyperLtlFormula normalize_alternating(const HyperLtlFormula& f)
{
    HyperLtlFormula out;
    out.body = f.body;
    std::set<std::string> taken;
    for (const auto& q : f.prefix)
        taken.insert(q.var);
    std::size_t k = 0;
    auto fresh = [&] {
        std::string v;
        do
            v = "__v" + std::to_string(k++);
        while (taken.count(v) != 0);
        return v;
    };
    auto expected = [&] { return out.prefix.size() % 2 == 0 ? Quantifier::Forall : Quantifier::Exists; };
    for (const auto& q : f.prefix) {
        if (q.quantifier != expected())
            out.prefix.push_back({expected(), fresh()});
        out.prefix.push_back(q);
    }
    if (out.prefix.size() % 2 != 0)
        out.prefix.push_back({Quantifier::Exists, fresh()});
    return out;
}

ProphecyFamily parse_prophecy_family(std::string_view text, const HyperLtlFormula& f)
{
    ProphecyFamily fam;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#')
            continue;
        if (fam.entries.empty())
            require_alternating(f);
        fam.entries.push_back(parse_entry(s, line, fam.entries.size(), f));
    }
    check_names(fam, f);
    return fam;
}

ProphecyFamily load_prophecy_family(const std::string& path, const HyperLtlFormula& f)
{
    return parse_prophecy_family(read_file(path), f);
}

KripkeStructure extend_ks(const KripkeStructure& ks, const ProphecyFamily& fam)
{
    const auto names = fam.names();
    for (const auto& n : names)
        if (ks.find_ap(n))
            throw ValidationError("prophecy proposition " + n + " collides with a proposition of the structure");
    if (names.size() > 8)
        throw ResourceError("too many prophecy propositions");
    const std::size_t vals = std::size_t{1} << names.size();

    std::vector<std::string> aps = ks.aps();
    aps.insert(aps.end(), names.begin(), names.end());
    const std::size_t base = ks.aps().size();

    // new ids: init keeps its name; every other state s becomes (s, A)
    std::vector<std::string> state_names;
    std::vector<StateId> origin;
    std::vector<std::size_t> valuation;
    std::vector<std::vector<StateId>> id_of(ks.num_states(), std::vector<StateId>(vals, 0));
    for (StateId s = 0; s < ks.num_states(); ++s) {
        if (s == ks.init()) {
            id_of[s].assign(vals, static_cast<StateId>(state_names.size()));
            state_names.push_back(ks.state_names()[s]);
            origin.push_back(s);
            valuation.push_back(0);
            continue;
        }
        for (std::size_t a = 0; a < vals; ++a) {
            id_of[s][a] = static_cast<StateId>(state_names.size());
            state_names.push_back(ks.state_names()[s] + valuation_suffix(names, a));
            origin.push_back(s);
            valuation.push_back(a);
        }
    }

    std::vector<std::string> dirs;
    for (std::size_t a = 0; a < vals; ++a)
        for (const auto& d : ks.directions())
            dirs.push_back(d + valuation_suffix(names, a));

    std::vector<std::vector<StateId>> trans(state_names.size());
    std::vector<Letter> labels(state_names.size());
    for (StateId x = 0; x < state_names.size(); ++x) {
        labels[x] = ks.label(origin[x]) | (static_cast<Letter>(valuation[x]) << base);
        for (std::size_t a = 0; a < vals; ++a)
            for (DirId d = 0; d < ks.num_directions(); ++d)
                trans[x].push_back(id_of[ks.step(origin[x], d)][a]);
    }
    return KripkeStructure(std::move(aps), std::move(dirs), std::move(state_names), id_of[ks.init()][0],
                           std::move(trans), std::move(labels));
}

HyperLtlFormula rewrite_formula(const HyperLtlFormula& f, const ProphecyFamily& fam)
{
    if (!fam.empty())
        require_alternating(f);
    std::vector<FormulaPtr> parts;
    for (const auto& e : fam.entries) {
        if (e.index == 0 || e.index > f.size())
            throw ValidationError("prophecy " + e.name + " is attached outside the prefix");
        parts.push_back(iff(atom(e.name, f.prefix[e.index - 1].var), e.formula));
    }
    HyperLtlFormula out = f;
    out.body = implies(next(globally(conjunction(parts))), f.body);
    return out;
}

std::string render_manifest(const ProphecyFamily& fam)
{
    std::string out;
    for (const auto& e : fam.entries)
        out += "prophecy " + e.name + " at " + std::to_string(e.index) + ": " + to_string(e.formula) + "\n";
    return out;
}

ProphecyFamily parse_manifest(const std::vector<std::string>& lines, const HyperLtlFormula& f)
{
    ProphecyFamily fam;
    std::size_t line = 0;
    for (const auto& raw : lines) {
        ++line;
        std::istringstream in(raw);
        std::string kw, name;
        in >> kw >> name;
        if (kw != "prophecy")
            throw ParseError("expected 'prophecy <name> at <index>: <formula>'", line, 1);
        std::string rest;
        std::getline(in, rest);
        if (fam.entries.empty())
            require_alternating(f);
        auto e = parse_entry(trim(rest), line, fam.entries.size(), f);
        if (e.name != name)
            throw ValidationError("manifest names " + name + " where " + e.name + " is expected");
        fam.entries.push_back(std::move(e));
    }
    check_names(fam, f);
    return fam;
}

} // namespace hypergame

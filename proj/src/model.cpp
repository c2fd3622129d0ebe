#include "hypergame/model.hpp"

#include "detail/lexer.hpp"
#include "hypergame/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace hypergame
{

namespace
{

template <class T>
std::optional<std::size_t> index_of(const std::vector<T>& v, std::string_view x)
{
    auto it = std::find(v.begin(), v.end(), x);
    if (it == v.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - v.begin());
}

void require_unique(const std::vector<std::string>& names, const char* what)
{
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end())
        throw ValidationError(std::string("duplicate ") + what + " '" + *dup + "'");
}

} // namespace

KripkeStructure::KripkeStructure(std::vector<std::string> aps,
                                 std::vector<std::string> directions,
                                 std::vector<std::string> state_names,
                                 StateId init,
                                 std::vector<std::vector<StateId>> transitions,
                                 std::vector<Letter> labels)
    : aps_(std::move(aps)), directions_(std::move(directions)), names_(std::move(state_names)), init_(init),
      trans_(std::move(transitions)), labels_(std::move(labels))
{
    if (aps_.size() > 64)
        throw ValidationError("at most 64 atomic propositions are supported");
    if (directions_.empty())
        throw ValidationError("at least one direction is required");
    if (names_.empty() || init_ >= names_.size())
        throw ValidationError("missing initial state");
    require_unique(aps_, "atomic proposition");
    require_unique(directions_, "direction");
    require_unique(names_, "state");
    if (trans_.size() != names_.size() || labels_.size() != names_.size())
        throw ValidationError("transition or label table does not cover every state");

    const Letter universe = aps_.size() == 64 ? ~Letter{0} : ((Letter{1} << aps_.size()) - 1);
    for (std::size_t s = 0; s < names_.size(); ++s) {
        if ((labels_[s] & ~universe) != 0)
            throw ValidationError("label of state '" + names_[s] + "' uses an undeclared proposition");
        if (trans_[s].size() != directions_.size())
            throw ValidationError("state '" + names_[s] + "' lacks a transition for some direction");
        for (std::size_t d = 0; d < directions_.size(); ++d) {
            StateId t = trans_[s][d];
            if (t >= names_.size())
                throw ValidationError("transition target out of range");
            if (t == init_)
                throw ValidationError("transition " + names_[s] + " -" + directions_[d] +
                                      "-> initial state; the initial state has no incoming edges");
        }
    }

    std::vector<char> seen(names_.size(), 0);
    std::vector<StateId> stack{init_};
    seen[init_] = 1;
    while (!stack.empty()) {
        StateId s = stack.back();
        stack.pop_back();
        for (StateId t : trans_[s])
            if (seen[t] == 0) {
                seen[t] = 1;
                stack.push_back(t);
            }
    }
    for (std::size_t s = 0; s < names_.size(); ++s)
        if (seen[s] == 0)
            throw ValidationError("state '" + names_[s] + "' is unreachable from the initial state");
}

StateId KripkeStructure::step(StateId s, DirId d) const
{
    if (s >= trans_.size())
        throw ValidationError("unknown state id " + std::to_string(s));
    if (d >= directions_.size())
        throw ValidationError("unknown direction id " + std::to_string(d));
    return trans_[s][d];
}

StateId KripkeStructure::step(std::string_view state, std::string_view direction) const
{
    auto s = find_state(state);
    if (!s)
        throw ValidationError("unknown state '" + std::string(state) + "'");
    auto d = find_direction(direction);
    if (!d)
        throw ValidationError("unknown direction '" + std::string(direction) + "'");
    return trans_[*s][*d];
}

Letter KripkeStructure::label(StateId s) const
{
    if (s >= labels_.size())
        throw ValidationError("unknown state id " + std::to_string(s));
    return labels_[s];
}

std::vector<std::string> KripkeStructure::label_names(StateId s) const
{
    std::vector<std::string> out;
    Letter l = label(s);
    for (std::size_t i = 0; i < aps_.size(); ++i)
        if ((l >> i) & 1U)
            out.push_back(aps_[i]);
    return out;
}

std::optional<StateId> KripkeStructure::find_state(std::string_view name) const
{
    auto i = index_of(names_, name);
    return i ? std::optional<StateId>(static_cast<StateId>(*i)) : std::nullopt;
}

std::optional<DirId> KripkeStructure::find_direction(std::string_view name) const
{
    auto i = index_of(directions_, name);
    return i ? std::optional<DirId>(static_cast<DirId>(*i)) : std::nullopt;
}

std::optional<std::size_t> KripkeStructure::find_ap(std::string_view name) const
{
    return index_of(aps_, name);
}

std::optional<DirId> KripkeStructure::direction_to(StateId from, StateId to) const
{
    for (DirId d = 0; d < directions_.size(); ++d)
        if (step(from, d) == to)
            return d;
    return std::nullopt;
}

KripkeStructure parse_ks(std::string_view text)
{
    detail::TokenStream ts(detail::tokenize(text));

    auto ident_list = [&](std::string_view terminator) {
        std::vector<std::string> out;
        if (ts.peek().text == terminator)
            return out;
        out.push_back(ts.expect_ident());
        while (ts.accept(","))
            out.push_back(ts.expect_ident());
        return out;
    };

    if (ts.expect_ident("'aps'") != "aps")
        ts.fail("expected 'aps'");
    ts.expect(":");
    std::vector<std::string> aps = ident_list(";");
    ts.expect(";");
    if (ts.peek().text != "directions")
        ts.fail("expected 'directions'");
    ts.next();
    ts.expect(":");
    std::vector<std::string> dirs = ident_list(";");
    ts.expect(";");
    require_unique(aps, "atomic proposition");
    require_unique(dirs, "direction");

    struct Pending
    {
        std::string target;
        std::size_t line, column;
    };
    std::vector<std::string> names;
    std::vector<Letter> labels;
    std::vector<std::vector<std::optional<Pending>>> edges;
    std::optional<StateId> init;

    while (!ts.at_end()) {
        if (ts.peek().text != "state")
            ts.fail("expected 'state'");
        ts.next();
        std::string name = ts.expect_ident("state name");
        if (index_of(names, name))
            throw ValidationError("duplicate state '" + name + "'");
        auto sid = static_cast<StateId>(names.size());
        if (ts.peek().text == "init") {
            ts.next();
            if (init)
                throw ValidationError("more than one state is marked init");
            init = sid;
        }
        names.push_back(name);
        labels.push_back(0);
        edges.emplace_back(dirs.size());
        ts.expect("{");
        while (!ts.accept("}")) {
            if (ts.peek().text == "labels" && ts.peek(1).text == "{") {
                ts.next();
                ts.next();
                for (const auto& ap : ident_list("}")) {
                    auto i = index_of(aps, ap);
                    if (!i)
                        throw ValidationError("state '" + name + "' is labelled with undeclared proposition '" + ap +
                                              "'");
                    labels.back() |= Letter{1} << *i;
                }
                ts.expect("}");
                ts.expect(";");
                continue;
            }
            const auto& tok = ts.peek();
            std::size_t line = tok.line, col = tok.column;
            std::string dir = ts.expect_ident("direction or 'labels'");
            auto d = index_of(dirs, dir);
            if (!d)
                throw ParseError("undeclared direction '" + dir + "'", line, col);
            ts.expect("->");
            const auto& tt = ts.peek();
            Pending p{ts.expect_ident("target state"), tt.line, tt.column};
            ts.expect(";");
            if (edges.back()[*d])
                throw ParseError("second transition for direction '" + dir + "'", line, col);
            edges.back()[*d] = p;
        }
    }
    if (!init)
        throw ValidationError("no state is marked init");

    std::vector<std::vector<StateId>> trans(names.size());
    for (std::size_t s = 0; s < names.size(); ++s) {
        for (std::size_t d = 0; d < dirs.size(); ++d) {
            if (!edges[s][d])
                throw ValidationError("totality violation: state '" + names[s] + "' has no transition for direction '" +
                                      dirs[d] + "'");
            auto t = index_of(names, edges[s][d]->target);
            if (!t)
                throw ParseError("unknown target state '" + edges[s][d]->target + "'", edges[s][d]->line,
                                 edges[s][d]->column);
            trans[s].push_back(static_cast<StateId>(*t));
        }
    }
    return KripkeStructure(std::move(aps), std::move(dirs), std::move(names), *init, std::move(trans),
                           std::move(labels));
}

std::string render_ks(const KripkeStructure& ks)
{
    std::ostringstream out;
    auto list = [&](const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            out << (i ? ", " : "") << v[i];
    };
    out << "aps: ";
    list(ks.aps());
    out << ";\ndirections: ";
    list(ks.directions());
    out << ";\n";
    for (StateId s = 0; s < ks.num_states(); ++s) {
        out << "\nstate " << ks.state_names()[s] << (s == ks.init() ? " init" : "") << " {\n  labels {";
        list(ks.label_names(s));
        out << "};\n";
        for (DirId d = 0; d < ks.num_directions(); ++d)
            out << "  " << ks.directions()[d] << " -> " << ks.state_names()[ks.step(s, d)] << ";\n";
        out << "}\n";
    }
    return out.str();
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

KripkeStructure load_ks(const std::string& path)
{
    return parse_ks(read_file(path));
}

void validate_lasso(const KripkeStructure& ks, const Lasso& lasso)
{
    if (lasso.stem.empty() || lasso.stem.front() != ks.init())
        throw ValidationError("lasso stem must start at the initial state");
    if (lasso.loop.empty())
        throw ValidationError("lasso loop must be nonempty");
    for (StateId s : lasso.stem)
        if (s >= ks.num_states())
            throw ValidationError("lasso mentions unknown state");
    for (StateId s : lasso.loop)
        if (s >= ks.num_states())
            throw ValidationError("lasso mentions unknown state");
    auto edge = [&](StateId a, StateId b) {
        if (!ks.direction_to(a, b))
            throw ValidationError("no direction leads from '" + ks.state_names()[a] + "' to '" +
                                  ks.state_names()[b] + "'");
    };
    for (std::size_t i = 0; i + 1 < lasso.stem.size(); ++i)
        edge(lasso.stem[i], lasso.stem[i + 1]);
    edge(lasso.stem.back(), lasso.loop.front());
    for (std::size_t i = 0; i + 1 < lasso.loop.size(); ++i)
        edge(lasso.loop[i], lasso.loop[i + 1]);
    edge(lasso.loop.back(), lasso.loop.front());
}

UpWord lasso_trace(const KripkeStructure& ks, const Lasso& lasso)
{
    validate_lasso(ks, lasso);
    UpWord w;
    for (StateId s : lasso.stem)
        w.stem.push_back(ks.label(s));
    for (StateId s : lasso.loop)
        w.loop.push_back(ks.label(s));
    return w;
}

} // namespace hypergame

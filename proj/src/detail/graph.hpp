#pragma once

#include <cstdint>
#include <vector>

namespace hypergame::detail
{

using Adjacency = std::vector<std::vector<std::uint32_t>>;

struct Sccs
{
    std::vector<std::uint32_t> component; // per node
    std::uint32_t count = 0;
    // true if the component contains an edge, i.e. some cycle
    std::vector<char> cyclic;
};

// Iterative Tarjan. Components are numbered in reverse topological order
// (sinks first). Nodes with alive[v] == 0 are ignored.
inline Sccs tarjan(const Adjacency& succ, const std::vector<char>* alive = nullptr)
{
    const auto n = static_cast<std::uint32_t>(succ.size());
    constexpr std::uint32_t none = ~std::uint32_t{0};
    Sccs out;
    out.component.assign(n, none);
    std::vector<std::uint32_t> index(n, none), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    struct Frame
    {
        std::uint32_t v;
        std::size_t next;
    };
    std::vector<Frame> call;
    std::uint32_t counter = 0;
    auto ok = [&](std::uint32_t v) { return alive == nullptr || (*alive)[v] != 0; };

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != none || !ok(root))
            continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next < succ[f.v].size()) {
                std::uint32_t w = succ[f.v][f.next++];
                if (!ok(w))
                    continue;
                if (index[w] == none) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w] != 0 && index[w] < low[f.v]) {
                    low[f.v] = index[w];
                }
                continue;
            }
            std::uint32_t v = f.v;
            call.pop_back();
            if (!call.empty() && low[v] < low[call.back().v])
                low[call.back().v] = low[v];
            if (low[v] == index[v]) {
                std::uint32_t c = out.count++;
                out.cyclic.push_back(0);
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    out.component[w] = c;
                } while (w != v);
            }
        }
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        if (out.component[v] == none)
            continue;
        for (std::uint32_t w : succ[v])
            if (ok(w) && out.component[w] == out.component[v])
                out.cyclic[out.component[v]] = 1;
    }
    return out;
}

// Nodes reachable from the given sources.
inline std::vector<char> reachable(const Adjacency& succ, const std::vector<std::uint32_t>& sources)
{
    std::vector<char> seen(succ.size(), 0);
    std::vector<std::uint32_t> stack;
    for (auto s : sources)
        if (seen[s] == 0) {
            seen[s] = 1;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto w : succ[v])
            if (seen[w] == 0) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    return seen;
}

} // namespace hypergame::detail

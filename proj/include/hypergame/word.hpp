#pragma once

#include <cstdint>
#include <vector>

namespace hypergame
{

// A set of atomic propositions, one bit per entry of some AP universe.
using Letter = std::uint64_t;

// Ultimately periodic word stem . loop^omega. The loop is never empty for a
// well-formed word.
struct UpWord
{
    std::vector<Letter> stem;
    std::vector<Letter> loop;

    friend bool operator==(const UpWord&, const UpWord&) = default;

    [[nodiscard]] std::size_t length() const { return stem.size() + loop.size(); }

    // Letter at position i of the infinite word.
    [[nodiscard]] Letter at(std::size_t i) const
    {
        if (i < stem.size())
            return stem[i];
        return loop[(i - stem.size()) % loop.size()];
    }
};

// Unique representative of the infinite word: primitive loop, shortest stem.
UpWord canonical(UpWord w);

} // namespace hypergame

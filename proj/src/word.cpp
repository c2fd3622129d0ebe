#include "hypergame/word.hpp"

#include <algorithm>

namespace hypergame
{

UpWord canonical(UpWord w)
{
    // Shortest period of the loop.
    const std::size_t n = w.loop.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p != 0)
            continue;
        bool periodic = true;
        for (std::size_t i = p; i < n && periodic; ++i)
            periodic = w.loop[i] == w.loop[i - p];
        if (periodic) {
            w.loop.resize(p);
            break;
        }
    }
    // Absorb stem letters that already belong to the loop.
    while (!w.stem.empty() && w.stem.back() == w.loop.back()) {
        std::rotate(w.loop.rbegin(), w.loop.rbegin() + 1, w.loop.rend());
        w.stem.pop_back();
    }
    return w;
}

} // namespace hypergame

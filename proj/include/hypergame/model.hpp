#pragma once

#include "hypergame/word.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hypergame
{

using StateId = std::uint32_t;
using DirId = std::uint32_t;

// Finite Kripke structure with a dedicated initial state and direction-indexed
// total transitions. State ids cover S and the initial state; the initial state
// has no incoming transition. Labels are bitmasks over aps().
class KripkeStructure
{
public:
    // Validates totality, label universe, the initial-state discipline and
    // reachability; throws ValidationError.
    KripkeStructure(std::vector<std::string> aps,
                    std::vector<std::string> directions,
                    std::vector<std::string> state_names,
                    StateId init,
                    std::vector<std::vector<StateId>> transitions,
                    std::vector<Letter> labels);

    [[nodiscard]] const std::vector<std::string>& aps() const { return aps_; }
    [[nodiscard]] const std::vector<std::string>& directions() const { return directions_; }
    [[nodiscard]] const std::vector<std::string>& state_names() const { return names_; }
    [[nodiscard]] std::size_t num_states() const { return names_.size(); }
    [[nodiscard]] std::size_t num_directions() const { return directions_.size(); }
    [[nodiscard]] StateId init() const { return init_; }

    [[nodiscard]] StateId step(StateId s, DirId d) const;
    [[nodiscard]] StateId step(std::string_view state, std::string_view direction) const;
    [[nodiscard]] Letter label(StateId s) const;
    [[nodiscard]] std::vector<std::string> label_names(StateId s) const;

    [[nodiscard]] std::optional<StateId> find_state(std::string_view name) const;
    [[nodiscard]] std::optional<DirId> find_direction(std::string_view name) const;
    [[nodiscard]] std::optional<std::size_t> find_ap(std::string_view name) const;

    // Some direction d with step(from, d) == to.
    [[nodiscard]] std::optional<DirId> direction_to(StateId from, StateId to) const;

    friend bool operator==(const KripkeStructure&, const KripkeStructure&) = default;

private:
    std::vector<std::string> aps_;
    std::vector<std::string> directions_;
    std::vector<std::string> names_;
    StateId init_;
    std::vector<std::vector<StateId>> trans_;
    std::vector<Letter> labels_;
};

// Finite presentation of an ultimately periodic path: stem starts at the
// initial state, loop is repeated forever.
struct Lasso
{
    std::vector<StateId> stem;
    std::vector<StateId> loop;

    friend bool operator==(const Lasso&, const Lasso&) = default;
};

KripkeStructure parse_ks(std::string_view text);
std::string render_ks(const KripkeStructure& ks);
KripkeStructure load_ks(const std::string& path);

// Throws ValidationError if some edge of the lasso is not realizable.
void validate_lasso(const KripkeStructure& ks, const Lasso& lasso);

// Pointwise labels of the lasso; stem and loop lengths are preserved.
UpWord lasso_trace(const KripkeStructure& ks, const Lasso& lasso);

std::string read_file(const std::string& path);

} // namespace hypergame

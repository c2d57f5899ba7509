#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsrbm/logic.hpp"

namespace nsrbm::fol {

struct Entity {
    int id = -1;
    std::string name;
};

struct Predicate {
    int id = -1;
    std::string name;
    int arity = 2;
};

struct GroundAtom {
    int predicate = -1;
    std::vector<int> args;

    friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
};

/// Visible-layer layout for grounded rules: one proposition per
/// (argument slot, entity) pair plus one per predicate.
struct GroundingScheme {
    std::vector<std::vector<int>> slot_symbols;  // [slot][entity] -> symbol id
    std::vector<int> predicate_symbols;          // [predicate] -> symbol id
    bool omit_entity_negations = true;
    logic::SymbolTable symbols;

    int n_symbols() const { return symbols.size(); }
    int slot_symbol(int slot, int entity) const {
        return slot_symbols.at(static_cast<std::size_t>(slot)).at(static_cast<std::size_t>(entity));
    }
    int predicate_symbol(int pred) const {
        return predicate_symbols.at(static_cast<std::size_t>(pred));
    }
};

/// One Confidence rule per model of the predicate:
/// h <=> p_{slot1=a} & p_{slot2=b} & ... & p_P.
std::vector<logic::ConfidenceRule> ground_predicate(const Predicate& p,
                                                    const std::vector<GroundAtom>& models,
                                                    const GroundingScheme& scheme,
                                                    double confidence = 1.0);

/// Grounds an example clause head <- body into the compiled rule pair.
/// The pooling rule pools negated entity propositions (unless the scheme
/// omits them) and negated body-predicate propositions; it is suppressed
/// when nothing remains to pool.
std::pair<logic::ConfidenceRule, std::optional<logic::PoolingRule>> ground_example_clause(
    const GroundAtom& head, const std::vector<GroundAtom>& body, const GroundingScheme& scheme,
    double confidence = 1.0);

/// Layout: [slot-1 person block][slot-2 person block][relation block].
GroundingScheme build_kinship_scheme(const std::vector<Entity>& people,
                                     const std::vector<Predicate>& relations);

}  // namespace nsrbm::fol

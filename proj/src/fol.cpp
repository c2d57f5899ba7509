#include "nsrbm/fol.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace nsrbm::fol {

namespace {

void append_atom_literals(const GroundAtom& atom, const GroundingScheme& scheme,
                          std::set<int>& seen, logic::Conjunction& conj, bool include_predicate) {
    for (std::size_t slot = 0; slot < atom.args.size(); ++slot) {
        int sym = scheme.slot_symbol(static_cast<int>(slot), atom.args[slot]);
        if (seen.insert(sym).second) conj.literals.push_back({sym, false});
    }
    if (include_predicate) {
        int sym = scheme.predicate_symbol(atom.predicate);
        if (seen.insert(sym).second) conj.literals.push_back({sym, false});
    }
}

}  // namespace

std::vector<logic::ConfidenceRule> ground_predicate(const Predicate& p,
                                                    const std::vector<GroundAtom>& models,
                                                    const GroundingScheme& scheme,
                                                    double confidence) {
    std::vector<logic::ConfidenceRule> rules;
    rules.reserve(models.size());
    for (const GroundAtom& atom : models) {
        if (atom.predicate != p.id) throw std::invalid_argument("model predicate mismatch");
        if (atom.args.size() != static_cast<std::size_t>(p.arity))
            throw std::invalid_argument("model arity mismatch for predicate " + p.name);
        logic::ConfidenceRule cr;
        cr.confidence = confidence;
        cr.hypothesis = "h_" + p.name;
        std::set<int> seen;
        append_atom_literals(atom, scheme, seen, cr.body, true);
        rules.push_back(std::move(cr));
    }
    return rules;
}

std::pair<logic::ConfidenceRule, std::optional<logic::PoolingRule>> ground_example_clause(
    const GroundAtom& head, const std::vector<GroundAtom>& body, const GroundingScheme& scheme,
    double confidence) {
    logic::ConfidenceRule cr;
    cr.confidence = confidence;
    cr.hypothesis = "h_1";

    // Head conjunct: every entity proposition once, then every predicate
    // proposition including the head's.
    std::set<int> seen_entities;
    logic::Conjunction entity_part;
    auto add_entities = [&](const GroundAtom& atom) {
        for (std::size_t slot = 0; slot < atom.args.size(); ++slot) {
            int sym = scheme.slot_symbol(static_cast<int>(slot), atom.args[slot]);
            if (seen_entities.insert(sym).second) entity_part.literals.push_back({sym, false});
        }
    };
    add_entities(head);
    for (const GroundAtom& atom : body) add_entities(atom);

    cr.body = entity_part;
    std::set<int> seen_preds;
    auto add_pred = [&](const GroundAtom& atom) {
        int sym = scheme.predicate_symbol(atom.predicate);
        if (seen_preds.insert(sym).second) cr.body.literals.push_back({sym, false});
    };
    add_pred(head);
    for (const GroundAtom& atom : body) add_pred(atom);

    logic::PoolingRule pr;
    pr.confidence = confidence;
    pr.hypothesis = "h_p";
    if (!scheme.omit_entity_negations)
        for (const logic::Literal& lit : entity_part.literals)
            pr.disjuncts.push_back(logic::Conjunction{{{lit.symbol, true}}});
    std::set<int> pooled;
    for (const GroundAtom& atom : body) {
        int sym = scheme.predicate_symbol(atom.predicate);
        if (pooled.insert(sym).second) pr.disjuncts.push_back(logic::Conjunction{{{sym, true}}});
    }

    if (pr.disjuncts.empty()) return {std::move(cr), std::nullopt};
    return {std::move(cr), std::move(pr)};
}

GroundingScheme build_kinship_scheme(const std::vector<Entity>& people,
                                     const std::vector<Predicate>& relations) {
    if (people.empty() || relations.empty())
        throw std::invalid_argument("empty entity or relation list");

    GroundingScheme scheme;
    scheme.slot_symbols.resize(2);
    for (int slot = 0; slot < 2; ++slot) {
        for (const Entity& person : people) {
            std::string name = "s" + std::to_string(slot + 1) + ":" + person.name;
            if (scheme.symbols.find(name))
                throw std::invalid_argument("duplicate entity name: " + person.name);
            scheme.slot_symbols[static_cast<std::size_t>(slot)].push_back(scheme.symbols.intern(name));
        }
    }
    for (const Predicate& rel : relations) {
        std::string name = "rel:" + rel.name;
        if (scheme.symbols.find(name))
            throw std::invalid_argument("duplicate relation name: " + rel.name);
        scheme.predicate_symbols.push_back(scheme.symbols.intern(name));
    }
    return scheme;
}

}  // namespace nsrbm::fol

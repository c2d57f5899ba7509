#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nsrbm::logic {

struct Symbol {
    int id = -1;
    std::string name;
};

struct Literal {
    int symbol = -1;
    bool negated = false;

    friend bool operator==(const Literal&, const Literal&) = default;
};

/// Weighted if-then rule: confidence: head <- l1 & l2 & ...
/// An empty body is the constant true (the rule then asserts its head).
struct IfThenRule {
    double confidence = 1.0;
    Literal head;
    std::vector<Literal> body;

    friend bool operator==(const IfThenRule&, const IfThenRule&) = default;
};

/// Conjunction of literals; empty means the constant true.
struct Conjunction {
    std::vector<Literal> literals;

    friend bool operator==(const Conjunction&, const Conjunction&) = default;
};

struct Dnf {
    double confidence = 1.0;
    std::vector<Conjunction> conjuncts;
};

/// c: hypothesis <=> body (single conjunction).
struct ConfidenceRule {
    double confidence = 1.0;
    std::string hypothesis;
    Conjunction body;
};

/// c: hypothesis <=> d1 | d2 | ...  realized later as one max-pooling unit.
struct PoolingRule {
    double confidence = 1.0;
    std::string hypothesis;
    std::vector<Conjunction> disjuncts;
};

class SymbolTable {
public:
    int intern(std::string_view name);
    std::optional<int> find(std::string_view name) const;
    const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
    int size() const { return static_cast<int>(names_.size()); }

    friend bool operator==(const SymbolTable& a, const SymbolTable& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
};

struct KnowledgeBase {
    SymbolTable symbols;
    std::vector<IfThenRule> rules;
};

/// Total boolean valuation, indexed by symbol id.
using Assignment = std::vector<std::uint8_t>;

struct ParseError : std::runtime_error {
    ParseError(int line, int column, const std::string& what)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                             ": " + what),
          line(line),
          column(column) {}
    int line;
    int column;
};

KnowledgeBase parse_rules(std::string_view text);
std::string pretty_print(const KnowledgeBase& kb);
std::string print_rule(const KnowledgeBase& kb, const IfThenRule& rule);

bool evaluate(const Literal& lit, const Assignment& a);
bool evaluate(const Conjunction& conj, const Assignment& a);
bool evaluate(const IfThenRule& rule, const Assignment& a);
bool evaluate(const Dnf& dnf, const Assignment& a);

Dnf to_dnf(const IfThenRule& rule);

/// Splits a to_dnf output into the head Confidence rule and the max-pooled
/// remainder. The pooling rule is absent for rules with an empty body.
std::pair<ConfidenceRule, std::optional<PoolingRule>> to_confidence_rules(const Dnf& dnf);

/// Hypothetical-syllogism flattening: removes `hidden` symbols by substituting
/// each positive body occurrence with the bodies of its defining rules
/// (cross-product over alternatives). Flattened rules keep the consumer
/// rule's confidence. Requires Horn-style chaining: hidden symbols appear
/// only positively.
KnowledgeBase eliminate_intermediates(const KnowledgeBase& kb, const std::set<int>& hidden_symbols);

double weighted_satisfiability(const KnowledgeBase& kb, const Assignment& a);

}  // namespace nsrbm::logic

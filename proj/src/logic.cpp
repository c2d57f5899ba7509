#include "nsrbm/logic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace nsrbm::logic {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '=';
}

struct LineLexer {
    std::string_view line;
    int line_no;
    std::size_t pos = 0;

    void skip_space() {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    }
    bool at_end() {
        skip_space();
        return pos >= line.size();
    }
    int col() const { return static_cast<int>(pos) + 1; }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(line_no, col(), msg); }

    bool accept(char c) {
        skip_space();
        if (pos < line.size() && line[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool accept_arrow() {
        skip_space();
        if (pos + 1 < line.size() && line[pos] == '<' && line[pos + 1] == '-') {
            pos += 2;
            return true;
        }
        return false;
    }
    std::string_view ident() {
        skip_space();
        if (pos >= line.size() || !is_ident_start(line[pos])) fail("expected identifier");
        std::size_t start = pos;
        while (pos < line.size() && is_ident_char(line[pos])) ++pos;
        return line.substr(start, pos - start);
    }
    double number() {
        skip_space();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), value);
        if (ec != std::errc{}) fail("expected number");
        pos = static_cast<std::size_t>(ptr - line.data());
        return value;
    }
    bool peek_number() {
        skip_space();
        if (pos >= line.size()) return false;
        char c = line[pos];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
    }
};

std::string format_confidence(double c) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, c);  // shortest round-trip form
    std::string s(buf, ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
}

}  // namespace

int SymbolTable::intern(std::string_view name) {
    if (auto id = find(name)) return *id;
    names_.emplace_back(name);
    return static_cast<int>(names_.size()) - 1;
}

std::optional<int> SymbolTable::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

KnowledgeBase parse_rules(std::string_view text) {
    KnowledgeBase kb;
    int line_no = 0;
    std::size_t offset = 0;
    while (offset <= text.size()) {
        std::size_t eol = text.find('\n', offset);
        std::string_view line =
            text.substr(offset, eol == std::string_view::npos ? text.size() - offset : eol - offset);
        offset = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        LineLexer lex{line, line_no};
        if (lex.at_end()) continue;

        IfThenRule rule;
        // Optional "confidence:" prefix. Disambiguated from a bare identifier
        // by the leading character.
        if (lex.peek_number()) {
            int col = lex.col();
            rule.confidence = lex.number();
            if (!lex.accept(':')) lex.fail("expected ':' after confidence");
            if (rule.confidence < 0.0)
                throw ParseError(line_no, col, "negative confidence");
        }

        auto literal = [&]() {
            Literal lit;
            lit.negated = lex.accept('!');
            lit.symbol = kb.symbols.intern(lex.ident());
            return lit;
        };

        rule.head = literal();
        if (!lex.accept_arrow()) lex.fail("expected '<-'");
        rule.body.push_back(literal());
        while (lex.accept('&')) rule.body.push_back(literal());
        if (!lex.at_end()) lex.fail("trailing input");

        std::unordered_set<int> seen{rule.head.symbol};
        for (const Literal& lit : rule.body)
            if (!seen.insert(lit.symbol).second)
                throw ParseError(line_no, 1,
                                 "duplicate symbol '" + kb.symbols.name(lit.symbol) + "' in rule");
        kb.rules.push_back(std::move(rule));
    }
    return kb;
}

std::string print_rule(const KnowledgeBase& kb, const IfThenRule& rule) {
    std::string out = format_confidence(rule.confidence) + ": ";
    if (rule.head.negated) out += '!';
    out += kb.symbols.name(rule.head.symbol);
    out += " <-";
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        out += i == 0 ? " " : " & ";
        if (rule.body[i].negated) out += '!';
        out += kb.symbols.name(rule.body[i].symbol);
    }
    return out;
}

std::string pretty_print(const KnowledgeBase& kb) {
    std::string out;
    for (const IfThenRule& rule : kb.rules) {
        out += print_rule(kb, rule);
        out += '\n';
    }
    return out;
}

bool evaluate(const Literal& lit, const Assignment& a) {
    bool v = a.at(static_cast<std::size_t>(lit.symbol)) != 0;
    return lit.negated ? !v : v;
}

bool evaluate(const Conjunction& conj, const Assignment& a) {
    return std::all_of(conj.literals.begin(), conj.literals.end(),
                       [&](const Literal& lit) { return evaluate(lit, a); });
}

bool evaluate(const IfThenRule& rule, const Assignment& a) {
    bool body = std::all_of(rule.body.begin(), rule.body.end(),
                            [&](const Literal& lit) { return evaluate(lit, a); });
    return !body || evaluate(rule.head, a);
}

bool evaluate(const Dnf& dnf, const Assignment& a) {
    return std::any_of(dnf.conjuncts.begin(), dnf.conjuncts.end(),
                       [&](const Conjunction& c) { return evaluate(c, a); });
}

Dnf to_dnf(const IfThenRule& rule) {
    Dnf dnf;
    dnf.confidence = rule.confidence;
    Conjunction head_conj;
    head_conj.literals.push_back(rule.head);
    for (const Literal& lit : rule.body) head_conj.literals.push_back(lit);
    dnf.conjuncts.push_back(std::move(head_conj));
    for (const Literal& lit : rule.body)
        dnf.conjuncts.push_back(Conjunction{{Literal{lit.symbol, !lit.negated}}});
    return dnf;
}

std::pair<ConfidenceRule, std::optional<PoolingRule>> to_confidence_rules(const Dnf& dnf) {
    if (dnf.conjuncts.empty() || dnf.conjuncts.front().literals.empty())
        throw std::invalid_argument("malformed DNF: missing head conjunct");
    ConfidenceRule cr;
    cr.confidence = dnf.confidence;
    cr.hypothesis = "h_y";
    cr.body = dnf.conjuncts.front();

    if (dnf.conjuncts.size() == 1) return {std::move(cr), std::nullopt};

    PoolingRule pr;
    pr.confidence = dnf.confidence;
    pr.hypothesis = "h_p";
    for (std::size_t i = 1; i < dnf.conjuncts.size(); ++i) {
        if (dnf.conjuncts[i].literals.size() != 1)
            throw std::invalid_argument("malformed DNF: tail conjunct is not a single literal");
        pr.disjuncts.push_back(dnf.conjuncts[i]);
    }
    return {std::move(cr), std::move(pr)};
}

namespace {

// Expanded body alternatives of one hidden symbol, hidden-free.
using BodyAlternatives = std::vector<std::vector<Literal>>;

// Merge `extra` into `base`, dropping duplicate literals. Returns false when
// the merge is contradictory (x and !x), i.e. the flattened body is
// unsatisfiable and the rule vacuously true.
bool merge_literals(std::vector<Literal>& base, const std::vector<Literal>& extra) {
    for (const Literal& lit : extra) {
        auto it = std::find_if(base.begin(), base.end(),
                               [&](const Literal& l) { return l.symbol == lit.symbol; });
        if (it == base.end())
            base.push_back(lit);
        else if (it->negated != lit.negated)
            return false;
    }
    return true;
}

BodyAlternatives expand_body(const std::vector<Literal>& body, const std::set<int>& hidden,
                             const std::unordered_map<int, BodyAlternatives>& definitions) {
    BodyAlternatives out{{}};
    for (const Literal& lit : body) {
        if (!hidden.count(lit.symbol)) {
            BodyAlternatives next;
            for (auto& alt : out) {
                auto copy = alt;
                if (merge_literals(copy, {lit})) next.push_back(std::move(copy));
            }
            out = std::move(next);
            continue;
        }
        const BodyAlternatives& defs = definitions.at(lit.symbol);
        BodyAlternatives next;
        for (const auto& alt : out)
            for (const auto& def : defs) {
                auto copy = alt;
                if (merge_literals(copy, def)) next.push_back(std::move(copy));
            }
        out = std::move(next);
    }
    return out;
}

}  // namespace

KnowledgeBase eliminate_intermediates(const KnowledgeBase& kb, const std::set<int>& hidden) {
    // Validate Horn-style usage: hidden symbols never negated.
    for (const IfThenRule& rule : kb.rules) {
        if (hidden.count(rule.head.symbol) && rule.head.negated)
            throw std::invalid_argument("hidden symbol '" + kb.symbols.name(rule.head.symbol) +
                                        "' used as negated head");
        for (const Literal& lit : rule.body)
            if (hidden.count(lit.symbol) && lit.negated)
                throw std::invalid_argument("hidden symbol '" + kb.symbols.name(lit.symbol) +
                                            "' used negated in a body");
    }

    // Resolve each hidden symbol to hidden-free body alternatives, following
    // chains between hidden symbols and rejecting cycles.
    std::unordered_map<int, BodyAlternatives> definitions;
    std::unordered_set<int> in_progress;
    auto resolve = [&](auto&& self, int sym) -> const BodyAlternatives& {
        if (auto it = definitions.find(sym); it != definitions.end()) return it->second;
        if (!in_progress.insert(sym).second)
            throw std::invalid_argument("cyclic definition of hidden symbol '" +
                                        kb.symbols.name(sym) + "'");
        BodyAlternatives alts;
        for (const IfThenRule& rule : kb.rules) {
            if (rule.head.symbol != sym) continue;
            for (const Literal& lit : rule.body)
                if (hidden.count(lit.symbol)) self(self, lit.symbol);
            auto expanded = expand_body(rule.body, hidden, definitions);
            alts.insert(alts.end(), expanded.begin(), expanded.end());
        }
        if (alts.empty())
            throw std::invalid_argument("hidden symbol '" + kb.symbols.name(sym) +
                                        "' has no defining rule");
        in_progress.erase(sym);
        return definitions.emplace(sym, std::move(alts)).first->second;
    };
    for (int sym : hidden) resolve(resolve, sym);

    // Rebuild the KB over observed symbols only, in original order.
    KnowledgeBase out;
    std::unordered_map<int, int> remap;
    for (int id = 0; id < kb.symbols.size(); ++id)
        if (!hidden.count(id)) remap[id] = out.symbols.intern(kb.symbols.name(id));

    for (const IfThenRule& rule : kb.rules) {
        if (hidden.count(rule.head.symbol)) continue;
        for (auto& body : expand_body(rule.body, hidden, definitions)) {
            // A head symbol reappearing in the flattened body makes the rule
            // either a tautology or a pure constraint; both break the
            // duplicate-free invariant, and neither occurs in Horn theories
            // we flatten. Tautologies are dropped.
            auto head_it = std::find_if(body.begin(), body.end(), [&](const Literal& l) {
                return l.symbol == rule.head.symbol;
            });
            if (head_it != body.end()) {
                if (head_it->negated == rule.head.negated) continue;
                throw std::invalid_argument("flattening produced head contradiction in rule head '" +
                                            kb.symbols.name(rule.head.symbol) + "'");
            }
            IfThenRule flat;
            flat.confidence = rule.confidence;
            flat.head = Literal{remap.at(rule.head.symbol), rule.head.negated};
            for (const Literal& lit : body) flat.body.push_back(Literal{remap.at(lit.symbol), lit.negated});
            out.rules.push_back(std::move(flat));
        }
    }
    return out;
}

double weighted_satisfiability(const KnowledgeBase& kb, const Assignment& a) {
    double total = 0.0;
    for (const IfThenRule& rule : kb.rules)
        if (evaluate(rule, a)) total += rule.confidence;
    return total;
}

}  // namespace nsrbm::logic

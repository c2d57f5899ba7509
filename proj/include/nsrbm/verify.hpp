#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsrbm/logic.hpp"
#include "nsrbm/rbm.hpp"

namespace nsrbm::verify {

/// Scalars of the equivalence s(x) = -a * E_rank(x) + b.
struct EquivalenceWitness {
    double a = 0.0;
    double b = 0.0;
    double max_residual = 0.0;
    bool pass = false;
};

struct EquivalenceRow {
    logic::Assignment assignment;
    double satisfiability = 0.0;
    double rank_energy = 0.0;
    double residual = 0.0;
};

struct EquivalenceReport {
    EquivalenceWitness witness;
    std::vector<EquivalenceRow> rows;  // capped at 64
    std::size_t n_assignments = 0;
    bool weighted = true;

    std::string to_text(const logic::KnowledgeBase& kb) const;
};

/// Enumerates every assignment, checks the expected exact witness first
/// (a = 1/epsilon, b = 0 for weighted satisfiability; a = 1/(epsilon*c) for
/// the unweighted reading when all confidences equal c) and falls back to a
/// least-squares fit of (a, b) for diagnostics when that fails.
EquivalenceReport check_equivalence(const logic::KnowledgeBase& kb, const rbm::Rbm& m,
                                    double epsilon, double tol, int jobs = 1, bool weighted = true);

struct ConsistencyReport {
    bool pass = false;
    double max_deviation = 0.0;
    std::vector<int> targets;
    std::vector<double> gibbs;
    std::vector<double> conditional;
};

/// Cross-checks long-chain Gibbs frequencies against the exact conditional
/// marginals on the same clamp.
ConsistencyReport check_conditional_consistency(const rbm::Rbm& m, const rbm::Clamp& clamp,
                                                const std::vector<int>& targets, int n_chains,
                                                int steps, double tol, std::uint64_t seed = 0,
                                                int jobs = 1);

struct CounterexampleReport {
    logic::Assignment assignment;  // minimized
    double residual = 0.0;
    int unit_index = -1;
    int rule_index = -1;
    int member_index = -1;  // -1 unless a pooling member is isolated
    std::string message;
};

/// Shrinks a failing assignment by clearing bits while the residual against
/// -epsilon * satisfiability persists, then names the hidden unit (and
/// pooling member) whose potential disagrees with the logic side.
CounterexampleReport minimize_counterexample(const logic::KnowledgeBase& kb, const rbm::Rbm& m,
                                             const logic::Assignment& failing, double epsilon,
                                             double tol);

struct FuzzConfig {
    int max_symbols = 12;
    int max_rules = 8;
    double max_confidence = 10.0;
    bool allow_negated_heads = true;
};

logic::KnowledgeBase random_kb(rbm::Rng& rng, const FuzzConfig& cfg = {});
logic::IfThenRule random_rule(rbm::Rng& rng, int n_symbols, double max_confidence,
                              bool allow_negated_head = true);

}  // namespace nsrbm::verify

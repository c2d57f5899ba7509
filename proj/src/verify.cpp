#include "nsrbm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nsrbm::verify {

namespace {

logic::Assignment assignment_from_index(std::uint64_t index, int n) {
    logic::Assignment a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = (index >> i) & 1;
    return a;
}

double satisfiability(const logic::KnowledgeBase& kb, const logic::Assignment& a, bool weighted) {
    if (weighted) return logic::weighted_satisfiability(kb, a);
    double s = 0.0;
    for (const auto& rule : kb.rules)
        if (logic::evaluate(rule, a)) s += 1.0;
    return s;
}

}  // namespace

std::string EquivalenceReport::to_text(const logic::KnowledgeBase& kb) const {
    std::ostringstream os;
    os << "assignment";
    for (int i = 0; i < kb.symbols.size(); ++i) os << (i ? " " : "  (") << kb.symbols.name(i);
    if (kb.symbols.size() > 0) os << ")";
    os << "  s  E_rank  residual\n";
    for (const EquivalenceRow& row : rows) {
        for (std::uint8_t bit : row.assignment) os << int(bit);
        os << "  " << row.satisfiability << "  " << row.rank_energy << "  " << row.residual << "\n";
    }
    if (rows.size() < n_assignments) os << "... (" << n_assignments - rows.size() << " rows omitted)\n";
    os << (witness.pass ? "PASS" : "FAIL") << "  a=" << witness.a << " b=" << witness.b
       << " max_residual=" << witness.max_residual << " assignments=" << n_assignments << "\n";
    return os.str();
}

EquivalenceReport check_equivalence(const logic::KnowledgeBase& kb, const rbm::Rbm& m,
                                    double epsilon, double tol, int jobs, bool weighted) {
    const int n = kb.symbols.size();
    if (n > 22) throw std::invalid_argument("too many symbols for exhaustive enumeration");
    if (m.n_visible != n) throw std::invalid_argument("model/KB visible size mismatch");
    const std::uint64_t count = std::uint64_t{1} << n;

    // Expected exact witness.
    double a_exact = 1.0 / epsilon;
    bool have_exact = true;
    if (!weighted) {
        double c0 = kb.rules.empty() ? 1.0 : kb.rules.front().confidence;
        for (const auto& rule : kb.rules) have_exact = have_exact && rule.confidence == c0;
        a_exact = 1.0 / (epsilon * c0);
    }

    auto residual_for = [&](double a, double b, std::uint64_t idx) {
        logic::Assignment x = assignment_from_index(idx, n);
        double s = satisfiability(kb, x, weighted);
        double e = rbm::rank_energy(m, x);
        return std::abs(s - (-a * e + b));
    };

    auto max_residual = [&](double a, double b) {
        double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst) num_threads(std::max(jobs, 1)) \
    if (jobs > 1)
        for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(count); ++idx)
            worst = std::max(worst, residual_for(a, b, static_cast<std::uint64_t>(idx)));
        return worst;
    };

    EquivalenceReport report;
    report.weighted = weighted;
    report.n_assignments = count;
    report.witness.a = a_exact;
    report.witness.b = 0.0;
    report.witness.max_residual = have_exact ? max_residual(a_exact, 0.0) : tol + 1.0;
    report.witness.pass = report.witness.max_residual <= tol;

    if (!report.witness.pass) {
        // Diagnostic least-squares fit of s = -a*E + b.
        double sum_e = 0, sum_s = 0, sum_ee = 0, sum_es = 0;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            logic::Assignment x = assignment_from_index(idx, n);
            double e = -rbm::rank_energy(m, x);
            double s = satisfiability(kb, x, weighted);
            sum_e += e;
            sum_s += s;
            sum_ee += e * e;
            sum_es += e * s;
        }
        double nn = static_cast<double>(count);
        double denom = nn * sum_ee - sum_e * sum_e;
        if (std::abs(denom) > 1e-300) {
            report.witness.a = (nn * sum_es - sum_e * sum_s) / denom;
            report.witness.b = (sum_s - report.witness.a * sum_e) / nn;
        } else {
            // Degenerate: constant energy. Keep a, solve b only.
            report.witness.a = a_exact;
            report.witness.b = (sum_s - a_exact * sum_e) / nn;
        }
        report.witness.max_residual = max_residual(report.witness.a, report.witness.b);
        report.witness.pass = report.witness.max_residual <= tol;
    }

    for (std::uint64_t idx = 0; idx < std::min<std::uint64_t>(count, 64); ++idx) {
        EquivalenceRow row;
        row.assignment = assignment_from_index(idx, n);
        row.satisfiability = satisfiability(kb, row.assignment, weighted);
        row.rank_energy = rbm::rank_energy(m, row.assignment);
        row.residual =
            std::abs(row.satisfiability - (-report.witness.a * row.rank_energy + report.witness.b));
        report.rows.push_back(std::move(row));
    }
    return report;
}

ConsistencyReport check_conditional_consistency(const rbm::Rbm& m, const rbm::Clamp& clamp,
                                                const std::vector<int>& targets, int n_chains,
                                                int steps, double tol, std::uint64_t seed,
                                                int jobs) {
    ConsistencyReport report;
    report.targets = targets;
    if (targets.empty()) {  // nothing free to compare
        report.pass = true;
        return report;
    }
    report.conditional = rbm::conditional_marginals(m, clamp, targets);
    std::vector<double> freqs = rbm::gibbs_infer(m, clamp, steps, n_chains, seed, jobs);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        double g = freqs[static_cast<std::size_t>(targets[t])];
        report.gibbs.push_back(g);
        report.max_deviation = std::max(report.max_deviation, std::abs(g - report.conditional[t]));
    }
    report.pass = report.max_deviation <= tol;
    return report;
}

CounterexampleReport minimize_counterexample(const logic::KnowledgeBase& kb, const rbm::Rbm& m,
                                             const logic::Assignment& failing, double epsilon,
                                             double tol) {
    auto residual = [&](const logic::Assignment& x) {
        return std::abs(logic::weighted_satisfiability(kb, x) + rbm::rank_energy(m, x) / epsilon);
    };
    logic::Assignment x = failing;
    if (residual(x) <= tol)
        throw std::invalid_argument("minimize_counterexample called without a failing assignment");

    // Greedy shrink: clear bits one at a time while the failure persists.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!x[i]) continue;
            x[i] = 0;
            if (residual(x) > tol)
                changed = true;
            else
                x[i] = 1;
        }
    }

    CounterexampleReport report;
    report.assignment = x;
    report.residual = residual(x);

    // Name the unit whose realized contribution max(0, potential) disagrees
    // with the logic side's expectation c*epsilon*[conjunct true].
    for (std::size_t j = 0; j < m.hidden.size(); ++j) {
        const rbm::HiddenUnit& u = m.hidden[j];
        int rule_index = -1;
        if (u.label.size() > 1 && u.label[0] == 'r') rule_index = std::atoi(u.label.c_str() + 1);
        if (rule_index < 0 || rule_index >= static_cast<int>(kb.rules.size())) continue;
        auto [cr, pr] = logic::to_confidence_rules(logic::to_dnf(kb.rules[static_cast<std::size_t>(rule_index)]));
        double c = kb.rules[static_cast<std::size_t>(rule_index)].confidence;

        if (u.kind == rbm::HiddenUnit::Kind::Standard) {
            double expected = logic::evaluate(cr.body, x) ? c * epsilon : 0.0;
            if (std::abs(std::max(0.0, u.potential(x)) - expected) > tol) {
                report.unit_index = static_cast<int>(j);
                report.rule_index = rule_index;
                report.message = "standard unit " + u.label + " disagrees with rule " +
                                 logic::print_rule(kb, kb.rules[static_cast<std::size_t>(rule_index)]);
                return report;
            }
        } else if (pr) {
            for (std::size_t mi = 0; mi < u.members.size() && mi < pr->disjuncts.size(); ++mi) {
                double expected = logic::evaluate(pr->disjuncts[mi], x) ? c * epsilon : 0.0;
                double actual = std::max(0.0, u.members[mi].potential(x));
                if (std::abs(actual - expected) > tol) {
                    report.unit_index = static_cast<int>(j);
                    report.rule_index = rule_index;
                    report.member_index = static_cast<int>(mi);
                    report.message = "pooling member " + std::to_string(mi) + " of " + u.label +
                                     " disagrees with rule " +
                                     logic::print_rule(kb, kb.rules[static_cast<std::size_t>(rule_index)]);
                    return report;
                }
            }
        }
    }
    report.message = "residual persists but no single unit isolated";
    return report;
}

logic::IfThenRule random_rule(rbm::Rng& rng, int n_symbols, double max_confidence,
                              bool allow_negated_head) {
    std::uniform_int_distribution<int> sym(0, n_symbols - 1);
    std::uniform_real_distribution<double> conf(std::nextafter(0.0, 1.0), max_confidence);
    std::bernoulli_distribution coin(0.5);

    logic::IfThenRule rule;
    rule.confidence = conf(rng);
    std::vector<int> order(static_cast<std::size_t>(n_symbols));
    for (int i = 0; i < n_symbols; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);

    int body_len = std::uniform_int_distribution<int>(1, std::max(1, n_symbols - 1))(rng);
    rule.head = {order[0], allow_negated_head && coin(rng)};
    for (int i = 0; i < body_len; ++i) rule.body.push_back({order[static_cast<std::size_t>(i + 1)], coin(rng)});
    return rule;
}

logic::KnowledgeBase random_kb(rbm::Rng& rng, const FuzzConfig& cfg) {
    logic::KnowledgeBase kb;
    int n_symbols = std::uniform_int_distribution<int>(2, cfg.max_symbols)(rng);
    for (int i = 0; i < n_symbols; ++i) kb.symbols.intern("x" + std::to_string(i));
    int n_rules = std::uniform_int_distribution<int>(1, cfg.max_rules)(rng);
    for (int r = 0; r < n_rules; ++r)
        kb.rules.push_back(random_rule(rng, n_symbols, cfg.max_confidence, cfg.allow_negated_heads));
    return kb;
}

}  // namespace nsrbm::verify

#include "nsrbm/compile.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace nsrbm::compile {

namespace {

void check_cfg(const CompileConfig& cfg) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw std::invalid_argument("epsilon must lie in (0,1)");
}

rbm::PoolMember member_for(double c, const logic::Conjunction& conj, int n_visible,
                           const std::vector<int>* layout, double epsilon) {
    rbm::PoolMember pm;
    pm.weights.assign(static_cast<std::size_t>(n_visible), 0.0);
    int positives = 0;
    for (const logic::Literal& lit : conj.literals) {
        int vis = layout ? layout->at(static_cast<std::size_t>(lit.symbol)) : lit.symbol;
        pm.weights.at(static_cast<std::size_t>(vis)) = lit.negated ? -c : c;
        if (!lit.negated) ++positives;
    }
    pm.bias = c * (epsilon - positives);
    return pm;
}

}  // namespace

rbm::HiddenUnit compile_conjunction(double c, const logic::Conjunction& conj, int n_visible,
                                    const CompileConfig& cfg) {
    check_cfg(cfg);
    if (conj.literals.empty()) throw std::invalid_argument("cannot compile empty conjunction");
    rbm::HiddenUnit u;
    u.kind = rbm::HiddenUnit::Kind::Standard;
    u.frozen = true;
    u.members.push_back(member_for(c, conj, n_visible, nullptr, cfg.epsilon));
    return u;
}

rbm::HiddenUnit compile_pooling(double c, const logic::PoolingRule& pr, int n_visible,
                                const CompileConfig& cfg) {
    check_cfg(cfg);
    if (pr.disjuncts.empty()) throw std::invalid_argument("cannot compile empty pooling rule");
    rbm::HiddenUnit u;
    u.kind = rbm::HiddenUnit::Kind::Pooling;
    u.frozen = true;
    u.label = pr.hypothesis;
    for (const logic::Conjunction& d : pr.disjuncts) {
        if (d.literals.empty()) throw std::invalid_argument("empty disjunct in pooling rule");
        u.members.push_back(member_for(c, d, n_visible, nullptr, cfg.epsilon));
    }
    return u;
}

namespace {

rbm::Rbm compile_impl(const logic::KnowledgeBase& kb, const CompileConfig& cfg, int n_visible,
                      const std::vector<int>* layout) {
    check_cfg(cfg);
    rbm::Rbm m;
    m.n_visible = n_visible;
    m.visible_bias.assign(static_cast<std::size_t>(n_visible), 0.0);

    int rule_index = 0;
    for (const logic::IfThenRule& rule : kb.rules) {
        auto [cr, pr] = logic::to_confidence_rules(logic::to_dnf(rule));
        rbm::HiddenUnit head;
        head.kind = rbm::HiddenUnit::Kind::Standard;
        head.frozen = true;
        head.label = "r" + std::to_string(rule_index) + ":h_y";
        head.members.push_back(member_for(cr.confidence, cr.body, n_visible, layout, cfg.epsilon));
        m.hidden.push_back(std::move(head));
        if (pr) {
            rbm::HiddenUnit pool;
            pool.kind = rbm::HiddenUnit::Kind::Pooling;
            pool.frozen = true;
            pool.label = "r" + std::to_string(rule_index) + ":h_p";
            for (const logic::Conjunction& d : pr->disjuncts)
                pool.members.push_back(member_for(pr->confidence, d, n_visible, layout, cfg.epsilon));
            m.hidden.push_back(std::move(pool));
        }
        ++rule_index;
    }

    rbm::Rng rng = rbm::split_rng(cfg.seed, 0x66726565ULL);
    std::normal_distribution<double> init(0.0, 0.01);
    for (int f = 0; f < cfg.n_free_hidden; ++f) {
        rbm::HiddenUnit u;
        u.kind = rbm::HiddenUnit::Kind::Standard;
        u.frozen = false;
        u.label = "free" + std::to_string(f);
        rbm::PoolMember pm;
        pm.weights.resize(static_cast<std::size_t>(n_visible));
        for (double& w : pm.weights) w = init(rng);
        pm.bias = init(rng);
        u.members.push_back(std::move(pm));
        m.hidden.push_back(std::move(u));
    }
    return m;
}

}  // namespace

rbm::Rbm compile_kb(const logic::KnowledgeBase& kb, const CompileConfig& cfg) {
    return compile_impl(kb, cfg, kb.symbols.size(), nullptr);
}

rbm::Rbm compile_kb_with_layout(const logic::KnowledgeBase& kb, const CompileConfig& cfg,
                                int n_visible, const std::vector<int>& symbol_to_visible) {
    if (symbol_to_visible.size() != static_cast<std::size_t>(kb.symbols.size()))
        throw std::invalid_argument("layout size mismatch");
    return compile_impl(kb, cfg, n_visible, &symbol_to_visible);
}

}  // namespace nsrbm::compile

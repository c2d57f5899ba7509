#pragma once

#include <cstdint>
#include <vector>

#include "nsrbm/logic.hpp"
#include "nsrbm/rbm.hpp"

namespace nsrbm::compile {

struct CompileConfig {
    double epsilon = 0.5;  // must stay in (0,1)
    int n_free_hidden = 0;
    std::uint64_t seed = 0;
};

/// Standard unit for c: h <=> conj. Weight +c / -c per literal,
/// bias c*(epsilon - #positives). Potential is c*epsilon iff conj holds,
/// at most c*(epsilon - 1) otherwise.
rbm::HiddenUnit compile_conjunction(double c, const logic::Conjunction& conj, int n_visible,
                                    const CompileConfig& cfg);

rbm::HiddenUnit compile_pooling(double c, const logic::PoolingRule& pr, int n_visible,
                                const CompileConfig& cfg);

/// Two hidden units per rule (head conjunct + pooled remainder, pool omitted
/// for empty-body rules), then cfg.n_free_hidden trainable units initialized
/// from N(0, 0.01^2). Visible layout follows the KB symbol table.
rbm::Rbm compile_kb(const logic::KnowledgeBase& kb, const CompileConfig& cfg);

/// Same, but placing each KB symbol at symbol_to_visible[id] in a larger
/// visible layer (used when rules cover a subset of the data encoding).
rbm::Rbm compile_kb_with_layout(const logic::KnowledgeBase& kb, const CompileConfig& cfg,
                                int n_visible, const std::vector<int>& symbol_to_visible);

}  // namespace nsrbm::compile

#include "nsrbm/relpipe.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace nsrbm::relpipe {

namespace {

rbm::Clamp person_clamp(const ExampleSet& e, int slot1_entity, int slot2_entity) {
    // One-hot person blocks; -1 leaves a whole block clamped to zero.
    rbm::Clamp clamp = rbm::Clamp::none(e.scheme.n_symbols());
    for (int slot = 0; slot < 2; ++slot) {
        int active = slot == 0 ? slot1_entity : slot2_entity;
        for (std::size_t p = 0; p < e.people.size(); ++p) {
            int sym = e.scheme.slot_symbol(slot, static_cast<int>(p));
            clamp.set(sym, static_cast<int>(p) == active);
        }
    }
    return clamp;
}

std::vector<double> relation_scores(const rbm::Rbm& n, const ExampleSet& e, const rbm::Clamp& clamp,
                                    const PipeConfig& cfg, std::uint64_t stream) {
    std::vector<int> targets(e.scheme.predicate_symbols.begin(), e.scheme.predicate_symbols.end());
    if (cfg.mode == InferMode::Conditional) return rbm::conditional_marginals(n, clamp, targets);
    std::vector<double> freqs = rbm::gibbs_infer(n, clamp, cfg.gibbs_steps, cfg.gibbs_chains,
                                                 rbm::split_rng(cfg.seed, stream)());
    std::vector<double> scores(targets.size());
    for (std::size_t r = 0; r < targets.size(); ++r)
        scores[r] = freqs[static_cast<std::size_t>(targets[r])];
    return scores;
}

std::vector<std::pair<int, double>> rank_descending(const std::vector<double>& scores) {
    std::vector<std::pair<int, double>> ranked;
    ranked.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) ranked.emplace_back(static_cast<int>(i), scores[i]);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;  // ties toward the lower id
    });
    return ranked;
}

}  // namespace

std::vector<double> Pipeline::scale(std::vector<double> f) const {
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = std::clamp((f[i] - feat_lo[i]) / feat_span[i], 0.0, 1.0);
    return f;
}

Pipeline build_pipeline(const ExampleSet& e, const PipeConfig& cfg) {
    return build_pipeline(e, e.atoms, cfg);
}

Pipeline build_pipeline(const ExampleSet& e, const std::vector<fol::GroundAtom>& train_atoms,
                        const PipeConfig& cfg) {
    if (e.atoms.empty()) throw std::invalid_argument("empty example set");
    if (train_atoms.size() < 2) throw std::invalid_argument("need at least 2 examples");
    Pipeline pipe;
    pipe.model = encode_examples(e, cfg);
    pipe.n_direct = static_cast<int>(e.relations.size());

    // One profile per person, shared across every pair it appears in. The
    // conditional marginals depend only on the clamp, so this is exact; the
    // sampled Gibbs path keeps per-pair streams and skips the cache.
    std::vector<std::vector<double>> features;
    features.reserve(train_atoms.size());
    if (cfg.mode == InferMode::Conditional) {
        pipe.profiles.reserve(e.people.size());
        for (std::size_t p = 0; p < e.people.size(); ++p) {
            std::vector<double> prof =
                relation_scores(pipe.model, e, person_clamp(e, static_cast<int>(p), -1), cfg, 0);
            std::vector<double> as_arg2 =
                relation_scores(pipe.model, e, person_clamp(e, -1, static_cast<int>(p)), cfg, 0);
            prof.insert(prof.end(), as_arg2.begin(), as_arg2.end());
            pipe.profiles.push_back(std::move(prof));
        }
        // direct scores per ordered pair; the reverse block of (a, b) is the
        // direct block of (b, a), usually another example
        std::map<std::pair<int, int>, std::vector<double>> direct;
        auto pair_scores = [&](int a, int b) -> const std::vector<double>& {
            auto it = direct.find({a, b});
            if (it == direct.end())
                it = direct.emplace(std::pair{a, b},
                                    relation_scores(pipe.model, e, person_clamp(e, a, b), cfg, 0))
                         .first;
            return it->second;
        };
        for (const fol::GroundAtom& atom : train_atoms) {
            std::vector<double> f = pair_scores(atom.args[0], atom.args[1]);
            const auto& rev = pair_scores(atom.args[1], atom.args[0]);
            f.insert(f.end(), rev.begin(), rev.end());
            const auto& left = pipe.profiles[static_cast<std::size_t>(atom.args[0])];
            const auto& right = pipe.profiles[static_cast<std::size_t>(atom.args[1])];
            f.insert(f.end(), left.begin(), left.end());
            f.insert(f.end(), right.begin(), right.end());
            features.push_back(std::move(f));
        }
    } else {
        for (const fol::GroundAtom& atom : train_atoms)
            features.push_back(infer_features(pipe.model, e, atom.args[0], atom.args[1], cfg).flat());
    }

    std::size_t dim = features.front().size();
    pipe.feat_lo.assign(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (const auto& f : features)
        for (std::size_t i = 0; i < dim; ++i) {
            pipe.feat_lo[i] = std::min(pipe.feat_lo[i], f[i]);
            hi[i] = std::max(hi[i], f[i]);
        }
    pipe.feat_span.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) pipe.feat_span[i] = std::max(hi[i] - pipe.feat_lo[i], 1e-9);
    auto binarize_context = [&](std::vector<double>& f) {
        if (cfg.context_threshold <= 0) return;
        for (std::size_t i = static_cast<std::size_t>(2 * pipe.n_direct); i < f.size(); ++i)
            f[i] = f[i] > cfg.context_threshold ? 1.0 : 0.0;
    };
    for (auto& f : features) {
        f = pipe.scale(std::move(f));
        binarize_context(f);
    }

    // denoising pairs: (full -> full) plus, depending on the query type the
    // pipeline serves, either (direct masked -> full) completion pairs for
    // relation queries or unlinked negative pairs that teach entity queries
    // to gate on pair evidence
    std::set<std::pair<int, int>> linked;
    for (const fol::GroundAtom& atom : e.atoms) {
        linked.insert({atom.args[0], atom.args[1]});
        linked.insert({atom.args[1], atom.args[0]});
    }
    rbm::Rng neg_rng = rbm::split_rng(cfg.seed, 0x6e6567ULL);
    std::vector<std::vector<double>> inputs, targets;
    inputs.reserve(3 * features.size());
    targets.reserve(3 * features.size());
    for (const auto& f : features) {
        inputs.push_back(f);
        targets.push_back(f);
        if (cfg.mask_denoising) {
            std::vector<double> masked = f;
            for (int r = 0; r < pipe.n_direct; ++r) masked[static_cast<std::size_t>(r)] = 0.0;
            inputs.push_back(std::move(masked));
            targets.push_back(f);
        }
    }
    if (cfg.mode == InferMode::Conditional && e.people.size() > 2 && !cfg.mask_denoising) {
        // hard negatives: keep the left entity of a real example and swap in
        // an unlinked right entity, so the profiles stay plausible while the
        // pair evidence vanishes
        for (std::size_t n = 0; n < features.size(); ++n) {
            int a = train_atoms[n].args[0];
            int b = -1;
            for (int attempt = 0; attempt < 64; ++attempt) {
                int c = static_cast<int>(neg_rng() % e.people.size());
                if (c != a && linked.count({a, c}) == 0) {
                    b = c;
                    break;
                }
            }
            if (b < 0) continue;  // a is linked to everyone; no negative here
            // unlinked pair marginals are base rates: scaled direct/reverse
            // blocks clamp to zero, so build the scaled vector directly
            std::vector<double> neg(static_cast<std::size_t>(2 * pipe.n_direct), 0.0);
            const auto& left = pipe.profiles[static_cast<std::size_t>(a)];
            const auto& right = pipe.profiles[static_cast<std::size_t>(b)];
            neg.insert(neg.end(), left.begin(), left.end());
            neg.insert(neg.end(), right.begin(), right.end());
            for (std::size_t i = static_cast<std::size_t>(2 * pipe.n_direct); i < dim; ++i)
                neg[i] = std::clamp((neg[i] - pipe.feat_lo[i]) / pipe.feat_span[i], 0.0, 1.0);
            binarize_context(neg);
            inputs.push_back(neg);
            targets.push_back(std::move(neg));
        }
    }

    autoenc::TrainConfig ae_cfg = cfg.ae;
    ae_cfg.seed = cfg.seed;
    if (cfg.pair_weight != 1.0) {
        ae_cfg.loss_weights.assign(dim, 1.0);
        for (int r = 0; r < 2 * pipe.n_direct; ++r)
            ae_cfg.loss_weights[static_cast<std::size_t>(r)] = cfg.pair_weight;
    }
    pipe.ae = autoenc::train(inputs, targets, ae_cfg);
    return pipe;
}

std::vector<double> FeatureVector::flat() const {
    std::vector<double> out;
    out.reserve(direct.size() + reverse.size() + left.size() + right.size());
    out.insert(out.end(), direct.begin(), direct.end());
    out.insert(out.end(), reverse.begin(), reverse.end());
    out.insert(out.end(), left.begin(), left.end());
    out.insert(out.end(), right.begin(), right.end());
    return out;
}

rbm::Rbm encode_examples(const ExampleSet& e, const PipeConfig& cfg) {
    if (e.atoms.empty()) throw std::invalid_argument("empty example set");
    compile::CompileConfig ccfg;
    ccfg.epsilon = cfg.epsilon;
    ccfg.seed = cfg.seed;

    rbm::Rbm m;
    m.n_visible = e.scheme.n_symbols();
    m.visible_bias.assign(static_cast<std::size_t>(m.n_visible), 0.0);
    int idx = 0;
    for (const fol::GroundAtom& atom : e.atoms) {
        if (atom.predicate < 0 ||
            atom.predicate >= static_cast<int>(e.scheme.predicate_symbols.size()))
            throw std::invalid_argument("atom outside scheme");
        auto rules = fol::ground_predicate(e.relations[static_cast<std::size_t>(atom.predicate)],
                                           {atom}, e.scheme, cfg.rule_confidence);
        rbm::HiddenUnit u = compile::compile_conjunction(rules.front().confidence,
                                                         rules.front().body, m.n_visible, ccfg);
        u.label = "e" + std::to_string(idx++);
        m.hidden.push_back(std::move(u));
    }
    return m;
}

FeatureVector infer_features(const rbm::Rbm& n, const ExampleSet& e, int a, int b,
                             const PipeConfig& cfg) {
    if (a < 0 || b < 0 || a >= static_cast<int>(e.people.size()) ||
        b >= static_cast<int>(e.people.size()))
        throw std::invalid_argument("unknown entity");
    FeatureVector f;
    std::uint64_t pair_stream =
        (static_cast<std::uint64_t>(a) << 20) | (static_cast<std::uint64_t>(b) << 3);
    f.direct = relation_scores(n, e, person_clamp(e, a, b), cfg, pair_stream);
    f.reverse = relation_scores(n, e, person_clamp(e, b, a), cfg, pair_stream | 6);
    auto role_profile = [&](int person, std::uint64_t stream) {
        std::vector<double> as_arg1 =
            relation_scores(n, e, person_clamp(e, person, -1), cfg, stream);
        std::vector<double> as_arg2 =
            relation_scores(n, e, person_clamp(e, -1, person), cfg, stream | 1);
        as_arg1.insert(as_arg1.end(), as_arg2.begin(), as_arg2.end());
        return as_arg1;
    };
    f.left = role_profile(a, pair_stream | 2);
    f.right = role_profile(b, pair_stream | 4);
    return f;
}

namespace {

// Query features, scaled and binarized like the training set. Relation
// queries zero the direct block: the pair is absent from the example set, so
// its direct marginals are base-rate noise and the denoising autoencoder is
// trained to complete them from the profiles. Entity queries keep the direct
// block: whether the model holds direct evidence for (a, b) is exactly what
// separates candidate entities.
std::vector<double> query_features(const Pipeline& pipe, const ExampleSet& e, int a, int b,
                                   const PipeConfig& cfg, bool mask_direct) {
    std::vector<double> f;
    if (!pipe.profiles.empty()) {
        if (a < 0 || b < 0 || a >= static_cast<int>(e.people.size()) ||
            b >= static_cast<int>(e.people.size()))
            throw std::invalid_argument("unknown entity");
        if (mask_direct)
            f.assign(static_cast<std::size_t>(pipe.n_direct), 0.0);
        else
            f = relation_scores(pipe.model, e, person_clamp(e, a, b), cfg, 0);
        std::vector<double> rev = relation_scores(pipe.model, e, person_clamp(e, b, a), cfg, 0);
        f.insert(f.end(), rev.begin(), rev.end());
        const auto& left = pipe.profiles[static_cast<std::size_t>(a)];
        const auto& right = pipe.profiles[static_cast<std::size_t>(b)];
        f.insert(f.end(), left.begin(), left.end());
        f.insert(f.end(), right.begin(), right.end());
    } else {
        f = infer_features(pipe.model, e, a, b, cfg).flat();
    }
    f = pipe.scale(std::move(f));
    if (cfg.context_threshold > 0)
        for (std::size_t i = static_cast<std::size_t>(2 * pipe.n_direct); i < f.size(); ++i)
            f[i] = f[i] > cfg.context_threshold ? 1.0 : 0.0;
    if (mask_direct)
        for (int r = 0; r < pipe.n_direct; ++r) f[static_cast<std::size_t>(r)] = 0.0;
    return f;
}

}  // namespace

Answer answer_relation(const Pipeline& pipe, const ExampleSet& e, int a, int b,
                       const PipeConfig& cfg) {
    std::vector<double> f = query_features(pipe, e, a, b, cfg, true);
    std::vector<double> rec = pipe.ae.reconstruct(f);
    std::vector<double> direct(rec.begin(), rec.begin() + static_cast<long>(e.relations.size()));
    return {rank_descending(direct)};
}

Answer answer_relation(const ExampleSet& e, int a, int b, const PipeConfig& cfg) {
    return answer_relation(build_pipeline(e, cfg), e, a, b, cfg);
}

Answer answer_entity(const Pipeline& pipe, const ExampleSet& e, int relation, int a,
                     const PipeConfig& cfg) {
    if (relation < 0 || relation >= static_cast<int>(e.relations.size()))
        throw std::invalid_argument("unknown relation");
    std::vector<double> scores(e.people.size());
    for (std::size_t b = 0; b < e.people.size(); ++b) {
        std::vector<double> f = query_features(pipe, e, a, static_cast<int>(b), cfg, false);
        scores[b] = pipe.ae.reconstruct(f)[static_cast<std::size_t>(relation)];
    }
    return {rank_descending(scores)};
}

Answer answer_entity(const ExampleSet& e, int relation, int a, const PipeConfig& cfg) {
    return answer_entity(build_pipeline(e, cfg), e, relation, a, cfg);
}

}  // namespace nsrbm::relpipe

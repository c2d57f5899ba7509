#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsrbm/autoenc.hpp"
#include "nsrbm/compile.hpp"
#include "nsrbm/fol.hpp"
#include "nsrbm/rbm.hpp"

namespace nsrbm::relpipe {

struct ExampleSet {
    std::vector<fol::GroundAtom> atoms;
    fol::GroundingScheme scheme;
    std::vector<fol::Entity> people;
    std::vector<fol::Predicate> relations;
};

enum class InferMode { Conditional, Gibbs };

/// Autoencoder defaults sized for relational feature vectors (tuned on the
/// kinship task; see README).
inline autoenc::TrainConfig default_relational_ae() {
    autoenc::TrainConfig cfg;
    cfg.hidden_size = 64;
    cfg.learning_rate = 0.1;
    cfg.momentum = 0.9;
    cfg.epochs = 150;
    cfg.batch_size = 4;
    return cfg;
}

struct PipeConfig {
    double epsilon = 0.5;
    double rule_confidence = 8.0;
    /// Scaled profile entries above this become 1, the rest 0; the meaningful
    /// signal is "at least one supporting example", which sits well above the
    /// numerical noise floor. 0 disables binarization.
    double context_threshold = 0.05;
    /// Reconstruction-loss weight on the direct and reverse pair-evidence
    /// blocks; > 1 stops the profile blocks from drowning out pair evidence.
    double pair_weight = 4.0;
    /// Add (direct-masked input -> full target) denoising pairs. Needed for
    /// relation queries, which mask the direct block at query time; harmful
    /// for entity queries, which need the autoencoder to trust pair evidence
    /// rather than complete it from the profiles.
    bool mask_denoising = true;
    InferMode mode = InferMode::Conditional;
    int gibbs_chains = 100;
    int gibbs_steps = 1;
    std::uint64_t seed = 0;
    autoenc::TrainConfig ae = default_relational_ae();
};

/// Relation-score blocks of the INFER function: direct pair (a,b), the
/// reversed pair (b,a), then the role profiles of each person. `left` covers
/// a (R(a,*) followed by R(*,a)), `right` covers b likewise, so those blocks
/// have two entries per relation. Both roles matter: "a is a husband" and
/// "a has a mother" are different evidence, and single-role profiles leave
/// some kinship queries ambiguous. The reversed block matters because pair
/// evidence usually survives in the inverse atom (wife(b,a) backs
/// husband(a,b)) even when the queried direction is unobserved.
struct FeatureVector {
    std::vector<double> direct;
    std::vector<double> reverse;
    std::vector<double> left;
    std::vector<double> right;

    std::vector<double> flat() const;
};

struct Answer {
    std::vector<std::pair<int, double>> ranked;  // (relation or entity id, score), descending
};

/// One Standard rule unit per example atom; visible layout per the scheme.
rbm::Rbm encode_examples(const ExampleSet& e, const PipeConfig& cfg);

/// Encoded model plus the autoencoder trained on every example's features.
/// Raw relation marginals sit in a narrow band around their base rates, so
/// each feature dimension is min-max rescaled over the training set before
/// the autoencoder sees it; queries go through the same affine map, then the
/// profile blocks are binarized (cfg.context_threshold).
///
/// The autoencoder is trained in denoising form: every example contributes an
/// identity pair, a (direct block zeroed -> full vector) pair, and a negative
/// pair for a random unlinked (a, b) whose target direct block is zero. The
/// masked pairs teach completion of an unobserved direction from the reverse
/// block and the profiles; the negatives teach that profiles without pair
/// evidence do not imply a relation.
struct Pipeline {
    rbm::Rbm model;
    autoenc::AutoEncoder ae;
    std::vector<std::vector<double>> profiles;  // per person, conditional mode only
    std::vector<double> feat_lo;    // per-dimension training minimum
    std::vector<double> feat_span;  // per-dimension training range (>= tiny)
    int n_direct = 0;               // leading direct-block width

    std::vector<double> scale(std::vector<double> f) const;
};

Pipeline build_pipeline(const ExampleSet& e, const PipeConfig& cfg);

/// Same, but the autoencoder trains on the features of `train_atoms` only
/// while the model still encodes all of e.atoms (held-out queries then probe
/// what the encoded knowledge base entails about pairs the autoencoder never
/// saw).
Pipeline build_pipeline(const ExampleSet& e, const std::vector<fol::GroundAtom>& train_atoms,
                        const PipeConfig& cfg);
Answer answer_relation(const Pipeline& pipe, const ExampleSet& e, int a, int b,
                       const PipeConfig& cfg);
Answer answer_entity(const Pipeline& pipe, const ExampleSet& e, int relation, int a,
                     const PipeConfig& cfg);

FeatureVector infer_features(const rbm::Rbm& n, const ExampleSet& e, int a, int b,
                             const PipeConfig& cfg);

/// Algorithm: encode e, extract features of every example pair, train the
/// autoencoder on them, reconstruct the query pair's features, rank relations
/// by the reconstructed direct block. The query atom must not be in e.
Answer answer_relation(const ExampleSet& e, int a, int b, const PipeConfig& cfg);

/// Ranks candidate entities b for rel(a, b) by the reconstructed direct-block
/// score of rel.
Answer answer_entity(const ExampleSet& e, int relation, int a, const PipeConfig& cfg);

}  // namespace nsrbm::relpipe

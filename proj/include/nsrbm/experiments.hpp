#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsrbm/data_io.hpp"
#include "nsrbm/logic.hpp"
#include "nsrbm/relpipe.hpp"

namespace nsrbm::experiments {

struct DnaConfig {
    double epsilon = 0.5;
    double rule_confidence = 2.0;  // the paper gives none ("selected empirically")
    int free_hidden = 16;
    rbm::CdConfig cd;
    std::vector<int> train_sizes = {10, 20, 30, 40, 50, 60, 70, 80, 90};
    int repeats = 50;
    std::uint64_t seed = 0;
    int jobs = 1;
};

/// Builds the promoter rule model: flattens the four unseen theory symbols
/// out of the rule KB, then compiles onto the 229-bit one-hot layout.
/// Returns an empty-rule model (free units only) when kb is null.
rbm::Rbm build_promoter_model(const logic::KnowledgeBase* kb, const DnaConfig& cfg);

/// Flattened rule KB from rule-file text (hidden symbols eliminated).
logic::KnowledgeBase flatten_promoter_rules(const logic::KnowledgeBase& kb);

bool predict_promoter(const rbm::Rbm& m, const rbm::Bits& encoded, const std::string& mode,
                      std::uint64_t seed, int gibbs_chains = 100);

/// Leave-one-out accuracy of one model type ("plain" or "rules") in one
/// inference mode ("conditional" or "gibbs").
double dna_loo_accuracy(const std::vector<data_io::PromoterRecord>& records,
                        const logic::KnowledgeBase* kb, const std::string& mode,
                        const DnaConfig& cfg);

/// Learning-curve rows: for each train size and repeat, train on a random
/// subset and test on the rest; both model types, both inference modes.
std::vector<data_io::ResultRow> dna_learning_curve(
    const std::vector<data_io::PromoterRecord>& records, const logic::KnowledgeBase* rules,
    const DnaConfig& cfg);

struct KinshipConfig {
    relpipe::PipeConfig pipe;
    std::vector<int> test_sizes = {10, 20, 30};
    int repeats = 5;
    std::vector<std::uint64_t> loo_seeds = {1, 2, 3};
    int jobs = 1;
};

relpipe::ExampleSet make_example_set(const data_io::KinshipData& data);

/// Leave-one-out relation prediction accuracy for one seed.
double kinship_loo_accuracy(const data_io::KinshipData& data, const KinshipConfig& cfg,
                            std::uint64_t seed);

/// Entity-query error: holds out `test_size` random atoms, asks rel(a,?) for
/// each and requires all designated answers (from the full dataset) in the
/// top-k, k = number of answers.
double kinship_entity_error(const data_io::KinshipData& data, const KinshipConfig& cfg,
                            int test_size, int repeat);

std::vector<data_io::ResultRow> kinship_experiment(const data_io::KinshipData& data,
                                                   const KinshipConfig& cfg);

}  // namespace nsrbm::experiments

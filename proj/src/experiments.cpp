#include "nsrbm/experiments.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "nsrbm/compile.hpp"

namespace nsrbm::experiments {

namespace {

const std::set<std::string> kTheorySymbols = {"contact", "minus_10", "minus_35", "conformation"};

std::vector<std::size_t> shuffled_indices(std::size_t n, rbm::Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

}  // namespace

logic::KnowledgeBase flatten_promoter_rules(const logic::KnowledgeBase& kb) {
    std::set<int> hidden;
    for (int id = 0; id < kb.symbols.size(); ++id)
        if (kTheorySymbols.count(kb.symbols.name(id))) hidden.insert(id);
    return hidden.empty() ? kb : logic::eliminate_intermediates(kb, hidden);
}

rbm::Rbm build_promoter_model(const logic::KnowledgeBase* kb, const DnaConfig& cfg) {
    compile::CompileConfig ccfg;
    ccfg.epsilon = cfg.epsilon;
    ccfg.n_free_hidden = cfg.free_hidden;
    ccfg.seed = cfg.seed;

    if (kb == nullptr) {
        logic::KnowledgeBase empty;
        return compile::compile_kb_with_layout(empty, ccfg, data_io::kPromoterBits, {});
    }

    logic::KnowledgeBase flat = flatten_promoter_rules(*kb);
    for (logic::IfThenRule& rule : flat.rules) rule.confidence *= cfg.rule_confidence;
    std::vector<int> layout(static_cast<std::size_t>(flat.symbols.size()));
    for (int id = 0; id < flat.symbols.size(); ++id) {
        const std::string& name = flat.symbols.name(id);
        if (name == "promoter") {
            layout[static_cast<std::size_t>(id)] = data_io::kPromoterLabelBit;
        } else if (name.size() >= 4 && name[0] == 'p' && name[name.size() - 2] == '=') {
            int pos = std::stoi(name.substr(1, name.size() - 3));
            layout[static_cast<std::size_t>(id)] = data_io::promoter_bit(pos, name.back());
        } else {
            throw std::invalid_argument("rule symbol '" + name + "' has no one-hot position");
        }
    }
    return compile::compile_kb_with_layout(flat, ccfg, data_io::kPromoterBits, layout);
}

bool predict_promoter(const rbm::Rbm& m, const rbm::Bits& encoded, const std::string& mode,
                      std::uint64_t seed, int gibbs_chains) {
    rbm::Clamp clamp = rbm::Clamp::none(data_io::kPromoterBits);
    for (int i = 0; i < data_io::kPromoterLabelBit; ++i) clamp.set(i, encoded[static_cast<std::size_t>(i)]);
    if (mode == "conditional") {
        double p = rbm::conditional_marginals(m, clamp, {data_io::kPromoterLabelBit}).front();
        return p >= 0.5;
    }
    if (mode == "gibbs") {
        std::vector<double> freq = rbm::gibbs_infer(m, clamp, 1, gibbs_chains, seed);
        return freq[data_io::kPromoterLabelBit] >= 0.5;
    }
    throw std::invalid_argument("unknown inference mode: " + mode);
}

namespace {

double dna_eval(const rbm::Rbm& trained, const std::vector<data_io::PromoterRecord>& test,
                const std::string& mode, std::uint64_t seed) {
    int correct = 0;
    for (std::size_t t = 0; t < test.size(); ++t) {
        rbm::Bits enc = data_io::one_hot_promoter(test[t]);
        if (predict_promoter(trained, enc, mode, seed + t) == test[t].label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

rbm::Rbm dna_train(const std::vector<data_io::PromoterRecord>& train,
                   const logic::KnowledgeBase* kb, const DnaConfig& cfg, std::uint64_t seed) {
    DnaConfig local = cfg;
    local.seed = seed;
    rbm::Rbm m = build_promoter_model(kb, local);
    std::vector<rbm::Bits> data;
    data.reserve(train.size());
    for (const auto& r : train) data.push_back(data_io::one_hot_promoter(r));
    rbm::CdConfig cd = cfg.cd;
    cd.seed = seed;
    return rbm::train_cd(m, data, cd);
}

}  // namespace

double dna_loo_accuracy(const std::vector<data_io::PromoterRecord>& records,
                        const logic::KnowledgeBase* kb, const std::string& mode,
                        const DnaConfig& cfg) {
    if (records.size() < 2) throw std::invalid_argument("need at least 2 records");
    std::vector<int> correct(records.size(), 0);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(cfg.jobs, 1)) if (cfg.jobs > 1)
    for (std::int64_t fold = 0; fold < static_cast<std::int64_t>(records.size()); ++fold) {
        std::vector<data_io::PromoterRecord> train;
        train.reserve(records.size() - 1);
        for (std::size_t i = 0; i < records.size(); ++i)
            if (i != static_cast<std::size_t>(fold)) train.push_back(records[i]);
        rbm::Rbm m = dna_train(train, kb, cfg, cfg.seed + static_cast<std::uint64_t>(fold));
        rbm::Bits enc = data_io::one_hot_promoter(records[static_cast<std::size_t>(fold)]);
        bool pred = predict_promoter(m, enc, mode, cfg.seed + static_cast<std::uint64_t>(fold));
        correct[static_cast<std::size_t>(fold)] = pred == records[static_cast<std::size_t>(fold)].label ? 1 : 0;
    }
    return static_cast<double>(std::accumulate(correct.begin(), correct.end(), 0)) /
           static_cast<double>(records.size());
}

std::vector<data_io::ResultRow> dna_learning_curve(
    const std::vector<data_io::PromoterRecord>& records, const logic::KnowledgeBase* rules,
    const DnaConfig& cfg) {
    struct Task {
        int size;
        int repeat;
    };
    std::vector<Task> tasks;
    for (int size : cfg.train_sizes)
        for (int rep = 0; rep < cfg.repeats; ++rep) tasks.push_back({size, rep});

    // 4 rows per task: {plain, rules} x {conditional, gibbs}.
    std::vector<data_io::ResultRow> rows(tasks.size() * 4);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(cfg.jobs, 1)) if (cfg.jobs > 1)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(tasks.size()); ++t) {
        const Task task = tasks[static_cast<std::size_t>(t)];
        std::uint64_t run_seed =
            cfg.seed + 1000003ULL * static_cast<std::uint64_t>(task.size) + static_cast<std::uint64_t>(task.repeat);
        rbm::Rng rng = rbm::split_rng(run_seed, 0x646e61ULL);
        std::vector<std::size_t> idx = shuffled_indices(records.size(), rng);

        std::vector<data_io::PromoterRecord> train, test;
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < static_cast<std::size_t>(task.size) ? train : test).push_back(records[idx[i]]);

        std::size_t base = static_cast<std::size_t>(t) * 4;
        int slot = 0;
        for (const logic::KnowledgeBase* kb : {static_cast<const logic::KnowledgeBase*>(nullptr), rules}) {
            rbm::Rbm m = dna_train(train, kb, cfg, run_seed);
            for (const char* mode : {"conditional", "gibbs"}) {
                data_io::ResultRow row;
                row.experiment = kb ? "dna-rules" : "dna-plain";
                row.train_size = task.size;
                row.repeat = task.repeat;
                row.seed = run_seed;
                row.mode = mode;
                row.accuracy = dna_eval(m, test, mode, run_seed);
                rows[base + static_cast<std::size_t>(slot++)] = std::move(row);
            }
        }
    }
    return rows;
}

relpipe::ExampleSet make_example_set(const data_io::KinshipData& data) {
    relpipe::ExampleSet e;
    e.atoms = data.atoms;
    e.people = data.people;
    e.relations = data.relations;
    e.scheme = fol::build_kinship_scheme(data.people, data.relations);
    return e;
}

double kinship_loo_accuracy(const data_io::KinshipData& data, const KinshipConfig& cfg,
                            std::uint64_t seed) {
    relpipe::ExampleSet base = make_example_set(data);
    std::vector<int> correct(data.atoms.size(), 0);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(cfg.jobs, 1)) if (cfg.jobs > 1)
    for (std::int64_t fold = 0; fold < static_cast<std::int64_t>(data.atoms.size()); ++fold) {
        relpipe::ExampleSet e = base;
        fol::GroundAtom query = e.atoms[static_cast<std::size_t>(fold)];
        e.atoms.erase(e.atoms.begin() + fold);
        relpipe::PipeConfig pcfg = cfg.pipe;
        pcfg.seed = rbm::split_rng(seed, static_cast<std::uint64_t>(fold))();
        relpipe::Answer ans = relpipe::answer_relation(e, query.args[0], query.args[1], pcfg);
        correct[static_cast<std::size_t>(fold)] = ans.ranked.front().first == query.predicate ? 1 : 0;
    }
    return static_cast<double>(std::accumulate(correct.begin(), correct.end(), 0)) /
           static_cast<double>(data.atoms.size());
}

double kinship_entity_error(const data_io::KinshipData& data, const KinshipConfig& cfg,
                            int test_size, int repeat) {
    if (test_size <= 0 || test_size >= static_cast<int>(data.atoms.size()))
        throw std::invalid_argument("bad test size");

    // Designated answers come from the full dataset.
    std::map<std::pair<int, int>, std::set<int>> gold;  // (relation, a) -> {b}
    for (const fol::GroundAtom& atom : data.atoms)
        gold[{atom.predicate, atom.args[0]}].insert(atom.args[1]);

    relpipe::PipeConfig pcfg = cfg.pipe;
    pcfg.mask_denoising = false;  // entity queries keep pair evidence in the input
    pcfg.ae.epochs = 250;         // few pipelines here, so spend more on each fit
    std::uint64_t run_seed = rbm::split_rng(cfg.pipe.seed,
                                            0x656e74ULL + 131ULL * static_cast<std::uint64_t>(test_size) +
                                                static_cast<std::uint64_t>(repeat))();
    pcfg.seed = run_seed;

    rbm::Rng rng = rbm::split_rng(run_seed, 0x73706c69ULL);
    std::vector<std::size_t> idx = shuffled_indices(data.atoms.size(), rng);

    // Test atoms are held out of the autoencoder training set; the network
    // still encodes the full example set (queries probe what the encoded
    // knowledge base entails about pairs the autoencoder never saw).
    relpipe::ExampleSet e = make_example_set(data);
    std::vector<fol::GroundAtom> held_out;
    std::vector<fol::GroundAtom> kept;
    for (std::size_t i = 0; i < idx.size(); ++i)
        (i < static_cast<std::size_t>(test_size) ? held_out : kept).push_back(data.atoms[idx[i]]);

    relpipe::Pipeline pipe = relpipe::build_pipeline(e, kept, pcfg);
    int wrong = 0;
    for (const fol::GroundAtom& query : held_out) {
        const std::set<int>& answers = gold.at({query.predicate, query.args[0]});
        relpipe::Answer ans = relpipe::answer_entity(pipe, e, query.predicate, query.args[0], pcfg);
        std::set<int> top;
        for (std::size_t k = 0; k < answers.size() && k < ans.ranked.size(); ++k)
            top.insert(ans.ranked[k].first);
        if (!std::includes(top.begin(), top.end(), answers.begin(), answers.end())) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(test_size);
}

std::vector<data_io::ResultRow> kinship_experiment(const data_io::KinshipData& data,
                                                   const KinshipConfig& cfg) {
    std::vector<data_io::ResultRow> rows;
    for (std::uint64_t seed : cfg.loo_seeds) {
        data_io::ResultRow row;
        row.experiment = "kinship-loo";
        row.train_size = static_cast<int>(data.atoms.size()) - 1;
        row.repeat = 0;
        row.seed = seed;
        row.mode = cfg.pipe.mode == relpipe::InferMode::Conditional ? "conditional" : "gibbs";
        row.accuracy = kinship_loo_accuracy(data, cfg, seed);
        rows.push_back(std::move(row));
    }
    for (int size : cfg.test_sizes) {
        struct Task {
            int size, repeat;
        };
        std::vector<Task> tasks;
        for (int rep = 0; rep < cfg.repeats; ++rep) tasks.push_back({size, rep});
        std::vector<double> errors(tasks.size(), 0.0);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(cfg.jobs, 1)) if (cfg.jobs > 1)
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(tasks.size()); ++t)
            errors[static_cast<std::size_t>(t)] =
                kinship_entity_error(data, cfg, tasks[static_cast<std::size_t>(t)].size,
                                     tasks[static_cast<std::size_t>(t)].repeat);
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            data_io::ResultRow row;
            row.experiment = "kinship-entity";
            row.train_size = size;
            row.repeat = tasks[t].repeat;
            row.seed = cfg.pipe.seed;
            row.mode = "error";
            row.accuracy = errors[t];
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace nsrbm::experiments

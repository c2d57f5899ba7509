#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsrbm/compile.hpp"
#include "nsrbm/data_io.hpp"
#include "nsrbm/experiments.hpp"
#include "nsrbm/logic.hpp"
#include "nsrbm/rbm.hpp"
#include "nsrbm/relpipe.hpp"
#include "nsrbm/verify.hpp"

namespace {

using namespace nsrbm;

rbm::Clamp parse_clamp(const std::string& spec, const logic::SymbolTable& symbols) {
    rbm::Clamp clamp = rbm::Clamp::none(symbols.size());
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad clamp item: " + item);
        std::string name = item.substr(0, eq);
        auto id = symbols.find(name);
        if (!id) throw std::runtime_error("unknown symbol in clamp: " + name);
        clamp.set(*id, item.substr(eq + 1) == "1");
    }
    return clamp;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::istringstream is(csv);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(std::stoi(item));
    return out;
}

// The rules file carries symbol names; the model file only indices. Rebuild
// the table from the rules file when both are given, else expect x0,x1,...
logic::SymbolTable table_for_model(const rbm::Rbm& m, const std::string& rules_path) {
    if (!rules_path.empty()) {
        logic::KnowledgeBase kb = logic::parse_rules(data_io::read_file(rules_path));
        if (kb.symbols.size() == m.n_visible) return kb.symbols;
    }
    logic::SymbolTable table;
    for (int i = 0; i < m.n_visible; ++i) table.intern("x" + std::to_string(i));
    return table;
}

int cmd_compile(const std::string& rules_path, const std::string& out_path, double epsilon,
                int free_hidden, std::uint64_t seed) {
    logic::KnowledgeBase kb = logic::parse_rules(data_io::read_file(rules_path));
    compile::CompileConfig cfg{epsilon, free_hidden, seed};
    rbm::Rbm m = compile::compile_kb(kb, cfg);
    rbm::save_model_file(m, out_path);
    std::cout << "compiled " << kb.rules.size() << " rules over " << kb.symbols.size()
              << " symbols into " << m.hidden.size() << " hidden units -> " << out_path << "\n";
    return 0;
}

int cmd_verify(const std::string& rules_path, double epsilon, double tol, int jobs,
               bool unweighted) {
    logic::KnowledgeBase kb = logic::parse_rules(data_io::read_file(rules_path));
    compile::CompileConfig cfg{epsilon, 0, 0};
    rbm::Rbm m = compile::compile_kb(kb, cfg);
    verify::EquivalenceReport report =
        verify::check_equivalence(kb, m, epsilon, tol, jobs, !unweighted);
    std::cout << report.to_text(kb);
    return report.witness.pass ? 0 : 1;
}

int cmd_infer(const std::string& model_path, const std::string& rules_path,
              const std::string& clamp_spec, const std::string& target_spec,
              const std::string& mode, int chains, int steps, std::uint64_t seed) {
    rbm::Rbm m = rbm::load_model_file(model_path);
    logic::SymbolTable table = table_for_model(m, rules_path);
    rbm::Clamp clamp = parse_clamp(clamp_spec, table);

    std::vector<int> targets;
    std::istringstream is(target_spec);
    std::string name;
    while (std::getline(is, name, ',')) {
        auto id = table.find(name);
        if (!id) throw std::runtime_error("unknown target symbol: " + name);
        targets.push_back(*id);
    }
    if (targets.empty()) throw std::runtime_error("no target symbols given");

    if (mode == "conditional") {
        std::vector<double> marg = rbm::conditional_marginals(m, clamp, targets);
        for (std::size_t t = 0; t < targets.size(); ++t)
            std::cout << "P(" << table.name(targets[t]) << "=1) = " << marg[t] << "\n";
    } else {
        std::vector<double> freq = rbm::gibbs_infer(m, clamp, steps, chains, seed);
        for (int t : targets)
            std::cout << "freq(" << table.name(t) << "=1) = " << freq[static_cast<std::size_t>(t)]
                      << "\n";
    }
    return 0;
}

int cmd_fuzz(std::uint64_t seed, int cases, double tol, int jobs) {
    int failures = 0;
    for (int i = 0; i < cases; ++i) {
        rbm::Rng rng = rbm::split_rng(seed, static_cast<std::uint64_t>(i));
        logic::KnowledgeBase kb = verify::random_kb(rng);
        double epsilon = std::vector<double>{0.1, 0.5, 0.9}[static_cast<std::size_t>(
            std::uniform_int_distribution<int>(0, 2)(rng))];
        rbm::Rbm m = compile::compile_kb(kb, compile::CompileConfig{epsilon, 0, 0});
        verify::EquivalenceReport report = verify::check_equivalence(kb, m, epsilon, tol, jobs);
        std::cout << (report.witness.pass ? "PASS" : "FAIL") << " case " << i << " symbols="
                  << kb.symbols.size() << " rules=" << kb.rules.size() << " epsilon=" << epsilon
                  << " max_residual=" << report.witness.max_residual << "\n";
        if (!report.witness.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

int cmd_train(const std::string& model_path, const std::string& data_path,
              const std::string& out_path, const rbm::CdConfig& cd) {
    rbm::Rbm m = rbm::load_model_file(model_path);
    // Data: one line per sample, bits without separators.
    std::vector<rbm::Bits> data;
    std::istringstream is(data_io::read_file(data_path));
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        rbm::Bits v;
        for (char c : line)
            if (c == '0' || c == '1') v.push_back(c == '1');
        data.push_back(std::move(v));
    }
    double before = rbm::reconstruction_cross_entropy(m, data);
    rbm::Rbm trained = rbm::train_cd(m, data, cd);
    double after = rbm::reconstruction_cross_entropy(trained, data);
    rbm::save_model_file(trained, out_path);
    std::cout << "trained on " << data.size() << " samples; reconstruction CE " << before << " -> "
              << after << "\n";
    return 0;
}

int cmd_experiment_dna(const std::string& data_path, const std::string& rules_path,
                       const std::string& out_path, experiments::DnaConfig cfg, bool loo) {
    std::vector<data_io::PromoterRecord> records = data_io::load_promoters(data_path);
    std::cout << "loaded " << records.size() << " promoter records\n";
    logic::KnowledgeBase kb;
    const logic::KnowledgeBase* rules = nullptr;
    if (!rules_path.empty()) {
        kb = logic::parse_rules(data_io::read_file(rules_path));
        rules = &kb;
    }
    std::vector<data_io::ResultRow> rows;
    if (loo) {
        for (const char* mode : {"conditional", "gibbs"}) {
            for (const logic::KnowledgeBase* model_kb :
                 {static_cast<const logic::KnowledgeBase*>(nullptr), rules}) {
                if (model_kb == nullptr && rules == nullptr) continue;
                double acc = experiments::dna_loo_accuracy(records, model_kb, mode, cfg);
                data_io::ResultRow row;
                row.experiment = model_kb ? "dna-rules-loo" : "dna-plain-loo";
                row.train_size = static_cast<int>(records.size()) - 1;
                row.seed = cfg.seed;
                row.mode = mode;
                row.accuracy = acc;
                std::cout << row.experiment << " mode=" << mode << " accuracy=" << acc << "\n";
                rows.push_back(std::move(row));
            }
        }
    } else {
        rows = experiments::dna_learning_curve(records, rules, cfg);
        std::map<std::pair<std::string, int>, std::pair<double, int>> means;
        for (const auto& row : rows) {
            auto& acc = means[{row.experiment + "/" + row.mode, row.train_size}];
            acc.first += row.accuracy;
            acc.second += 1;
        }
        for (const auto& [key, acc] : means)
            std::cout << key.first << " n=" << key.second << " train_size=" << key.second
                      << " mean_accuracy=" << acc.first / acc.second << "\n";
    }
    if (!out_path.empty()) data_io::emit_results(rows, out_path);
    return 0;
}

int cmd_experiment_kinship(const std::string& data_path, const std::string& out_path,
                           experiments::KinshipConfig cfg) {
    data_io::KinshipData data = data_io::load_kinship(data_path);
    std::cout << "loaded " << data.atoms.size() << " triples, " << data.people.size()
              << " people, " << data.relations.size() << " relations\n";
    std::vector<data_io::ResultRow> rows = experiments::kinship_experiment(data, cfg);
    for (const auto& row : rows)
        std::cout << row.experiment << " size=" << row.train_size << " repeat=" << row.repeat
                  << " seed=" << row.seed << " " << (row.mode == "error" ? "error=" : "accuracy=")
                  << row.accuracy << "\n";
    if (!out_path.empty()) data_io::emit_results(rows, out_path);
    return 0;
}

int cmd_query(const std::string& data_path, const std::string& query, std::uint64_t seed,
              const std::string& out_path) {
    data_io::KinshipData data = data_io::load_kinship(data_path);
    auto open = query.find('(');
    auto comma = query.find(',', open);
    auto close = query.find(')', comma == std::string::npos ? 0 : comma);
    if (open == std::string::npos || comma == std::string::npos || close == std::string::npos)
        throw std::runtime_error("query must look like rel(a,b)? or rel(a,?)");
    std::string rel = query.substr(0, open);
    std::string a = query.substr(open + 1, comma - open - 1);
    std::string b = query.substr(comma + 1, close - comma - 1);

    auto find_person = [&](const std::string& name) {
        for (const auto& p : data.people)
            if (p.name == name) return p.id;
        throw std::runtime_error("unknown person: " + name);
    };
    int rel_id = -1;
    for (const auto& r : data.relations)
        if (r.name == rel) rel_id = r.id;

    relpipe::PipeConfig cfg;
    cfg.seed = seed;
    std::ostringstream csv;
    csv << "query,rank,candidate,score\n";
    if (b == "?") {
        if (rel_id < 0) throw std::runtime_error("unknown relation: " + rel);
        relpipe::ExampleSet e = experiments::make_example_set(data);
        relpipe::Answer ans = relpipe::answer_entity(e, rel_id, find_person(a), cfg);
        int rank = 1;
        for (const auto& [id, score] : ans.ranked) {
            csv << query << "," << rank++ << "," << data.people[static_cast<std::size_t>(id)].name
                << "," << score << "\n";
        }
    } else {
        // Relation query: hold the queried pair's atoms out of the example set.
        int a_id = find_person(a);
        int b_id = find_person(b);
        relpipe::ExampleSet e = experiments::make_example_set(data);
        std::erase_if(e.atoms, [&](const fol::GroundAtom& atom) {
            return atom.args[0] == a_id && atom.args[1] == b_id;
        });
        relpipe::Answer ans = relpipe::answer_relation(e, a_id, b_id, cfg);
        int rank = 1;
        for (const auto& [id, score] : ans.ranked)
            csv << query << "," << rank++ << ","
                << data.relations[static_cast<std::size_t>(id)].name << "," << score << "\n";
    }
    std::cout << csv.str();
    if (!out_path.empty()) {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + out_path);
        os << csv.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rule-to-RBM compiler and inference engine"};
    app.require_subcommand(1);

    std::string rules_path, model_path, data_path, out_path, clamp_spec, target_spec, query;
    std::string mode = "conditional";
    double epsilon = 0.5;
    double tol = 1e-9;
    double rule_confidence = 2.0;
    std::uint64_t seed = 0;
    int jobs = 1, cases = 500, chains = 1000, steps = 1, free_hidden = 16;
    bool unweighted = false, loo = false;
    std::string train_sizes = "10,20,30,40,50,60,70,80,90";
    int repeats = 50;
    rbm::CdConfig cd;

    auto* c_compile = app.add_subcommand("compile", "compile a rule file into a model");
    c_compile->add_option("--rules", rules_path)->required();
    c_compile->add_option("--out", out_path)->required();
    c_compile->add_option("--epsilon", epsilon);
    c_compile->add_option("--free-hidden", free_hidden)->default_val(0);
    c_compile->add_option("--seed", seed);

    auto* c_verify = app.add_subcommand("verify", "check the logic/energy equivalence");
    c_verify->add_option("--rules", rules_path)->required();
    c_verify->add_option("--epsilon", epsilon);
    c_verify->add_option("--tol", tol);
    c_verify->add_option("--jobs", jobs);
    c_verify->add_flag("--unweighted", unweighted, "use unweighted satisfiability");

    auto* c_infer = app.add_subcommand("infer", "conditional or Gibbs inference on a model");
    c_infer->add_option("--model", model_path)->required();
    c_infer->add_option("--rules", rules_path, "rule file for symbol names");
    c_infer->add_option("--clamp", clamp_spec, "e.g. x1=1,x2=0")->required();
    c_infer->add_option("--target", target_spec, "comma-separated symbols")->required();
    c_infer->add_option("--mode", mode)->check(CLI::IsMember({"conditional", "gibbs"}));
    c_infer->add_option("--chains", chains);
    c_infer->add_option("--steps", steps);
    c_infer->add_option("--seed", seed);

    auto* c_train = app.add_subcommand("train", "contrastive-divergence training");
    c_train->add_option("--model", model_path)->required();
    c_train->add_option("--data", data_path, "text file of 0/1 rows")->required();
    c_train->add_option("--out", out_path)->required();
    c_train->add_option("--lr", cd.learning_rate);
    c_train->add_option("--epochs", cd.epochs);
    c_train->add_option("--batch", cd.batch_size);
    c_train->add_option("--cd-steps", cd.cd_steps);
    c_train->add_option("--seed", cd.seed);
    c_train->add_flag("!--no-freeze", cd.freeze_rule_units, "also update compiled rule units");

    auto* c_fuzz = app.add_subcommand("fuzz", "random equivalence fuzzing");
    c_fuzz->add_option("--seed", seed);
    c_fuzz->add_option("--cases", cases);
    c_fuzz->add_option("--tol", tol);
    c_fuzz->add_option("--jobs", jobs);

    auto* c_dna = app.add_subcommand("experiment-dna", "DNA promoter experiments");
    c_dna->add_option("--data", data_path)->required();
    c_dna->add_option("--rules", rules_path);
    c_dna->add_option("--out", out_path);
    c_dna->add_option("--epsilon", epsilon);
    c_dna->add_option("--confidence", rule_confidence);
    c_dna->add_option("--train-sizes", train_sizes);
    c_dna->add_option("--repeats", repeats);
    c_dna->add_option("--free-hidden", free_hidden);
    c_dna->add_option("--epochs", cd.epochs);
    c_dna->add_option("--lr", cd.learning_rate);
    c_dna->add_option("--seed", seed);
    c_dna->add_option("--jobs", jobs);
    c_dna->add_flag("--loo", loo, "leave-one-out instead of the learning curve");

    auto* c_kin = app.add_subcommand("experiment-kinship", "Kinship experiments");
    c_kin->add_option("--data", data_path)->required();
    c_kin->add_option("--out", out_path);
    c_kin->add_option("--epsilon", epsilon);
    c_kin->add_option("--mode", mode)->check(CLI::IsMember({"conditional", "gibbs"}));
    c_kin->add_option("--repeats", repeats)->default_val(5);
    c_kin->add_option("--seed", seed);
    c_kin->add_option("--jobs", jobs);

    auto* c_query = app.add_subcommand("query", "answer rel(a,b)? or rel(a,?)");
    c_query->add_option("--data", data_path)->required();
    c_query->add_option("--query", query)->required();
    c_query->add_option("--seed", seed);
    c_query->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(c_compile))
            return cmd_compile(rules_path, out_path, epsilon, free_hidden, seed);
        if (app.got_subcommand(c_verify)) return cmd_verify(rules_path, epsilon, tol, jobs, unweighted);
        if (app.got_subcommand(c_infer))
            return cmd_infer(model_path, rules_path, clamp_spec, target_spec, mode, chains, steps,
                             seed);
        if (app.got_subcommand(c_train)) return cmd_train(model_path, data_path, out_path, cd);
        if (app.got_subcommand(c_fuzz)) return cmd_fuzz(seed, cases, tol, jobs);
        if (app.got_subcommand(c_dna)) {
            experiments::DnaConfig cfg;
            cfg.epsilon = epsilon;
            cfg.rule_confidence = rule_confidence;
            cfg.free_hidden = free_hidden;
            cfg.cd = cd;
            cfg.train_sizes = parse_int_list(train_sizes);
            cfg.repeats = repeats;
            cfg.seed = seed;
            cfg.jobs = jobs;
            return cmd_experiment_dna(data_path, rules_path, out_path, cfg, loo);
        }
        if (app.got_subcommand(c_kin)) {
            experiments::KinshipConfig cfg;
            cfg.pipe.epsilon = epsilon;
            cfg.pipe.mode = mode == "gibbs" ? relpipe::InferMode::Gibbs : relpipe::InferMode::Conditional;
            cfg.pipe.seed = seed;
            cfg.repeats = repeats;
            cfg.jobs = jobs;
            return cmd_experiment_kinship(data_path, out_path, cfg);
        }
        if (app.got_subcommand(c_query)) return cmd_query(data_path, query, seed, out_path);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsrbm/fol.hpp"
#include "nsrbm/rbm.hpp"

namespace nsrbm::data_io {

inline constexpr int kPromoterSequenceLength = 57;
inline constexpr int kPromoterBits = kPromoterSequenceLength * 4 + 1;  // +1 label bit
inline constexpr int kPromoterLabelBit = kPromoterSequenceLength * 4;

struct PromoterRecord {
    bool label = false;
    std::string name;
    std::string sequence;  // 57 chars over {a,c,g,t}
};

struct KinshipTriple {
    std::string relation;
    std::string person1;
    std::string person2;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// UCI promoters format: "+/-,name,sequence" per line; whitespace inside the
/// sequence is tolerated.
std::vector<PromoterRecord> load_promoters(const std::string& path);
std::vector<PromoterRecord> parse_promoters(const std::string& text);

/// 57 position blocks of 4 one-hot nucleotide bits (a,c,g,t) plus the label.
rbm::Bits one_hot_promoter(const PromoterRecord& r);
std::string decode_promoter_bits(const rbm::Bits& bits);

/// Symbol name for the position proposition at sequence index 0..56, e.g.
/// "p17=g". Rule files use the same names, so rule symbols map onto one-hot
/// indices directly.
std::string promoter_symbol(int position, char base);
int promoter_bit(int position, char base);

struct KinshipData {
    std::vector<fol::GroundAtom> atoms;
    std::vector<fol::Entity> people;
    std::vector<fol::Predicate> relations;
};

/// "relation(Person1,Person2)" per line; '#' comments. Entities and
/// relations interned in first-appearance order; duplicate triples rejected.
KinshipData load_kinship(const std::string& path);
KinshipData parse_kinship(const std::string& text);

struct ResultRow {
    std::string experiment;
    int train_size = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::string mode;
    double accuracy = 0.0;
};

std::string results_to_csv(const std::vector<ResultRow>& rows);
void emit_results(const std::vector<ResultRow>& rows, const std::string& path);

/// Key-value experiment configuration ("key = value" lines, '#' comments).
struct ExperimentConfig {
    std::map<std::string, std::string> values;

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig parse(const std::string& text);
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
};

std::string read_file(const std::string& path);

}  // namespace nsrbm::data_io

#include "doctest.h"

#include <string>

#include "nsrbm/data_io.hpp"

using namespace nsrbm;
using data_io::DataError;

#ifndef KINSHIP_DATA
#define KINSHIP_DATA ""
#endif

TEST_CASE("parse_promoters reads labelled sequences") {
    std::string seq_a(57, 'a');
    std::string seq_mixed = "tactagcaatacgcttgcgttcggtggttaagtatgtataatgcgcgggcttgtcgt";
    std::string text = "+,S1," + seq_mixed + "\n" + "-,S2 , " + seq_a + "\n";
    auto recs = data_io::parse_promoters(text);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].label);
    CHECK(recs[0].name == "S1");
    CHECK(recs[0].sequence == seq_mixed);
    CHECK_FALSE(recs[1].label);
    CHECK(recs[1].name == "S2");
}

TEST_CASE("parse_promoters tolerates whitespace and case in sequences") {
    std::string seq;
    for (int i = 0; i < 57; ++i) seq += (i % 2 == 0) ? "A" : "c\t";
    auto recs = data_io::parse_promoters("+,X," + seq + "\n# comment\n\n");
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].sequence.size() == 57);
    CHECK(recs[0].sequence[0] == 'a');
    CHECK(recs[0].sequence[1] == 'c');
}

TEST_CASE("parse_promoters rejects malformed lines with line numbers") {
    std::string good = "+,S1," + std::string(57, 'g') + "\n";
    CHECK_THROWS_WITH_AS(data_io::parse_promoters(good + "no commas"),
                         doctest::Contains("line 2"), DataError);
    CHECK_THROWS_WITH_AS(data_io::parse_promoters("x,S1," + std::string(57, 'a')),
                         doctest::Contains("label"), DataError);
    CHECK_THROWS_WITH_AS(data_io::parse_promoters("+,S1," + std::string(57, 'z')),
                         doctest::Contains("invalid base"), DataError);
    CHECK_THROWS_WITH_AS(data_io::parse_promoters("+,S1," + std::string(56, 'a')),
                         doctest::Contains("length"), DataError);
}

TEST_CASE("one-hot promoter encoding round-trips") {
    data_io::PromoterRecord r;
    r.label = true;
    r.name = "rt";
    for (int i = 0; i < 57; ++i) r.sequence.push_back("acgt"[i % 4]);
    rbm::Bits bits = data_io::one_hot_promoter(r);
    REQUIRE(bits.size() == static_cast<std::size_t>(data_io::kPromoterBits));
    CHECK(bits[data_io::kPromoterLabelBit] == 1);
    // exactly one bit per position block
    for (int i = 0; i < 57; ++i) {
        int on = bits[i * 4] + bits[i * 4 + 1] + bits[i * 4 + 2] + bits[i * 4 + 3];
        CHECK(on == 1);
    }
    CHECK(data_io::decode_promoter_bits(bits) == r.sequence);
}

TEST_CASE("promoter symbol names line up with one-hot bit indices") {
    CHECK(data_io::promoter_symbol(17, 'g') == "p17=g");
    CHECK(data_io::promoter_bit(0, 'a') == 0);
    CHECK(data_io::promoter_bit(17, 'g') == 17 * 4 + 2);
    CHECK(data_io::promoter_bit(56, 't') == 56 * 4 + 3);
    CHECK_THROWS_AS(data_io::promoter_bit(57, 'a'), DataError);
    CHECK_THROWS_AS(data_io::promoter_bit(0, 'x'), DataError);
}

TEST_CASE("parse_kinship interns people and relations in first-appearance order") {
    auto data = data_io::parse_kinship(
        "father(Arthur,Bea)\n"
        "mother(Bea, Carl)  # trailing comment\n"
        "father(Arthur,Carl)\n");
    REQUIRE(data.atoms.size() == 3);
    REQUIRE(data.people.size() == 3);
    CHECK(data.people[0].name == "Arthur");
    CHECK(data.people[1].name == "Bea");
    CHECK(data.people[2].name == "Carl");
    REQUIRE(data.relations.size() == 2);
    CHECK(data.relations[0].name == "father");
    CHECK(data.relations[1].name == "mother");
    CHECK(data.relations[0].arity == 2);
    CHECK(data.atoms[2].predicate == 0);
    CHECK(data.atoms[2].args[0] == 0);
    CHECK(data.atoms[2].args[1] == 2);
}

TEST_CASE("parse_kinship rejects malformed and duplicate triples") {
    CHECK_THROWS_WITH_AS(data_io::parse_kinship("father Arthur Bea"),
                         doctest::Contains("line 1"), DataError);
    CHECK_THROWS_WITH_AS(data_io::parse_kinship("(A,B)"), doctest::Contains("empty name"),
                         DataError);
    CHECK_THROWS_WITH_AS(data_io::parse_kinship("f(A,B)\nf(A,B)\n"),
                         doctest::Contains("duplicate"), DataError);
}

TEST_CASE("generated kinship dataset has the expected shape") {
    std::string path = KINSHIP_DATA;
    if (path.empty()) return;
    auto data = data_io::load_kinship(path);
    CHECK(data.atoms.size() == 104);
    CHECK(data.people.size() == 24);
    CHECK(data.relations.size() == 12);
    // every relation is used and symmetric pairs exist (husband/wife etc.)
    for (const auto& atom : data.atoms) {
        CHECK(atom.args[0] != atom.args[1]);
    }
}

TEST_CASE("results_to_csv emits a deterministic header and rows") {
    std::vector<data_io::ResultRow> rows{
        {"kinship-loo", 0, 0, 7, "rules", 0.95},
        {"dna", 30, 2, 42, "plain", 0.5},
    };
    std::string csv = data_io::results_to_csv(rows);
    CHECK(csv ==
          "experiment,train_size,repeat,seed,mode,accuracy\n"
          "kinship-loo,0,0,7,rules,0.95\n"
          "dna,30,2,42,plain,0.5\n");
    CHECK(csv == data_io::results_to_csv(rows));
}

TEST_CASE("experiment config parses key-value lines") {
    auto cfg = data_io::ExperimentConfig::parse(
        "# settings\n"
        "epsilon = 0.5\n"
        "seeds=3\n"
        "name = base run # inline\n");
    CHECK(cfg.get("name", "") == "base run");
    CHECK(cfg.get_double("epsilon", 0.0) == doctest::Approx(0.5));
    CHECK(cfg.get_int("seeds", 0) == 3);
    CHECK(cfg.get_int("missing", 9) == 9);
    CHECK_THROWS_AS(data_io::ExperimentConfig::parse("no equals sign"), DataError);
}

TEST_CASE("read_file reports missing paths") {
    CHECK_THROWS_WITH_AS(data_io::read_file("/nonexistent/nope.txt"),
                         doctest::Contains("cannot open"), DataError);
}

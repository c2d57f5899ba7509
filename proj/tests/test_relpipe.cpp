#include "doctest.h"

#include <cmath>

#include "nsrbm/relpipe.hpp"

using namespace nsrbm;

namespace {

// Three people, two relations, four example atoms.
relpipe::ExampleSet tiny_set() {
    relpipe::ExampleSet e;
    e.people = {{0, "a"}, {1, "b"}, {2, "c"}};
    e.relations = {{0, "p", 2}, {1, "q", 2}};
    e.scheme = fol::build_kinship_scheme(e.people, e.relations);
    e.atoms = {{0, {0, 1}}, {0, {1, 2}}, {1, {1, 0}}, {1, {2, 1}}};
    return e;
}

relpipe::PipeConfig fast_cfg() {
    relpipe::PipeConfig cfg;
    cfg.ae.epochs = 50;
    cfg.ae.hidden_size = 6;
    return cfg;
}

}  // namespace

TEST_CASE("encode_examples emits one hidden unit per example atom") {
    auto e = tiny_set();
    relpipe::PipeConfig cfg;
    rbm::Rbm m = relpipe::encode_examples(e, cfg);
    CHECK(m.n_visible == e.scheme.n_symbols());
    REQUIRE(m.hidden.size() == e.atoms.size());
    for (std::size_t j = 0; j < m.hidden.size(); ++j) {
        CHECK(m.hidden[j].label == "e" + std::to_string(j));
        CHECK(m.hidden[j].kind == rbm::HiddenUnit::Kind::Standard);
        REQUIRE(m.hidden[j].members.size() == 1);
        // three positive literals: slot1 person, slot2 person, relation
        int nonzero = 0;
        for (double w : m.hidden[j].members[0].weights)
            if (w != 0.0) {
                CHECK(w == doctest::Approx(cfg.rule_confidence));
                ++nonzero;
            }
        CHECK(nonzero == 3);
    }
    // the atom's own symbols carry the weight
    const auto& w0 = m.hidden[0].members[0].weights;
    CHECK(w0[static_cast<std::size_t>(e.scheme.slot_symbol(0, 0))] > 0);
    CHECK(w0[static_cast<std::size_t>(e.scheme.slot_symbol(1, 1))] > 0);
    CHECK(w0[static_cast<std::size_t>(e.scheme.predicate_symbol(0))] > 0);
    CHECK_THROWS_AS(relpipe::encode_examples({{}, e.scheme, e.people, e.relations}, cfg),
                    std::invalid_argument);
}

TEST_CASE("infer_features yields pair evidence plus two-role profiles") {
    auto e = tiny_set();
    relpipe::PipeConfig cfg;
    auto m = relpipe::encode_examples(e, cfg);
    auto f = relpipe::infer_features(m, e, 0, 1, cfg);
    std::size_t n_rel = e.relations.size();
    CHECK(f.direct.size() == n_rel);
    CHECK(f.reverse.size() == n_rel);
    CHECK(f.left.size() == 2 * n_rel);
    CHECK(f.right.size() == 2 * n_rel);
    CHECK(f.flat().size() == 6 * n_rel);
    for (double v : f.flat()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // p(a,b) is an example, q(a,b) is not: direct block should prefer p
    CHECK(f.direct[0] > f.direct[1]);
    // the reverse block of (a,b) matches the direct block of (b,a)
    auto g = relpipe::infer_features(m, e, 1, 0, cfg);
    for (std::size_t r = 0; r < n_rel; ++r)
        CHECK(f.reverse[r] == doctest::Approx(g.direct[r]).epsilon(1e-9));
    CHECK_THROWS_AS(relpipe::infer_features(m, e, -1, 0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(relpipe::infer_features(m, e, 0, 3, cfg), std::invalid_argument);
}

TEST_CASE("pipeline rescales each feature dimension to the unit interval") {
    auto e = tiny_set();
    auto cfg = fast_cfg();
    relpipe::Pipeline pipe = relpipe::build_pipeline(e, cfg);
    REQUIRE(pipe.feat_lo.size() == 6 * e.relations.size());
    REQUIRE(pipe.feat_span.size() == pipe.feat_lo.size());
    for (double s : pipe.feat_span) CHECK(s > 0.0);
    // scaling maps the recorded extremes to 0 and 1 and clamps beyond them
    std::vector<double> probe = pipe.feat_lo;
    auto scaled_lo = pipe.scale(probe);
    for (double v : scaled_lo) CHECK(v == doctest::Approx(0.0));
    for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = pipe.feat_lo[i] + 2 * pipe.feat_span[i];
    for (double v : pipe.scale(probe)) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("answer_relation ranks every relation with descending scores") {
    auto e = tiny_set();
    auto cfg = fast_cfg();
    // query a pair not in the example set
    relpipe::Answer ans = relpipe::answer_relation(e, 2, 0, cfg);
    REQUIRE(ans.ranked.size() == e.relations.size());
    for (std::size_t i = 1; i < ans.ranked.size(); ++i)
        CHECK(ans.ranked[i - 1].second >= ans.ranked[i].second);
    for (auto& [id, score] : ans.ranked) {
        CHECK(id >= 0);
        CHECK(id < static_cast<int>(e.relations.size()));
        CHECK(std::isfinite(score));
    }
}

TEST_CASE("answer_entity ranks all people and validates the relation") {
    auto e = tiny_set();
    auto cfg = fast_cfg();
    auto pipe = relpipe::build_pipeline(e, cfg);
    relpipe::Answer ans = relpipe::answer_entity(pipe, e, 0, 0, cfg);
    REQUIRE(ans.ranked.size() == e.people.size());
    for (std::size_t i = 1; i < ans.ranked.size(); ++i)
        CHECK(ans.ranked[i - 1].second >= ans.ranked[i].second);
    CHECK_THROWS_AS(relpipe::answer_entity(pipe, e, 5, 0, cfg), std::invalid_argument);
}

TEST_CASE("pipeline answers are deterministic for a fixed seed") {
    auto e = tiny_set();
    auto cfg = fast_cfg();
    cfg.seed = 1234;
    auto a1 = relpipe::answer_relation(e, 2, 0, cfg);
    auto a2 = relpipe::answer_relation(e, 2, 0, cfg);
    REQUIRE(a1.ranked.size() == a2.ranked.size());
    for (std::size_t i = 0; i < a1.ranked.size(); ++i) {
        CHECK(a1.ranked[i].first == a2.ranked[i].first);
        CHECK(a1.ranked[i].second == a2.ranked[i].second);
    }
}

TEST_CASE("gibbs feature mode stays close to conditional inference") {
    auto e = tiny_set();
    relpipe::PipeConfig cond;
    relpipe::PipeConfig gibbs;
    gibbs.mode = relpipe::InferMode::Gibbs;
    gibbs.gibbs_chains = 4000;
    gibbs.gibbs_steps = 4;
    auto m = relpipe::encode_examples(e, cond);
    auto fc = relpipe::infer_features(m, e, 0, 1, cond).flat();
    auto fg = relpipe::infer_features(m, e, 0, 1, gibbs).flat();
    REQUIRE(fc.size() == fg.size());
    for (std::size_t i = 0; i < fc.size(); ++i)
        CHECK(fg[i] == doctest::Approx(fc[i]).epsilon(0.15));
}

TEST_CASE("build_pipeline needs at least two examples") {
    auto e = tiny_set();
    e.atoms.resize(1);
    CHECK_THROWS_AS(relpipe::build_pipeline(e, fast_cfg()), std::invalid_argument);
}

TEST_CASE("build_pipeline can train on a subset while encoding everything") {
    auto e = tiny_set();
    auto cfg = fast_cfg();
    std::vector<fol::GroundAtom> subset(e.atoms.begin(), e.atoms.begin() + 2);
    auto pipe = relpipe::build_pipeline(e, subset, cfg);
    // the model still holds one unit per atom of the full set
    CHECK(pipe.model.hidden.size() == e.atoms.size());
    relpipe::Answer ans = relpipe::answer_entity(pipe, e, 0, 0, cfg);
    CHECK(ans.ranked.size() == e.people.size());
    CHECK_THROWS_AS(relpipe::build_pipeline(e, {e.atoms.front()}, cfg), std::invalid_argument);
}

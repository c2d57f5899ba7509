#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace nsrbm::rbm {

using Bits = std::vector<std::uint8_t>;
using Rng = std::mt19937_64;

/// Derives an independent RNG for a numbered stream (chain, fold, repeat)
/// from one master seed. splitmix64 over (seed, stream).
Rng split_rng(std::uint64_t seed, std::uint64_t stream);

struct PoolMember {
    std::vector<double> weights;
    double bias = 0.0;

    double potential(std::span<const std::uint8_t> x) const;
};

/// One hidden unit. Standard units have exactly one member; Pooling units
/// take the max over their members' affine potentials.
struct HiddenUnit {
    enum class Kind { Standard, Pooling };

    Kind kind = Kind::Standard;
    std::string label;
    std::vector<PoolMember> members;
    bool frozen = false;  // compiled rule units are excluded from CD updates

    double potential(std::span<const std::uint8_t> x) const;
    int argmax_member(std::span<const std::uint8_t> x) const;  // ties -> lowest index
};

struct Rbm {
    int n_visible = 0;
    std::vector<double> visible_bias;
    std::vector<HiddenUnit> hidden;
};

struct State {
    Bits visible;
    Bits hidden;
};

struct Clamp {
    Bits mask;    // 1 = clamped
    Bits values;  // meaningful where mask is 1

    static Clamp none(int n_visible) { return {Bits(n_visible, 0), Bits(n_visible, 0)}; }
    void set(int i, bool v) {
        mask[static_cast<std::size_t>(i)] = 1;
        values[static_cast<std::size_t>(i)] = v ? 1 : 0;
    }
};

struct CdConfig {
    double learning_rate = 0.05;
    int cd_steps = 1;
    int epochs = 100;
    int batch_size = 10;
    bool freeze_rule_units = true;
    std::uint64_t seed = 0;
};

double energy(const Rbm& m, const State& s);

/// E_rank(x) = min over hidden configurations of E(x,h);
/// closed form -sum_j max(0, potential_j(x)) - visible_bias . x.
double rank_energy(const Rbm& m, std::span<const std::uint8_t> x);

/// The h realizing rank_energy: h_j = 1 iff potential_j(x) > 0.
Bits minimizing_hidden(const Rbm& m, std::span<const std::uint8_t> x);

struct HiddenSample {
    Bits h;
    std::vector<int> member;  // up-pass argmax member per unit (0 for Standard)
};

HiddenSample sample_hidden(const Rbm& m, std::span<const std::uint8_t> x, Rng& rng);

/// Down pass. Active pooling units reconstruct through the weights of the
/// member that won the up-pass max (maxout-style).
Bits sample_visible(const Rbm& m, const Bits& h, const std::vector<int>& member, const Clamp& clamp,
                    Rng& rng);

/// Exact conditional over the 2^|targets| configurations of `targets`, all
/// hidden units marginalized. Visibles that are neither clamped nor targets
/// are held at 0. Index encoding: bit i of the config index is targets[i].
std::vector<double> conditional_label(const Rbm& m, const Clamp& clamp,
                                      const std::vector<int>& targets);

/// Per-target marginals P(v_t = 1 | clamp) of conditional_label.
std::vector<double> conditional_marginals(const Rbm& m, const Clamp& clamp,
                                          const std::vector<int>& targets);

/// Mean activation of every visible across `chains` independent chains after
/// `steps` full Gibbs sweeps with clamping. jobs > 1 runs chains in parallel;
/// results are identical to the serial path for any jobs value.
std::vector<double> gibbs_infer(const Rbm& m, const Clamp& clamp, int steps, int chains,
                                std::uint64_t seed, int jobs = 1);

Rbm train_cd(const Rbm& m, const std::vector<Bits>& data, const CdConfig& cfg);

/// Mean reconstruction cross-entropy of one mean-field up/down pass.
double reconstruction_cross_entropy(const Rbm& m, const std::vector<Bits>& data);

void save_model(const Rbm& m, std::ostream& os);
Rbm load_model(std::istream& is);
void save_model_file(const Rbm& m, const std::string& path);
Rbm load_model_file(const std::string& path);

}  // namespace nsrbm::rbm

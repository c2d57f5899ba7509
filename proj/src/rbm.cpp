#include "nsrbm/rbm.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nsrbm::rbm {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool bernoulli(double p, Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

void write_double(std::ostream& os, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, ptr - buf);
}

}  // namespace

Rng split_rng(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(seed ^ splitmix64(stream)));
}

double PoolMember::potential(std::span<const std::uint8_t> x) const {
    double p = bias;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (x[i]) p += weights[i];
    return p;
}

double HiddenUnit::potential(std::span<const std::uint8_t> x) const {
    double best = members.front().potential(x);
    for (std::size_t i = 1; i < members.size(); ++i)
        best = std::max(best, members[i].potential(x));
    return best;
}

int HiddenUnit::argmax_member(std::span<const std::uint8_t> x) const {
    int best = 0;
    double best_p = members.front().potential(x);
    for (std::size_t i = 1; i < members.size(); ++i) {
        double p = members[i].potential(x);
        if (p > best_p) {
            best_p = p;
            best = static_cast<int>(i);
        }
    }
    return best;
}

double energy(const Rbm& m, const State& s) {
    double e = 0.0;
    for (std::size_t j = 0; j < m.hidden.size(); ++j)
        if (s.hidden[j]) e -= m.hidden[j].potential(s.visible);
    for (int i = 0; i < m.n_visible; ++i)
        if (s.visible[static_cast<std::size_t>(i)]) e -= m.visible_bias[static_cast<std::size_t>(i)];
    return e;
}

double rank_energy(const Rbm& m, std::span<const std::uint8_t> x) {
    double e = 0.0;
    for (const HiddenUnit& u : m.hidden) e -= std::max(0.0, u.potential(x));
    for (int i = 0; i < m.n_visible; ++i)
        if (x[static_cast<std::size_t>(i)]) e -= m.visible_bias[static_cast<std::size_t>(i)];
    return e;
}

Bits minimizing_hidden(const Rbm& m, std::span<const std::uint8_t> x) {
    Bits h(m.hidden.size());
    for (std::size_t j = 0; j < m.hidden.size(); ++j) h[j] = m.hidden[j].potential(x) > 0.0 ? 1 : 0;
    return h;
}

HiddenSample sample_hidden(const Rbm& m, std::span<const std::uint8_t> x, Rng& rng) {
    HiddenSample s;
    s.h.resize(m.hidden.size());
    s.member.resize(m.hidden.size(), 0);
    for (std::size_t j = 0; j < m.hidden.size(); ++j) {
        const HiddenUnit& u = m.hidden[j];
        int am = u.kind == HiddenUnit::Kind::Pooling ? u.argmax_member(x) : 0;
        s.member[j] = am;
        s.h[j] = bernoulli(logistic(u.members[static_cast<std::size_t>(am)].potential(x)), rng) ? 1 : 0;
    }
    return s;
}

Bits sample_visible(const Rbm& m, const Bits& h, const std::vector<int>& member, const Clamp& clamp,
                    Rng& rng) {
    if (clamp.mask.size() != static_cast<std::size_t>(m.n_visible) ||
        clamp.values.size() != static_cast<std::size_t>(m.n_visible))
        throw std::invalid_argument("clamp size mismatch");
    std::vector<double> field(m.visible_bias.begin(), m.visible_bias.end());
    for (std::size_t j = 0; j < m.hidden.size(); ++j) {
        if (!h[j]) continue;
        const auto& w = m.hidden[j].members[static_cast<std::size_t>(member[j])].weights;
        for (int i = 0; i < m.n_visible; ++i) field[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(i)];
    }
    Bits v(static_cast<std::size_t>(m.n_visible));
    for (int i = 0; i < m.n_visible; ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        v[k] = clamp.mask[k] ? clamp.values[k] : (bernoulli(logistic(field[k]), rng) ? 1 : 0);
    }
    return v;
}

std::vector<double> conditional_label(const Rbm& m, const Clamp& clamp,
                                      const std::vector<int>& targets) {
    const std::size_t k = targets.size();
    if (k > 24) throw std::invalid_argument("too many target units to enumerate");
    for (int t : targets)
        if (clamp.mask.at(static_cast<std::size_t>(t)))
            throw std::invalid_argument("target unit is clamped");

    // Base point: clamped values, everything else (targets included) at 0.
    Bits x(static_cast<std::size_t>(m.n_visible), 0);
    for (int i = 0; i < m.n_visible; ++i)
        if (clamp.mask[static_cast<std::size_t>(i)]) x[static_cast<std::size_t>(i)] = clamp.values[static_cast<std::size_t>(i)];

    // Per-member running potentials and a running softplus total, updated
    // incrementally along a Gray-code walk over target configurations. Only
    // units actually wired to the flipped visible are touched, which is what
    // keeps inference over sparse rule models fast.
    std::vector<std::vector<double>> dots(m.hidden.size());
    std::vector<double> sp(m.hidden.size());
    double total_sp = 0.0;
    for (std::size_t j = 0; j < m.hidden.size(); ++j) {
        dots[j].resize(m.hidden[j].members.size());
        for (std::size_t mi = 0; mi < dots[j].size(); ++mi)
            dots[j][mi] = m.hidden[j].members[mi].potential(x);
        sp[j] = softplus(*std::max_element(dots[j].begin(), dots[j].end()));
        total_sp += sp[j];
    }
    double bias_term = 0.0;
    for (int i = 0; i < m.n_visible; ++i)
        if (x[static_cast<std::size_t>(i)]) bias_term += m.visible_bias[static_cast<std::size_t>(i)];

    // Units and members with a nonzero weight on each target bit.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> touched_members(k);
    std::vector<std::vector<std::uint32_t>> touched_units(k);
    for (std::size_t b = 0; b < k; ++b) {
        std::size_t vis = static_cast<std::size_t>(targets[b]);
        for (std::size_t j = 0; j < m.hidden.size(); ++j) {
            bool any = false;
            for (std::size_t mi = 0; mi < dots[j].size(); ++mi)
                if (m.hidden[j].members[mi].weights[vis] != 0.0) {
                    touched_members[b].emplace_back(j, mi);
                    any = true;
                }
            if (any) touched_units[b].push_back(static_cast<std::uint32_t>(j));
        }
    }

    const std::size_t n_cfg = std::size_t{1} << k;
    std::vector<double> logw(n_cfg);
    std::uint64_t gray = 0;
    logw[0] = bias_term + total_sp;
    for (std::size_t step = 1; step < n_cfg; ++step) {
        std::size_t bit = static_cast<std::size_t>(std::countr_zero(step));
        std::uint64_t next = step ^ (step >> 1);
        bool now_set = (next >> bit) & 1;
        double sign = now_set ? 1.0 : -1.0;
        std::size_t vis = static_cast<std::size_t>(targets[bit]);
        for (auto [j, mi] : touched_members[bit])
            dots[j][mi] += sign * m.hidden[j].members[mi].weights[vis];
        for (std::uint32_t j : touched_units[bit]) {
            double fresh = softplus(*std::max_element(dots[j].begin(), dots[j].end()));
            total_sp += fresh - sp[j];
            sp[j] = fresh;
        }
        bias_term += sign * m.visible_bias[vis];
        gray = next;
        logw[gray] = bias_term + total_sp;
    }

    double mx = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (double lw : logw) z += std::exp(lw - mx);
    std::vector<double> p(n_cfg);
    for (std::size_t c = 0; c < n_cfg; ++c) p[c] = std::exp(logw[c] - mx) / z;
    return p;
}

std::vector<double> conditional_marginals(const Rbm& m, const Clamp& clamp,
                                          const std::vector<int>& targets) {
    std::vector<double> p = conditional_label(m, clamp, targets);
    std::vector<double> marg(targets.size(), 0.0);
    for (std::size_t c = 0; c < p.size(); ++c)
        for (std::size_t b = 0; b < targets.size(); ++b)
            if ((c >> b) & 1) marg[b] += p[c];
    return marg;
}

std::vector<double> gibbs_infer(const Rbm& m, const Clamp& clamp, int steps, int chains,
                                std::uint64_t seed, int jobs) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    std::vector<std::int64_t> counts(static_cast<std::size_t>(m.n_visible), 0);

    auto run_chain = [&](int chain, std::vector<std::int64_t>& acc) {
        Rng rng = split_rng(seed, static_cast<std::uint64_t>(chain));
        Bits x(static_cast<std::size_t>(m.n_visible), 0);
        for (int i = 0; i < m.n_visible; ++i)
            if (clamp.mask[static_cast<std::size_t>(i)]) x[static_cast<std::size_t>(i)] = clamp.values[static_cast<std::size_t>(i)];
        for (int s = 0; s < steps; ++s) {
            HiddenSample hs = sample_hidden(m, x, rng);
            x = sample_visible(m, hs.h, hs.member, clamp, rng);
        }
        for (int i = 0; i < m.n_visible; ++i) acc[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
    };

    if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel num_threads(jobs)
        {
            std::vector<std::int64_t> local(static_cast<std::size_t>(m.n_visible), 0);
#pragma omp for schedule(static)
            for (int c = 0; c < chains; ++c) run_chain(c, local);
#pragma omp critical
            for (int i = 0; i < m.n_visible; ++i) counts[static_cast<std::size_t>(i)] += local[static_cast<std::size_t>(i)];
        }
#else
        for (int c = 0; c < chains; ++c) run_chain(c, counts);
#endif
    } else {
        for (int c = 0; c < chains; ++c) run_chain(c, counts);
    }

    std::vector<double> freq(static_cast<std::size_t>(m.n_visible));
    for (int i = 0; i < m.n_visible; ++i)
        freq[static_cast<std::size_t>(i)] = static_cast<double>(counts[static_cast<std::size_t>(i)]) / chains;
    return freq;
}

Rbm train_cd(const Rbm& model, const std::vector<Bits>& data, const CdConfig& cfg) {
    if (data.empty()) throw std::invalid_argument("empty training data");
    for (const Bits& v : data)
        if (v.size() != static_cast<std::size_t>(model.n_visible))
            throw std::invalid_argument("training vector length mismatch");
    if (cfg.learning_rate <= 0.0) {
        if (cfg.learning_rate == 0.0) return model;
        throw std::invalid_argument("learning rate must be positive");
    }

    Rbm m = model;
    Rng rng = split_rng(cfg.seed, 0x7261696eULL);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Clamp no_clamp = Clamp::none(m.n_visible);

    auto trainable = [&](const HiddenUnit& u) {
        if (u.kind == HiddenUnit::Kind::Pooling) return false;  // no max subgradient
        return !(cfg.freeze_rule_units && u.frozen);
    };

    const std::size_t n_vis = static_cast<std::size_t>(m.n_visible);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));

            std::vector<std::vector<double>> grad_w(m.hidden.size());
            std::vector<double> grad_b(m.hidden.size(), 0.0);
            std::vector<double> grad_vb(n_vis, 0.0);
            for (std::size_t j = 0; j < m.hidden.size(); ++j)
                if (trainable(m.hidden[j])) grad_w[j].assign(n_vis, 0.0);

            for (std::size_t idx = start; idx < end; ++idx) {
                const Bits& v_pos = data[order[idx]];
                Bits v_neg = v_pos;
                for (int k = 0; k < cfg.cd_steps; ++k) {
                    HiddenSample hs = sample_hidden(m, v_neg, rng);
                    v_neg = sample_visible(m, hs.h, hs.member, no_clamp, rng);
                }
                for (std::size_t j = 0; j < m.hidden.size(); ++j) {
                    if (grad_w[j].empty()) continue;
                    const PoolMember& pm = m.hidden[j].members[0];
                    double p_pos = logistic(pm.potential(v_pos));
                    double p_neg = logistic(pm.potential(v_neg));
                    for (std::size_t i = 0; i < n_vis; ++i)
                        grad_w[j][i] += p_pos * v_pos[i] - p_neg * v_neg[i];
                    grad_b[j] += p_pos - p_neg;
                }
                for (std::size_t i = 0; i < n_vis; ++i) grad_vb[i] += static_cast<double>(v_pos[i]) - v_neg[i];
            }

            double scale = cfg.learning_rate / static_cast<double>(end - start);
            for (std::size_t j = 0; j < m.hidden.size(); ++j) {
                if (grad_w[j].empty()) continue;
                PoolMember& pm = m.hidden[j].members[0];
                for (std::size_t i = 0; i < n_vis; ++i) pm.weights[i] += scale * grad_w[j][i];
                pm.bias += scale * grad_b[j];
            }
            for (std::size_t i = 0; i < n_vis; ++i) m.visible_bias[i] += scale * grad_vb[i];
        }
    }
    return m;
}

double reconstruction_cross_entropy(const Rbm& m, const std::vector<Bits>& data) {
    if (data.empty()) throw std::invalid_argument("empty data");
    const std::size_t n_vis = static_cast<std::size_t>(m.n_visible);
    double total = 0.0;
    for (const Bits& v : data) {
        std::vector<double> field(m.visible_bias.begin(), m.visible_bias.end());
        for (const HiddenUnit& u : m.hidden) {
            int am = u.kind == HiddenUnit::Kind::Pooling ? u.argmax_member(v) : 0;
            const PoolMember& pm = u.members[static_cast<std::size_t>(am)];
            double p_h = logistic(pm.potential(v));
            for (std::size_t i = 0; i < n_vis; ++i) field[i] += p_h * pm.weights[i];
        }
        for (std::size_t i = 0; i < n_vis; ++i) {
            double p = std::clamp(logistic(field[i]), 1e-12, 1.0 - 1e-12);
            total -= v[i] ? std::log(p) : std::log1p(-p);
        }
    }
    return total / static_cast<double>(data.size());
}

void save_model(const Rbm& m, std::ostream& os) {
    os << "NSRBM 1\n";
    os << "visible " << m.n_visible << "\n";
    os << "bias";
    for (double b : m.visible_bias) {
        os << ' ';
        write_double(os, b);
    }
    os << "\nhidden " << m.hidden.size() << "\n";
    for (const HiddenUnit& u : m.hidden) {
        os << "unit " << (u.kind == HiddenUnit::Kind::Pooling ? "pooling" : "standard") << ' '
           << (u.frozen ? 1 : 0) << ' ' << u.members.size() << ' ' << u.label << "\n";
        for (const PoolMember& pm : u.members) {
            os << "w";
            for (double w : pm.weights) {
                os << ' ';
                write_double(os, w);
            }
            os << "\nb ";
            write_double(os, pm.bias);
            os << "\n";
        }
    }
}

Rbm load_model(std::istream& is) {
    auto expect = [&](const std::string& want) {
        std::string tok;
        if (!(is >> tok) || tok != want)
            throw std::runtime_error("bad model file: expected '" + want + "', got '" + tok + "'");
    };
    expect("NSRBM");
    int version = 0;
    is >> version;
    if (version != 1) throw std::runtime_error("unsupported model version");

    Rbm m;
    expect("visible");
    is >> m.n_visible;
    expect("bias");
    m.visible_bias.resize(static_cast<std::size_t>(m.n_visible));
    for (double& b : m.visible_bias) is >> b;
    expect("hidden");
    std::size_t n_hidden = 0;
    is >> n_hidden;
    m.hidden.resize(n_hidden);
    for (HiddenUnit& u : m.hidden) {
        expect("unit");
        std::string kind;
        int frozen = 0;
        std::size_t n_members = 0;
        is >> kind >> frozen >> n_members;
        std::getline(is, u.label);
        if (!u.label.empty() && u.label.front() == ' ') u.label.erase(0, 1);
        u.kind = kind == "pooling" ? HiddenUnit::Kind::Pooling : HiddenUnit::Kind::Standard;
        u.frozen = frozen != 0;
        u.members.resize(n_members);
        for (PoolMember& pm : u.members) {
            expect("w");
            pm.weights.resize(static_cast<std::size_t>(m.n_visible));
            for (double& w : pm.weights) is >> w;
            expect("b");
            is >> pm.bias;
        }
    }
    if (!is) throw std::runtime_error("truncated model file");
    return m;
}

void save_model_file(const Rbm& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write model file: " + path);
    save_model(m, os);
}

Rbm load_model_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read model file: " + path);
    return load_model(is);
}

}  // namespace nsrbm::rbm

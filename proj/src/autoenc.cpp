#include "nsrbm/autoenc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace nsrbm::autoenc {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void check_data(const std::vector<std::vector<double>>& data, int d_in) {
    if (data.empty()) throw std::invalid_argument("empty dataset");
    for (const auto& row : data)
        if (row.size() != static_cast<std::size_t>(d_in))
            throw std::invalid_argument("feature dimension mismatch");
}

}  // namespace

std::vector<double> AutoEncoder::encode(const std::vector<double>& x) const {
    if (x.size() != static_cast<std::size_t>(d_in)) throw std::invalid_argument("dimension mismatch");
    std::vector<double> h(static_cast<std::size_t>(d_hidden));
    for (int j = 0; j < d_hidden; ++j) {
        double z = enc_b[static_cast<std::size_t>(j)];
        const double* row = enc_w.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(d_in);
        for (int i = 0; i < d_in; ++i) z += row[i] * x[static_cast<std::size_t>(i)];
        h[static_cast<std::size_t>(j)] = logistic(z);
    }
    return h;
}

std::vector<double> AutoEncoder::reconstruct(const std::vector<double>& x) const {
    std::vector<double> h = encode(x);
    std::vector<double> y(static_cast<std::size_t>(d_in));
    for (int i = 0; i < d_in; ++i) {
        double z = dec_b[static_cast<std::size_t>(i)];
        const double* row = dec_w.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(d_hidden);
        for (int j = 0; j < d_hidden; ++j) z += row[j] * h[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = logistic(z);
    }
    return y;
}

AutoEncoder init_autoencoder(int d_in, const TrainConfig& cfg) {
    if (d_in <= 0 || cfg.hidden_size <= 0) throw std::invalid_argument("bad dimensions");
    AutoEncoder ae;
    ae.d_in = d_in;
    ae.d_hidden = cfg.hidden_size;
    std::mt19937_64 rng(mix(cfg.seed ^ 0x61656e63ULL));
    std::normal_distribution<double> init(0.0, 0.1);
    ae.enc_w.resize(static_cast<std::size_t>(d_in) * static_cast<std::size_t>(cfg.hidden_size));
    ae.dec_w.resize(ae.enc_w.size());
    for (double& w : ae.enc_w) w = init(rng);
    if (cfg.tie_weights) {
        for (int j = 0; j < ae.d_hidden; ++j)
            for (int i = 0; i < ae.d_in; ++i)
                ae.dec_w[static_cast<std::size_t>(i) * ae.d_hidden + j] =
                    ae.enc_w[static_cast<std::size_t>(j) * ae.d_in + i];
    } else {
        for (double& w : ae.dec_w) w = init(rng);
    }
    ae.enc_b.assign(static_cast<std::size_t>(cfg.hidden_size), 0.0);
    ae.dec_b.assign(static_cast<std::size_t>(d_in), 0.0);
    return ae;
}

Gradients loss_and_gradients(const AutoEncoder& ae, const std::vector<std::vector<double>>& inputs,
                             const std::vector<std::vector<double>>& targets) {
    check_data(inputs, ae.d_in);
    check_data(targets, ae.d_in);
    if (inputs.size() != targets.size()) throw std::invalid_argument("inputs/targets size mismatch");
    const std::size_t n_in = static_cast<std::size_t>(ae.d_in);
    const std::size_t n_hid = static_cast<std::size_t>(ae.d_hidden);

    Gradients g;
    g.enc_w.assign(ae.enc_w.size(), 0.0);
    g.enc_b.assign(n_hid, 0.0);
    g.dec_w.assign(ae.dec_w.size(), 0.0);
    g.dec_b.assign(n_in, 0.0);

    for (std::size_t n = 0; n < inputs.size(); ++n) {
        const auto& x = inputs[n];
        const auto& t = targets[n];
        std::vector<double> h = ae.encode(x);
        std::vector<double> y(n_in);
        for (std::size_t i = 0; i < n_in; ++i) {
            double z = ae.dec_b[i];
            const double* row = ae.dec_w.data() + i * n_hid;
            for (std::size_t j = 0; j < n_hid; ++j) z += row[j] * h[j];
            y[i] = logistic(z);
        }

        for (std::size_t i = 0; i < n_in; ++i) {
            double p = std::clamp(y[i], 1e-12, 1.0 - 1e-12);
            g.loss -= t[i] * std::log(p) + (1.0 - t[i]) * std::log1p(-p);
        }

        // delta_out = y - t (cross-entropy through logistic)
        std::vector<double> delta_out(n_in);
        for (std::size_t i = 0; i < n_in; ++i) delta_out[i] = y[i] - t[i];

        std::vector<double> delta_h(n_hid, 0.0);
        for (std::size_t i = 0; i < n_in; ++i) {
            const double* row = ae.dec_w.data() + i * n_hid;
            for (std::size_t j = 0; j < n_hid; ++j) delta_h[j] += row[j] * delta_out[i];
        }
        for (std::size_t j = 0; j < n_hid; ++j) delta_h[j] *= h[j] * (1.0 - h[j]);

        for (std::size_t i = 0; i < n_in; ++i) {
            double* row = g.dec_w.data() + i * n_hid;
            for (std::size_t j = 0; j < n_hid; ++j) row[j] += delta_out[i] * h[j];
            g.dec_b[i] += delta_out[i];
        }
        for (std::size_t j = 0; j < n_hid; ++j) {
            double* row = g.enc_w.data() + j * n_in;
            for (std::size_t i = 0; i < n_in; ++i) row[i] += delta_h[j] * x[i];
            g.enc_b[j] += delta_h[j];
        }
    }

    double inv = 1.0 / static_cast<double>(inputs.size());
    g.loss *= inv;
    for (auto* v : {&g.enc_w, &g.enc_b, &g.dec_w, &g.dec_b})
        for (double& e : *v) e *= inv;
    return g;
}

Gradients loss_and_gradients(const AutoEncoder& ae, const std::vector<std::vector<double>>& data) {
    return loss_and_gradients(ae, data, data);
}

double loss(const AutoEncoder& ae, const std::vector<std::vector<double>>& inputs,
            const std::vector<std::vector<double>>& targets) {
    check_data(inputs, ae.d_in);
    check_data(targets, ae.d_in);
    if (inputs.size() != targets.size()) throw std::invalid_argument("inputs/targets size mismatch");
    double total = 0.0;
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        std::vector<double> y = ae.reconstruct(inputs[n]);
        const auto& t = targets[n];
        for (std::size_t i = 0; i < t.size(); ++i) {
            double p = std::clamp(y[i], 1e-12, 1.0 - 1e-12);
            total -= t[i] * std::log(p) + (1.0 - t[i]) * std::log1p(-p);
        }
    }
    return total / static_cast<double>(inputs.size());
}

double loss(const AutoEncoder& ae, const std::vector<std::vector<double>>& data) {
    return loss(ae, data, data);
}

AutoEncoder train(const std::vector<std::vector<double>>& inputs,
                  const std::vector<std::vector<double>>& targets, const TrainConfig& cfg) {
    if (inputs.empty()) throw std::invalid_argument("empty dataset");
    check_data(inputs, static_cast<int>(inputs.front().size()));
    if (inputs.size() != targets.size()) throw std::invalid_argument("inputs/targets size mismatch");
    AutoEncoder ae = init_autoencoder(static_cast<int>(inputs.front().size()), cfg);
    if (cfg.learning_rate == 0.0) return ae;
    if (cfg.learning_rate < 0.0) throw std::invalid_argument("negative learning rate");

    std::mt19937_64 rng(mix(cfg.seed ^ 0x73687566ULL));
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    // gradient and activation buffers live outside the loop; the inner loops
    // run millions of times in the relational pipeline
    const std::size_t n_in = static_cast<std::size_t>(ae.d_in);
    const std::size_t n_hid = static_cast<std::size_t>(ae.d_hidden);
    Gradients g;
    g.enc_w.resize(ae.enc_w.size());
    g.enc_b.resize(n_hid);
    g.dec_w.resize(ae.dec_w.size());
    g.dec_b.resize(n_in);
    if (!cfg.loss_weights.empty() && cfg.loss_weights.size() != n_in)
        throw std::invalid_argument("loss_weights dimension mismatch");
    const double* lw = cfg.loss_weights.empty() ? nullptr : cfg.loss_weights.data();
    std::vector<double> h(n_hid), delta_out(n_in), delta_h(n_hid);
    std::vector<double> v_enc_w, v_enc_b, v_dec_w, v_dec_b;  // momentum velocities
    if (cfg.momentum > 0.0) {
        v_enc_w.assign(ae.enc_w.size(), 0.0);
        v_enc_b.assign(n_hid, 0.0);
        v_dec_w.assign(ae.dec_w.size(), 0.0);
        v_dec_b.assign(n_in, 0.0);
    }

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            for (auto* v : {&g.enc_w, &g.enc_b, &g.dec_w, &g.dec_b}) std::fill(v->begin(), v->end(), 0.0);

            for (std::size_t k = start; k < end; ++k) {
                const std::vector<double>& x = inputs[order[k]];
                const std::vector<double>& t = targets[order[k]];
                for (std::size_t j = 0; j < n_hid; ++j) {
                    double z = ae.enc_b[j];
                    const double* row = ae.enc_w.data() + j * n_in;
                    for (std::size_t i = 0; i < n_in; ++i) z += row[i] * x[i];
                    h[j] = logistic(z);
                }
                for (std::size_t i = 0; i < n_in; ++i) {
                    double z = ae.dec_b[i];
                    const double* row = ae.dec_w.data() + i * n_hid;
                    for (std::size_t j = 0; j < n_hid; ++j) z += row[j] * h[j];
                    delta_out[i] = logistic(z) - t[i];  // cross-entropy through logistic
                    if (lw) delta_out[i] *= lw[i];
                }
                std::fill(delta_h.begin(), delta_h.end(), 0.0);
                for (std::size_t i = 0; i < n_in; ++i) {
                    const double* row = ae.dec_w.data() + i * n_hid;
                    for (std::size_t j = 0; j < n_hid; ++j) delta_h[j] += row[j] * delta_out[i];
                }
                for (std::size_t j = 0; j < n_hid; ++j) delta_h[j] *= h[j] * (1.0 - h[j]);

                for (std::size_t i = 0; i < n_in; ++i) {
                    double* row = g.dec_w.data() + i * n_hid;
                    for (std::size_t j = 0; j < n_hid; ++j) row[j] += delta_out[i] * h[j];
                    g.dec_b[i] += delta_out[i];
                }
                for (std::size_t j = 0; j < n_hid; ++j) {
                    double* row = g.enc_w.data() + j * n_in;
                    for (std::size_t i = 0; i < n_in; ++i) row[i] += delta_h[j] * x[i];
                    g.enc_b[j] += delta_h[j];
                }
            }
            double inv = 1.0 / static_cast<double>(end - start);
            for (auto* v : {&g.enc_w, &g.enc_b, &g.dec_w, &g.dec_b})
                for (double& x : *v) x *= inv;

            if (cfg.tie_weights) {
                // Fold the decoder gradient into the shared matrix.
                for (int j = 0; j < ae.d_hidden; ++j)
                    for (int i = 0; i < ae.d_in; ++i)
                        g.enc_w[static_cast<std::size_t>(j) * ae.d_in + i] +=
                            g.dec_w[static_cast<std::size_t>(i) * ae.d_hidden + j];
            }
            if (cfg.momentum > 0.0) {
                auto step = [&](std::vector<double>& vel, const std::vector<double>& grad,
                                std::vector<double>& param) {
                    for (std::size_t k = 0; k < param.size(); ++k) {
                        vel[k] = cfg.momentum * vel[k] - cfg.learning_rate * grad[k];
                        // zero-gradient entries decay geometrically into
                        // denormals and stall the whole loop; flush them
                        if (std::abs(vel[k]) < 1e-100) vel[k] = 0.0;
                        param[k] += vel[k];
                    }
                };
                step(v_enc_w, g.enc_w, ae.enc_w);
                step(v_enc_b, g.enc_b, ae.enc_b);
                if (!cfg.tie_weights) step(v_dec_w, g.dec_w, ae.dec_w);
                step(v_dec_b, g.dec_b, ae.dec_b);
            } else {
                for (std::size_t k = 0; k < ae.enc_w.size(); ++k) ae.enc_w[k] -= cfg.learning_rate * g.enc_w[k];
                for (std::size_t k = 0; k < ae.enc_b.size(); ++k) ae.enc_b[k] -= cfg.learning_rate * g.enc_b[k];
                if (!cfg.tie_weights)
                    for (std::size_t k = 0; k < ae.dec_w.size(); ++k) ae.dec_w[k] -= cfg.learning_rate * g.dec_w[k];
                for (std::size_t k = 0; k < ae.dec_b.size(); ++k) ae.dec_b[k] -= cfg.learning_rate * g.dec_b[k];
            }
            if (cfg.tie_weights) {
                for (int j = 0; j < ae.d_hidden; ++j)
                    for (int i = 0; i < ae.d_in; ++i)
                        ae.dec_w[static_cast<std::size_t>(i) * ae.d_hidden + j] =
                            ae.enc_w[static_cast<std::size_t>(j) * ae.d_in + i];
            }
        }
    }
    return ae;
}

AutoEncoder train(const std::vector<std::vector<double>>& data, const TrainConfig& cfg) {
    return train(data, data, cfg);
}

}  // namespace nsrbm::autoenc

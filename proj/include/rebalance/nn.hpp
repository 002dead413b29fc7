#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rebalance/common.hpp"

namespace rebalance::nn {

enum class Activation { relu, leaky_relu, sigmoid, linear };

struct LayerSpec {
    std::size_t input_width = 0;
    std::size_t output_width = 0;
    Activation activation = Activation::linear;
    double leaky_slope = 0.2;  // only read for leaky_relu, must be in (0,1)
};

struct Layer {
    LayerSpec spec;
    Matrix weights;  // output_width x input_width
    Vec biases;      // output_width
};

struct MlpModel {
    std::vector<Layer> layers;
    std::uint64_t seed = 0;

    std::size_t input_width() const { return layers.front().spec.input_width; }
    std::size_t output_width() const { return layers.back().spec.output_width; }
};

enum class Optimizer { sgd, adam };

struct TrainConfig {
    std::size_t epochs = 1;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t shuffle_seed = 0;
};

inline void validate_train_config(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("TrainConfig: learning_rate must be > 0");
}

inline double activate(Activation a, double z, double slope) {
    switch (a) {
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::leaky_relu: return z > 0.0 ? z : slope * z;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::linear: return z;
    }
    return z;
}

// Derivative with respect to the pre-activation. For sigmoid `y` is the
// already-computed activation value.
inline double activate_grad(Activation a, double z, double y, double slope) {
    switch (a) {
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::leaky_relu: return z > 0.0 ? 1.0 : slope;
        case Activation::sigmoid: return y * (1.0 - y);
        case Activation::linear: return 1.0;
    }
    return 1.0;
}

inline MlpModel mlp_init(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
    if (specs.empty()) throw ConfigError("mlp_init: empty layer list");
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].input_width < 1 || specs[i].output_width < 1)
            throw ConfigError("mlp_init: layer " + std::to_string(i) + " has zero width");
        if (specs[i].activation == Activation::leaky_relu &&
            !(specs[i].leaky_slope > 0.0 && specs[i].leaky_slope < 1.0))
            throw ConfigError("mlp_init: leaky_relu slope out of (0,1) at layer " + std::to_string(i));
        if (i + 1 < specs.size() && specs[i].output_width != specs[i + 1].input_width)
            throw ConfigError("mlp_init: width chain mismatch between layers " +
                              std::to_string(i) + " and " + std::to_string(i + 1));
    }
    MlpModel model;
    model.seed = seed;
    Rng rng(seed);
    for (const auto& spec : specs) {
        const double fan_in = static_cast<double>(spec.input_width);
        const double fan_out = static_cast<double>(spec.output_width);
        // He bound for relu-family layers, Xavier otherwise.
        const bool relu_like =
            spec.activation == Activation::relu || spec.activation == Activation::leaky_relu;
        const double bound = relu_like ? std::sqrt(6.0 / fan_in)
                                       : std::sqrt(6.0 / (fan_in + fan_out));
        Layer layer{spec, Matrix(spec.output_width, spec.input_width), Vec(spec.output_width, 0.0)};
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& w : layer.weights.raw()) w = dist(rng);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

inline Vec mlp_forward(const MlpModel& model, const Vec& x) {
    if (x.size() != model.input_width())
        throw InputError("mlp_forward: input width " + std::to_string(x.size()) +
                         " != expected " + std::to_string(model.input_width()));
    Vec cur = x;
    for (const auto& layer : model.layers) {
        const auto& s = layer.spec;
        Vec next(s.output_width);
        for (std::size_t o = 0; o < s.output_width; ++o) {
            double z = layer.biases[o];
            const double* wrow = layer.weights.row_ptr(o);
            for (std::size_t i = 0; i < s.input_width; ++i) z += wrow[i] * cur[i];
            next[o] = activate(s.activation, z, s.leaky_slope);
        }
        cur = std::move(next);
    }
    return cur;
}

struct MlpGradient {
    std::vector<Matrix> weight_grads;
    std::vector<Vec> bias_grads;
    Vec input_grad;  // dL/dx, needed to chain generator through discriminator

    void add_scaled(const MlpGradient& g, double scale) {
        for (std::size_t l = 0; l < weight_grads.size(); ++l) {
            auto& dst = weight_grads[l].raw();
            const auto& src = g.weight_grads[l].raw();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
            for (std::size_t i = 0; i < bias_grads[l].size(); ++i)
                bias_grads[l][i] += scale * g.bias_grads[l][i];
        }
    }
};

inline MlpGradient zero_gradient(const MlpModel& model) {
    MlpGradient g;
    for (const auto& layer : model.layers) {
        g.weight_grads.emplace_back(layer.spec.output_width, layer.spec.input_width);
        g.bias_grads.emplace_back(layer.spec.output_width, 0.0);
    }
    g.input_grad.assign(model.input_width(), 0.0);
    return g;
}

// Forward pass keeping pre-activations and activations for backprop.
struct ForwardTrace {
    std::vector<Vec> pre;   // z per layer
    std::vector<Vec> act;   // act[0] = input, act[l+1] = layer l output
};

inline ForwardTrace mlp_forward_trace(const MlpModel& model, const Vec& x) {
    if (x.size() != model.input_width())
        throw InputError("mlp_forward_trace: input width mismatch");
    ForwardTrace t;
    t.act.push_back(x);
    for (const auto& layer : model.layers) {
        const auto& s = layer.spec;
        const Vec& cur = t.act.back();
        Vec z(s.output_width), y(s.output_width);
        for (std::size_t o = 0; o < s.output_width; ++o) {
            double acc = layer.biases[o];
            const double* wrow = layer.weights.row_ptr(o);
            for (std::size_t i = 0; i < s.input_width; ++i) acc += wrow[i] * cur[i];
            z[o] = acc;
            y[o] = activate(s.activation, acc, s.leaky_slope);
        }
        t.pre.push_back(std::move(z));
        t.act.push_back(std::move(y));
    }
    return t;
}

// Reverse-mode gradients of the composed network. `loss_grad_at_output` is
// dL/dy at the final activation.
inline MlpGradient mlp_gradient(const MlpModel& model, const Vec& x, const Vec& loss_grad_at_output) {
    if (loss_grad_at_output.size() != model.output_width())
        throw InputError("mlp_gradient: output gradient width mismatch");
    const ForwardTrace trace = mlp_forward_trace(model, x);
    MlpGradient g = zero_gradient(model);
    Vec delta = loss_grad_at_output;
    for (std::size_t li = model.layers.size(); li-- > 0;) {
        const auto& layer = model.layers[li];
        const auto& s = layer.spec;
        const Vec& input = trace.act[li];
        Vec dz(s.output_width);
        for (std::size_t o = 0; o < s.output_width; ++o)
            dz[o] = delta[o] * activate_grad(s.activation, trace.pre[li][o], trace.act[li + 1][o],
                                             s.leaky_slope);
        for (std::size_t o = 0; o < s.output_width; ++o) {
            g.bias_grads[li][o] = dz[o];
            for (std::size_t i = 0; i < s.input_width; ++i)
                g.weight_grads[li](o, i) = dz[o] * input[i];
        }
        Vec prev(s.input_width, 0.0);
        for (std::size_t o = 0; o < s.output_width; ++o) {
            const double* wrow = layer.weights.row_ptr(o);
            for (std::size_t i = 0; i < s.input_width; ++i) prev[i] += wrow[i] * dz[o];
        }
        delta = std::move(prev);
    }
    g.input_grad = std::move(delta);
    return g;
}

// Adam/SGD state over a model's parameters.
class ParamUpdater {
public:
    ParamUpdater(const MlpModel& model, const TrainConfig& cfg) : cfg_(cfg) {
        if (cfg.optimizer == Optimizer::adam) {
            for (const auto& layer : model.layers) {
                m_w_.emplace_back(layer.spec.output_width, layer.spec.input_width);
                v_w_.emplace_back(layer.spec.output_width, layer.spec.input_width);
                m_b_.emplace_back(layer.spec.output_width, 0.0);
                v_b_.emplace_back(layer.spec.output_width, 0.0);
            }
        }
    }

    // Applies one descent step along `grad`.
    void step(MlpModel& model, const MlpGradient& grad) {
        if (cfg_.optimizer == Optimizer::sgd) {
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                auto& w = model.layers[l].weights.raw();
                const auto& gw = grad.weight_grads[l].raw();
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg_.learning_rate * gw[i];
                auto& b = model.layers[l].biases;
                for (std::size_t i = 0; i < b.size(); ++i)
                    b[i] -= cfg_.learning_rate * grad.bias_grads[l][i];
            }
            return;
        }
        ++t_;
        const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
        const double corr1 = 1.0 - std::pow(b1, static_cast<double>(t_));
        const double corr2 = 1.0 - std::pow(b2, static_cast<double>(t_));
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            auto& w = model.layers[l].weights.raw();
            const auto& gw = grad.weight_grads[l].raw();
            auto& mw = m_w_[l].raw();
            auto& vw = v_w_[l].raw();
            for (std::size_t i = 0; i < w.size(); ++i) {
                mw[i] = b1 * mw[i] + (1.0 - b1) * gw[i];
                vw[i] = b2 * vw[i] + (1.0 - b2) * gw[i] * gw[i];
                w[i] -= cfg_.learning_rate * (mw[i] / corr1) /
                        (std::sqrt(vw[i] / corr2) + cfg_.adam_eps);
            }
            auto& b = model.layers[l].biases;
            for (std::size_t i = 0; i < b.size(); ++i) {
                const double gb = grad.bias_grads[l][i];
                m_b_[l][i] = b1 * m_b_[l][i] + (1.0 - b1) * gb;
                v_b_[l][i] = b2 * v_b_[l][i] + (1.0 - b2) * gb * gb;
                b[i] -= cfg_.learning_rate * (m_b_[l][i] / corr1) /
                        (std::sqrt(v_b_[l][i] / corr2) + cfg_.adam_eps);
            }
        }
    }

private:
    TrainConfig cfg_;
    std::size_t t_ = 0;
    std::vector<Matrix> m_w_, v_w_;
    std::vector<Vec> m_b_, v_b_;
};

// Minibatch gradient descent on summed-squared-error per sample, averaged
// over the batch. The last partial minibatch is used as-is.
inline MlpModel mse_train(MlpModel model, const Matrix& inputs, const Matrix& targets,
                          const TrainConfig& cfg) {
    validate_train_config(cfg);
    if (inputs.rows() != targets.rows())
        throw InputError("mse_train: input/target row counts differ");
    if (inputs.cols() != model.input_width() || targets.cols() != model.output_width())
        throw InputError("mse_train: column widths do not match model");

    ParamUpdater updater(model, cfg);
    Rng rng(cfg.shuffle_seed);
    std::vector<std::size_t> order(inputs.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            MlpGradient batch_grad = zero_gradient(model);
            const double inv = 1.0 / static_cast<double>(end - start);
            for (std::size_t bi = start; bi < end; ++bi) {
                const std::size_t r = order[bi];
                const Vec x = inputs.row(r);
                const Vec y = mlp_forward(model, x);
                Vec dLdy(y.size());
                for (std::size_t j = 0; j < y.size(); ++j) {
                    const double err = y[j] - targets(r, j);
                    epoch_loss += err * err;
                    dLdy[j] = 2.0 * err;
                }
                batch_grad.add_scaled(mlp_gradient(model, x, dLdy), inv);
            }
            updater.step(model, batch_grad);
        }
        if (!std::isfinite(epoch_loss))
            throw DivergenceError("mse_train: non-finite loss at epoch " + std::to_string(epoch),
                                  epoch);
    }
    return model;
}

constexpr double kProbClamp = 1e-7;

inline double clamp_prob(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

struct BceTerms {
    double disc_objective;            // mean log D(x) + mean log(1 - D(G(z)))
    double gen_saturating_objective;  // mean log(1 - D(G(z)))
};

inline BceTerms bce_terms(const Vec& d_real, const Vec& d_fake) {
    if (d_real.empty() || d_fake.empty()) throw InputError("bce_terms: empty input");
    double real_term = 0.0, fake_term = 0.0;
    for (double p : d_real) real_term += std::log(clamp_prob(p));
    for (double p : d_fake) fake_term += std::log(1.0 - clamp_prob(p));
    real_term /= static_cast<double>(d_real.size());
    fake_term /= static_cast<double>(d_fake.size());
    return {real_term + fake_term, fake_term};
}

}  // namespace rebalance::nn

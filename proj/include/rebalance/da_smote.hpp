#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rebalance/common.hpp"
#include "rebalance/deep_smote.hpp"
#include "rebalance/nn.hpp"

namespace rebalance::da_smote {

enum class GenLossMode { saturating, non_saturating };

struct AdversarialConfig {
    std::size_t iterations = 2000;
    std::size_t disc_steps_k = 1;
    std::size_t minibatch_m = 32;
    std::vector<nn::LayerSpec> gen_arch;
    std::vector<nn::LayerSpec> disc_arch;
    GenLossMode gen_loss_mode = GenLossMode::non_saturating;
    double gen_learning_rate = 2e-4;
    double disc_learning_rate = 2e-4;
    nn::Optimizer optimizer = nn::Optimizer::adam;
    std::uint64_t rng_seed = 0;
};

// Produces one latent vector per call; DA-SMOTE concatenates a random
// minority pair, the plain GAN draws uniform noise.
using LatentSampler = std::function<Vec(Rng&)>;

inline LatentSampler pair_concat_latent(const Matrix& minority) {
    const std::size_t w = minority.rows();
    const std::size_t n = minority.cols();
    return [&minority, w, n](Rng& rng) {
        const std::size_t s = uniform_index(rng, w);
        std::size_t t = uniform_index(rng, w - 1);
        if (t >= s) ++t;
        Vec z(2 * n);
        for (std::size_t j = 0; j < n; ++j) {
            z[j] = minority(s, j);
            z[n + j] = minority(t, j);
        }
        return z;
    };
}

inline LatentSampler uniform_noise_latent(std::size_t noise_dim) {
    return [noise_dim](Rng& rng) {
        Vec z(noise_dim);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (double& v : z) v = dist(rng);
        return z;
    };
}

namespace detail {

inline void check_finite(const nn::MlpModel& model, const char* tag, std::size_t iteration) {
    for (const auto& layer : model.layers) {
        for (double w : layer.weights.raw())
            if (!std::isfinite(w))
                throw DivergenceError(std::string(tag) + ": non-finite weights at iteration " +
                                          std::to_string(iteration),
                                      iteration);
        for (double b : layer.biases)
            if (!std::isfinite(b))
                throw DivergenceError(std::string(tag) + ": non-finite biases at iteration " +
                                          std::to_string(iteration),
                                      iteration);
    }
}

}  // namespace detail

// One discriminator minibatch update: ascend mean log D(x) + mean log(1-D(G(z))),
// implemented as a descent step on the negated objective. Exposed so the
// first-order ascent property can be checked on a frozen minibatch.
inline void discriminator_step(nn::MlpModel& disc, nn::ParamUpdater& updater,
                               const std::vector<Vec>& reals, const std::vector<Vec>& fakes) {
    nn::MlpGradient grad = nn::zero_gradient(disc);
    const double inv_r = 1.0 / static_cast<double>(reals.size());
    for (const Vec& x : reals) {
        const double d = nn::clamp_prob(nn::mlp_forward(disc, x)[0]);
        // L = -log d  ⇒  dL/dd = -1/d
        grad.add_scaled(nn::mlp_gradient(disc, x, {-1.0 / d}), inv_r);
    }
    const double inv_f = 1.0 / static_cast<double>(fakes.size());
    for (const Vec& x : fakes) {
        const double d = nn::clamp_prob(nn::mlp_forward(disc, x)[0]);
        // L = -log(1-d)  ⇒  dL/dd = 1/(1-d)
        grad.add_scaled(nn::mlp_gradient(disc, x, {1.0 / (1.0 - d)}), inv_f);
    }
    updater.step(disc, grad);
}

// One generator minibatch update through the frozen discriminator.
inline void generator_step(nn::MlpModel& gen, nn::ParamUpdater& updater,
                           const nn::MlpModel& disc, const std::vector<Vec>& latents,
                           GenLossMode mode) {
    nn::MlpGradient grad = nn::zero_gradient(gen);
    const double inv = 1.0 / static_cast<double>(latents.size());
    for (const Vec& z : latents) {
        const Vec fake = nn::mlp_forward(gen, z);
        const double d = nn::clamp_prob(nn::mlp_forward(disc, fake)[0]);
        // saturating: descend log(1-d) ⇒ dL/dd = -1/(1-d)
        // non-saturating: descend -log d ⇒ dL/dd = -1/d
        const double dLdd =
            mode == GenLossMode::saturating ? -1.0 / (1.0 - d) : -1.0 / d;
        const nn::MlpGradient disc_grad = nn::mlp_gradient(disc, fake, {dLdd});
        grad.add_scaled(nn::mlp_gradient(gen, z, disc_grad.input_grad), inv);
    }
    updater.step(gen, grad);
}

// Shared adversarial loop; DA-SMOTE and the plain GAN differ only in the
// latent sampler passed here.
inline nn::MlpModel train_adversarial(const Matrix& real_data, const AdversarialConfig& cfg,
                                      const LatentSampler& sample_latent) {
    if (real_data.rows() < 2)
        throw InputError("train_adversarial: need at least 2 real instances");
    if (cfg.gen_arch.empty() || cfg.disc_arch.empty())
        throw ConfigError("train_adversarial: empty architecture");
    if (cfg.gen_arch.back().output_width != real_data.cols())
        throw ConfigError("train_adversarial: generator output width must equal feature width");
    if (cfg.disc_arch.back().output_width != 1)
        throw ConfigError("train_adversarial: discriminator output width must be 1");
    if (cfg.disc_arch.front().input_width != real_data.cols())
        throw ConfigError("train_adversarial: discriminator input width must equal feature width");

    nn::MlpModel gen = nn::mlp_init(cfg.gen_arch, derive_seed(cfg.rng_seed, "adv/gen_init"));
    nn::MlpModel disc = nn::mlp_init(cfg.disc_arch, derive_seed(cfg.rng_seed, "adv/disc_init"));

    nn::TrainConfig gen_opt, disc_opt;
    gen_opt.optimizer = disc_opt.optimizer = cfg.optimizer;
    gen_opt.learning_rate = cfg.gen_learning_rate;
    disc_opt.learning_rate = cfg.disc_learning_rate;
    nn::ParamUpdater gen_updater(gen, gen_opt);
    nn::ParamUpdater disc_updater(disc, disc_opt);

    Rng rng(derive_seed(cfg.rng_seed, "adv/loop"));
    const std::size_t m = std::max<std::size_t>(1, std::min(cfg.minibatch_m, real_data.rows()));

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        for (std::size_t k = 0; k < cfg.disc_steps_k; ++k) {
            std::vector<Vec> latents(m), reals(m), fakes(m);
            for (std::size_t i = 0; i < m; ++i) latents[i] = sample_latent(rng);
            for (std::size_t i = 0; i < m; ++i)
                reals[i] = real_data.row(uniform_index(rng, real_data.rows()));
            for (std::size_t i = 0; i < m; ++i) fakes[i] = nn::mlp_forward(gen, latents[i]);
            discriminator_step(disc, disc_updater, reals, fakes);
        }
        std::vector<Vec> latents(m);
        for (std::size_t i = 0; i < m; ++i) latents[i] = sample_latent(rng);
        generator_step(gen, gen_updater, disc, latents, cfg.gen_loss_mode);
        if ((it & 0xFF) == 0xFF || it + 1 == cfg.iterations) {
            detail::check_finite(gen, "generator", it);
            detail::check_finite(disc, "discriminator", it);
        }
    }
    return gen;
}

// Generator whose latent is a concatenated random minority pair.
inline nn::MlpModel train_da_smote(const Matrix& minority, const AdversarialConfig& cfg) {
    if (!cfg.gen_arch.empty() &&
        cfg.gen_arch.front().input_width != 2 * minority.cols())
        throw ConfigError("train_da_smote: generator input width must be 2n");
    return train_adversarial(minority, cfg, pair_concat_latent(minority));
}

// Plain GAN baseline: identical loop, uniform noise latent in [-1,1]^noise_dim.
inline nn::MlpModel train_gan_baseline(const Matrix& minority, const AdversarialConfig& cfg,
                                       std::size_t noise_dim) {
    if (noise_dim < 1) throw ConfigError("train_gan_baseline: noise_dim must be >= 1");
    if (!cfg.gen_arch.empty() && cfg.gen_arch.front().input_width != noise_dim)
        throw ConfigError("train_gan_baseline: generator input width must equal noise_dim");
    return train_adversarial(minority, cfg, uniform_noise_latent(noise_dim));
}

// Merge contract identical to oversample_deep_smote, with generator
// predictions in place of regressor predictions.
inline Matrix oversample_with_generator(const Matrix& minority, const nn::MlpModel& generator,
                                        std::size_t deficit_d, std::uint64_t rng_seed,
                                        const LatentSampler& sample_latent) {
    const std::size_t n = minority.cols();
    if (generator.output_width() != n)
        throw InputError("oversample: generator output width mismatch");
    Matrix out(0, n);
    for (std::size_t i = 0; i < minority.rows(); ++i) out.push_row(minority.row_ptr(i), n);
    Rng rng(rng_seed);
    for (std::size_t d = 0; d < deficit_d; ++d)
        out.push_row(nn::mlp_forward(generator, sample_latent(rng)));
    return out;
}

inline Matrix oversample_da_smote(const Matrix& minority, const nn::MlpModel& generator,
                                  std::size_t deficit_d, std::uint64_t rng_seed) {
    if (minority.rows() < 2)
        throw InputError("oversample_da_smote: need at least 2 minority instances");
    if (generator.input_width() != 2 * minority.cols())
        throw InputError("oversample_da_smote: generator input width must be 2n");
    return oversample_with_generator(minority, generator, deficit_d, rng_seed,
                                     pair_concat_latent(minority));
}

inline Matrix oversample_gan(const Matrix& minority, const nn::MlpModel& generator,
                             std::size_t deficit_d, std::uint64_t rng_seed) {
    return oversample_with_generator(minority, generator, deficit_d, rng_seed,
                                     uniform_noise_latent(generator.input_width()));
}

// C(w,2): the latent capacity gained by pair concatenation.
inline std::size_t latent_capacity(std::size_t w) {
    if (w < 2) throw InputError("latent_capacity: need w >= 2");
    return w * (w - 1) / 2;
}

// Builds relu-hidden architectures from plain width lists (the generator
// ends linear, the discriminator leaky_relu-hidden with sigmoid output).
inline std::vector<nn::LayerSpec> generator_arch(const std::vector<std::size_t>& widths) {
    if (widths.size() < 2) throw ConfigError("generator_arch: need at least 2 widths");
    std::vector<nn::LayerSpec> specs;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i)
        specs.push_back({widths[i], widths[i + 1],
                         i + 2 < widths.size() ? nn::Activation::relu : nn::Activation::linear});
    return specs;
}

inline std::vector<nn::LayerSpec> discriminator_arch(const std::vector<std::size_t>& widths) {
    if (widths.size() < 2) throw ConfigError("discriminator_arch: need at least 2 widths");
    std::vector<nn::LayerSpec> specs;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i)
        specs.push_back({widths[i], widths[i + 1],
                         i + 2 < widths.size() ? nn::Activation::leaky_relu
                                               : nn::Activation::sigmoid});
    return specs;
}

}  // namespace rebalance::da_smote

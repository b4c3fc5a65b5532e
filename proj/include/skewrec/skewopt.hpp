#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "skewrec/corpus.hpp"
#include "skewrec/embed.hpp"
#include "skewrec/sampler.hpp"

namespace skewrec {

// Hyperparameters of the pairwise ranking criterion
//
//   sum over triples of ln sigmoid(((x_uij - xi) / omega)^eta) - lambda ||Theta||^2
//
// maximized by stochastic gradient ascent. (xi, omega, eta) = (0, 1, 1) is
// plain BPR.
struct SkewOptConfig {
    double xi = 0.0;       // location shift, >= 0
    double omega = 1.0;    // scale, > 0
    int eta = 1;           // positive odd integer
    double beta = 0.05;    // learning rate
    double lambda = 0.0025;  // L2 strength
    std::int64_t epochs = 200;
    std::uint64_t seed = 1;
    int threads = 1;
    double clip = 10.0;  // cap on the per-triple scalar gradient

    void validate() const;  // throws std::invalid_argument
};

// Reads `key = value` lines ('#' comments and blank lines ignored) into a
// config; keys match the field names above. Unknown keys are errors.
SkewOptConfig load_config_file(const std::string& path);

// Per-triple pieces at a given estimator value x = x_uij.
struct TripleLossTerm {
    double z;            // (x - xi) / omega
    double zeta;         // z^eta
    double loglik;       // ln sigmoid(z^eta), always <= 0
    double dloss_dxhat;  // d loglik / dx clamped to [0, clip]; >= 0 since eta is odd
};

TripleLossTerm eval_triple(double xhat, const SkewOptConfig& cfg);

// ln sigmoid(((xhat - xi)/omega)^eta), stable for any finite argument.
double log_likelihood(double xhat, const SkewOptConfig& cfg);

// sigmoid(-z^eta) * eta * z^(eta-1) / omega, clamped to [0, clip].
double grad_pair(double xhat, const SkewOptConfig& cfg);

// One ascent step on theta_u, theta_i, theta_j; right-hand sides use the
// pre-step values. Safe to call concurrently from multiple threads on the
// same model (Hogwild: element-wise atomic loads/stores, races tolerated).
void sgd_step(EmbeddingModel& m, const Triple& t, const SkewOptConfig& cfg);

// Full criterion over an explicit triple list: sum of log-likelihoods minus
// lambda times the squared Frobenius norm of the whole parameter matrix.
double objective(const EmbeddingModel& m, std::span<const Triple> triples,
                 const SkewOptConfig& cfg);

using EpochCallback = std::function<void(std::int64_t epoch, double objective_per_triple)>;

// Initializes a model from the training interactions and runs
// epochs * |S| sgd_steps spread over cfg.threads workers sharing it.
// threads = 1 is bit-deterministic per seed; more threads trade determinism
// for speed. The callback, if given, runs between epochs on the quiesced
// model with a fixed-probe objective estimate.
EmbeddingModel train(const Interactions& train_data, const SkewOptConfig& cfg, std::uint32_t d,
                     const EpochCallback& cb = {});

}  // namespace skewrec

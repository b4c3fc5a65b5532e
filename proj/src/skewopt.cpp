#include "skewrec/skewopt.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace skewrec {

void SkewOptConfig::validate() const {
    if (!(std::isfinite(xi) && xi >= 0.0))
        throw std::invalid_argument("config: xi must be finite and >= 0");
    if (!(std::isfinite(omega) && omega > 0.0))
        throw std::invalid_argument("config: omega must be finite and > 0");
    if (eta < 1 || eta % 2 == 0)
        throw std::invalid_argument("config: eta must be a positive odd integer");
    if (!(std::isfinite(beta) && beta > 0.0))
        throw std::invalid_argument("config: beta must be finite and > 0");
    if (!(std::isfinite(lambda) && lambda >= 0.0))
        throw std::invalid_argument("config: lambda must be finite and >= 0");
    if (epochs < 0) throw std::invalid_argument("config: epochs must be >= 0");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (!(std::isfinite(clip) && clip > 0.0))
        throw std::invalid_argument("config: clip must be finite and > 0");
}

namespace {

// z^n for integer n >= 0 by squaring; exact pass-through for n = 1.
double ipow(double z, int n) {
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

double log_sigmoid(double t) {
    if (t >= 0.0) return -std::log1p(std::exp(-t));
    return t - std::log1p(std::exp(t));
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double frobenius_sq(const EmbeddingModel& m) {
    double s = 0.0;
    for (double v : m.user_vecs) s += v * v;
    for (double v : m.item_vecs) s += v * v;
    return s;
}

}  // namespace

SkewOptConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);

    SkewOptConfig cfg;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const auto bad = [&]() {
            return std::runtime_error(path + ":" + std::to_string(lineno) +
                                      ": bad value for " + key);
        };
        const auto as_double = [&]() {
            double v;
            auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
            if (ec != std::errc{} || p != val.data() + val.size()) throw bad();
            return v;
        };
        const auto as_int = [&]() {
            std::int64_t v;
            auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
            if (ec != std::errc{} || p != val.data() + val.size()) throw bad();
            return v;
        };
        if (key == "xi") cfg.xi = as_double();
        else if (key == "omega") cfg.omega = as_double();
        else if (key == "eta") cfg.eta = static_cast<int>(as_int());
        else if (key == "beta") cfg.beta = as_double();
        else if (key == "lambda") cfg.lambda = as_double();
        else if (key == "epochs") cfg.epochs = as_int();
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int());
        else if (key == "threads") cfg.threads = static_cast<int>(as_int());
        else if (key == "clip") cfg.clip = as_double();
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown config key '" + key + "'");
    }
    return cfg;
}

TripleLossTerm eval_triple(double xhat, const SkewOptConfig& cfg) {
    if (!std::isfinite(xhat)) throw std::invalid_argument("eval_triple: non-finite estimator value");
    TripleLossTerm t;
    t.z = (xhat - cfg.xi) / cfg.omega;
    t.zeta = ipow(t.z, cfg.eta);
    t.loglik = log_sigmoid(t.zeta);
    const double s = sigmoid(-t.zeta);
    // s underflows to 0 exactly where the polynomial factor cannot win;
    // short-circuit to avoid 0 * inf.
    if (s == 0.0) {
        t.dloss_dxhat = 0.0;
    } else {
        const double g = s * static_cast<double>(cfg.eta) * ipow(t.z, cfg.eta - 1) / cfg.omega;
        t.dloss_dxhat = std::min(g, cfg.clip);
    }
    return t;
}

double log_likelihood(double xhat, const SkewOptConfig& cfg) {
    return eval_triple(xhat, cfg).loglik;
}

double grad_pair(double xhat, const SkewOptConfig& cfg) {
    return eval_triple(xhat, cfg).dloss_dxhat;
}

void sgd_step(EmbeddingModel& m, const Triple& t, const SkewOptConfig& cfg) {
    thread_local std::vector<double> bu, bi, bj;
    const std::uint32_t d = m.d;
    bu.resize(d);
    bi.resize(d);
    bj.resize(d);

    double* U = m.user_vecs.data() + static_cast<std::size_t>(t.u) * d;
    double* I = m.item_vecs.data() + static_cast<std::size_t>(t.i) * d;
    double* J = m.item_vecs.data() + static_cast<std::size_t>(t.j) * d;
    for (std::uint32_t k = 0; k < d; ++k) {
        bu[k] = std::atomic_ref<double>(U[k]).load(std::memory_order_relaxed);
        bi[k] = std::atomic_ref<double>(I[k]).load(std::memory_order_relaxed);
        bj[k] = std::atomic_ref<double>(J[k]).load(std::memory_order_relaxed);
    }

    double xhat = 0.0;
    for (std::uint32_t k = 0; k < d; ++k) xhat += bu[k] * (bi[k] - bj[k]);
    if (!std::isfinite(xhat)) {
        std::ostringstream os;
        os << "sgd_step: non-finite estimator for triple (" << t.u << ", " << t.i << ", "
           << t.j << "); training diverged";
        throw std::runtime_error(os.str());
    }

    const double g = eval_triple(xhat, cfg).dloss_dxhat;
    const double beta = cfg.beta;
    const double lambda = cfg.lambda;
    for (std::uint32_t k = 0; k < d; ++k) {
        const double nu = bu[k] + beta * (g * (bi[k] - bj[k]) - lambda * bu[k]);
        const double ni = bi[k] + beta * (g * bu[k] - lambda * bi[k]);
        const double nj = bj[k] + beta * (-g * bu[k] - lambda * bj[k]);
        std::atomic_ref<double>(U[k]).store(nu, std::memory_order_relaxed);
        std::atomic_ref<double>(I[k]).store(ni, std::memory_order_relaxed);
        std::atomic_ref<double>(J[k]).store(nj, std::memory_order_relaxed);
    }
}

double objective(const EmbeddingModel& m, std::span<const Triple> triples,
                 const SkewOptConfig& cfg) {
    double s = 0.0;
    for (const Triple& t : triples) s += log_likelihood(score_pair(m, t.u, t.i, t.j), cfg);
    if (cfg.lambda != 0.0) s -= cfg.lambda * frobenius_sq(m);
    return s;
}

namespace {

void check_finite(const EmbeddingModel& m, std::int64_t epoch) {
    for (double v : m.user_vecs)
        if (!std::isfinite(v))
            throw std::runtime_error("train: non-finite user parameter after epoch " +
                                     std::to_string(epoch));
    for (double v : m.item_vecs)
        if (!std::isfinite(v))
            throw std::runtime_error("train: non-finite item parameter after epoch " +
                                     std::to_string(epoch));
}

}  // namespace

EmbeddingModel train(const Interactions& train_data, const SkewOptConfig& cfg, std::uint32_t d,
                     const EpochCallback& cb) {
    cfg.validate();
    EmbeddingModel model = init_model(train_data, d, cfg.seed);
    if (cfg.epochs == 0) return model;

    const std::int64_t steps_per_epoch = TripleSampler::epoch_size(train_data);
    std::vector<TripleSampler> samplers;
    samplers.reserve(cfg.threads);
    for (int t = 0; t < cfg.threads; ++t)
        samplers.emplace_back(train_data, cfg.seed + static_cast<std::uint64_t>(t));

    // Fixed probe set so per-epoch objective estimates are comparable.
    std::vector<Triple> probe;
    if (cb) {
        TripleSampler probe_sampler(train_data, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        const std::int64_t n_probe = std::min<std::int64_t>(steps_per_epoch, 10000);
        probe.reserve(n_probe);
        for (std::int64_t k = 0; k < n_probe; ++k) probe.push_back(probe_sampler.sample());
    }

    for (std::int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.threads == 1) {
            for (std::int64_t s = 0; s < steps_per_epoch; ++s)
                sgd_step(model, samplers[0].sample(), cfg);
        } else {
            std::vector<std::thread> workers;
            std::vector<std::exception_ptr> errors(cfg.threads);
            for (int t = 0; t < cfg.threads; ++t) {
                const std::int64_t share = steps_per_epoch / cfg.threads +
                                           (t < steps_per_epoch % cfg.threads ? 1 : 0);
                workers.emplace_back([&, t, share]() {
                    try {
                        for (std::int64_t s = 0; s < share; ++s)
                            sgd_step(model, samplers[t].sample(), cfg);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
            for (auto& w : workers) w.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        check_finite(model, epoch);
        if (cb) {
            double s = 0.0;
            for (const Triple& t : probe) s += log_likelihood(score_pair(model, t.u, t.i, t.j), cfg);
            const double per_triple = s / static_cast<double>(probe.size()) -
                                      cfg.lambda * frobenius_sq(model) /
                                          static_cast<double>(steps_per_epoch);
            cb(epoch, per_triple);
        }
    }
    return model;
}

}  // namespace skewrec

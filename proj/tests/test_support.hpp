// Shared fixtures and independent oracles. Everything here is deliberately
// naive (full enumeration, plain summation, textbook formulas) so it cannot
// share a bug with the library paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "skewrec/corpus.hpp"
#include "skewrec/embed.hpp"
#include "skewrec/skewopt.hpp"

namespace testsup {

// ---------------------------------------------------------------------------
// scratch directories

class TempDir {
  public:
    TempDir() {
        char tmpl[] = "/tmp/skewrec_test_XXXXXX";
        path_ = mkdtemp(tmpl);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    os << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// quadrature oracle: fixed-grid composite Simpson, no adaptivity shared with
// the library integrator

inline double simpson_fixed(const std::function<double(double)>& f, double a, double b,
                            int intervals /* even */) {
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int k = 1; k < intervals; ++k) s += f(a + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// ---------------------------------------------------------------------------
// metric oracles: full candidate sort plus O(P*N) pair enumeration

struct RankOracle {
    double recall = 0.0;
    double map = 0.0;
    double auc_macro = 0.0;
    double auc_micro = 0.0;
};

inline RankOracle brute_force_metrics(const skewrec::EmbeddingModel& m,
                                      const skewrec::Interactions& train,
                                      const skewrec::Interactions& test, int n) {
    RankOracle out;
    std::int64_t users = 0;
    double macro = 0.0;
    std::int64_t macro_users = 0;
    double wins_total = 0.0, pairs_total = 0.0;
    for (std::uint32_t u = 0; u < m.n_users; ++u) {
        const std::set<std::uint32_t> tr(train.pos[u].begin(), train.pos[u].end());
        const std::set<std::uint32_t> te(test.pos[u].begin(), test.pos[u].end());
        if (te.empty()) continue;
        ++users;

        std::vector<std::pair<double, std::uint32_t>> cand;
        for (std::uint32_t i = 0; i < m.n_items; ++i)
            if (!tr.count(i)) cand.emplace_back(skewrec::score(m, u, i), i);
        std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });

        const double denom = std::min<std::size_t>(n, te.size());
        int hits = 0;
        double ap = 0.0;
        for (std::size_t r = 0; r < cand.size() && r < static_cast<std::size_t>(n); ++r) {
            if (te.count(cand[r].second)) {
                ++hits;
                ap += static_cast<double>(hits) / static_cast<double>(r + 1);
            }
        }
        out.recall += hits / denom;
        out.map += ap / denom;

        std::int64_t wins = 0, pairs = 0;
        for (std::uint32_t i : te) {
            for (std::uint32_t j = 0; j < m.n_items; ++j) {
                if (tr.count(j) || te.count(j)) continue;
                ++pairs;
                if (skewrec::score_pair(m, u, i, j) > 0.0) ++wins;
            }
        }
        if (pairs > 0) {
            macro += static_cast<double>(wins) / static_cast<double>(pairs);
            ++macro_users;
            wins_total += static_cast<double>(wins);
            pairs_total += static_cast<double>(pairs);
        }
    }
    out.recall /= static_cast<double>(users);
    out.map /= static_cast<double>(users);
    out.auc_macro = macro_users ? macro / static_cast<double>(macro_users) : 0.0;
    out.auc_micro = pairs_total > 0 ? wins_total / pairs_total : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// synthetic corpora

// Two user blocks, each preferring its own half of the item set; fully
// separable, so a trained model should push training AUC toward 1.
inline skewrec::Interactions block_corpus(std::uint32_t users_per_block = 25,
                                          std::uint32_t items_per_block = 20) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::uint32_t b = 0; b < 2; ++b) {
        for (std::uint32_t u = 0; u < users_per_block; ++u) {
            for (std::uint32_t i = 0; i < items_per_block; ++i) {
                pairs.emplace_back("u" + std::to_string(b * users_per_block + u),
                                   "i" + std::to_string(b * items_per_block + i));
            }
        }
    }
    return skewrec::build_interactions(pairs);
}

// Low-rank preference structure with rating noise, quantized to 1..5 stars.
// Shaped like a small ratings dataset: learnable but not separable.
inline std::vector<skewrec::RawInteraction> latent_ratings(std::uint32_t n_users,
                                                           std::uint32_t n_items,
                                                           std::uint32_t min_per_user,
                                                           std::uint32_t max_per_user,
                                                           std::uint64_t seed,
                                                           double noise_sd = 0.6) {
    const int rank = 8;
    std::mt19937_64 g(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> pu(static_cast<std::size_t>(n_users) * rank);
    std::vector<double> qi(static_cast<std::size_t>(n_items) * rank);
    const double s = 1.0 / std::sqrt(static_cast<double>(rank));
    for (auto& v : pu) v = nd(g) * s;
    for (auto& v : qi) v = nd(g) * s;

    std::vector<skewrec::RawInteraction> rows;
    std::vector<std::uint32_t> items(n_items);
    for (std::uint32_t i = 0; i < n_items; ++i) items[i] = i;
    for (std::uint32_t u = 0; u < n_users; ++u) {
        const std::uint32_t m =
            min_per_user + static_cast<std::uint32_t>(g() % (max_per_user - min_per_user + 1));
        std::shuffle(items.begin(), items.end(), g);
        for (std::uint32_t k = 0; k < m && k < n_items; ++k) {
            const std::uint32_t i = items[k];
            double affinity = 0.0;
            for (int r = 0; r < rank; ++r)
                affinity += pu[static_cast<std::size_t>(u) * rank + r] *
                            qi[static_cast<std::size_t>(i) * rank + r];
            const double raw = 3.55 + 2.2 * affinity + noise_sd * nd(g);
            const double stars = std::clamp(std::round(raw), 1.0, 5.0);
            rows.push_back({"u" + std::to_string(u), "i" + std::to_string(i), stars});
        }
    }
    return rows;
}

inline std::string interactions_to_tsv(const std::vector<skewrec::RawInteraction>& rows) {
    std::ostringstream os;
    for (const auto& r : rows) {
        os << r.user_key << "\t" << r.item_key << "\t" << r.value << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// finite-difference gradient oracle
//
// Random (model, triple, config) instances spanning eta in {1,3,5},
// xi in {0,5,11}, omega in {1,2,3}; the per-triple log-likelihood gradient
// with respect to every coordinate of theta_u, theta_i, theta_j is compared
// against central differences with step 1e-5. The config is unclipped
// (clip = 1e18) and lambda = 0. Instances are steered to a regime where the
// scalar gradient is well away from zero and from any clip, so the relative
// comparison is meaningful; coordinates whose gradient is below 1e-4 are
// held to the same tolerance against that floor (the step's own rounding
// noise is around 1e-10).

struct GradCheck {
    double max_rel_err = 0.0;
    int instances = 0;
};

inline GradCheck gradient_fd_check(int n_instances, std::uint64_t seed) {
    const int etas[] = {1, 3, 5};
    const double xis[] = {0.0, 5.0, 11.0};
    const double omegas[] = {1.0, 2.0, 3.0};
    const std::uint32_t d = 6;
    const double h = 1e-5;

    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    GradCheck out;

    for (int inst = 0; inst < n_instances; ++inst) {
        skewrec::SkewOptConfig cfg;
        cfg.eta = etas[g() % 3];
        cfg.xi = xis[g() % 3];
        cfg.omega = omegas[g() % 3];
        cfg.lambda = 0.0;
        cfg.clip = 1e18;

        skewrec::EmbeddingModel m;
        m.d = d;
        m.n_users = 1;
        m.n_items = 2;
        m.user_keys = {"u"};
        m.item_keys = {"i", "j"};
        m.user_vecs.resize(d);
        m.item_vecs.resize(2 * d);
        double xhat = 0.0;
        do {
            for (auto& v : m.user_vecs) v = unit(g);
            for (auto& v : m.item_vecs) v = unit(g);
            xhat = skewrec::score_pair(m, 0, 0, 1);
        } while (std::abs(xhat) < 0.5 || std::abs(xhat) > 12.0);

        // land z = (xhat - xi)/omega in +-[0.5, 1.6] by rescaling theta_u
        double zt = (0.5 + 1.1 * std::abs(unit(g)));
        if (unit(g) < 0.0) zt = -zt;
        const double target = cfg.xi + cfg.omega * zt;
        const double scale = target / xhat;
        for (auto& v : m.user_vecs) v *= scale;

        const auto objective_at = [&]() {
            return skewrec::log_likelihood(skewrec::score_pair(m, 0, 0, 1), cfg);
        };
        const double gval = skewrec::grad_pair(skewrec::score_pair(m, 0, 0, 1), cfg);
        ++out.instances;

        const auto check_coord = [&](double* coord, double analytic) {
            const double save = *coord;
            *coord = save + h;
            const double fp = objective_at();
            *coord = save - h;
            const double fm = objective_at();
            *coord = save;
            const double fd = (fp - fm) / (2.0 * h);
            const double rel =
                std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-4});
            out.max_rel_err = std::max(out.max_rel_err, rel);
        };

        for (std::uint32_t k = 0; k < d; ++k) {
            check_coord(&m.user_vecs[k], gval * (m.item_vecs[k] - m.item_vecs[d + k]));
            check_coord(&m.item_vecs[k], gval * m.user_vecs[k]);
            check_coord(&m.item_vecs[d + k], -gval * m.user_vecs[k]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// statistics helpers

// Kolmogorov-Smirnov one-sample test statistic; critical value at 1% is
// approximately 1.6276 / sqrt(n) for large n.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const double f = cdf(sample[k]);
        d = std::max(d, std::abs(f - static_cast<double>(k) / n));
        d = std::max(d, std::abs(static_cast<double>(k + 1) / n - f));
    }
    return d;
}

}  // namespace testsup

#include "skewrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "skewrec/rng.hpp"

namespace skewrec {

namespace {

std::vector<std::uint32_t> merge_sorted(const std::vector<std::uint32_t>& a,
                                        const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Indices of the n best candidates by (score desc, ID asc), skipping excluded.
std::vector<std::uint32_t> topn_from_scores(const std::vector<double>& scores,
                                            const std::vector<std::uint32_t>& exclude_sorted,
                                            std::size_t n) {
    std::vector<std::pair<double, std::uint32_t>> cand;
    cand.reserve(scores.size());
    for (std::uint32_t i = 0; i < scores.size(); ++i) {
        if (std::binary_search(exclude_sorted.begin(), exclude_sorted.end(), i)) continue;
        cand.emplace_back(scores[i], i);
    }
    const auto better = [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    };
    const std::size_t k = std::min(n, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), better);
    std::vector<std::uint32_t> out;
    out.reserve(k);
    for (std::size_t r = 0; r < k; ++r) out.push_back(cand[r].second);
    return out;
}

}  // namespace

EvalReport evaluate(const EmbeddingModel& m, const Interactions& train,
                    const Interactions& test, const EvalOptions& opts) {
    if (train.n_users != test.n_users || train.n_items != test.n_items)
        throw std::invalid_argument("evaluate: train/test dimension mismatch");
    if (m.n_users != train.n_users || m.n_items != train.n_items)
        throw std::invalid_argument("evaluate: model/split dimension mismatch");
    if (opts.n < 1) throw std::invalid_argument("evaluate: n must be >= 1");

    EvalReport rep;
    rep.n = opts.n;
    rep.auc_exact = m.n_items <= opts.exact_item_bound;
    rep.auc_negatives = rep.auc_exact ? 0 : opts.neg_samples;

    Rng rng(opts.seed);
    std::vector<double> scores(m.n_items);
    std::vector<double> neg_scores;

    double recall_sum = 0.0, ap_sum = 0.0;
    double macro_sum = 0.0;
    std::int64_t macro_users = 0;
    double micro_wins = 0.0, micro_pairs = 0.0;

    for (std::uint32_t u = 0; u < m.n_users; ++u) {
        const auto& test_u = test.pos[u];
        if (test_u.empty()) continue;
        ++rep.users_evaluated;
        const auto& train_u = train.pos[u];

        for (std::uint32_t i = 0; i < m.n_items; ++i) scores[i] = score(m, u, i);

        // recall@n / mAP@n over candidates not seen in training
        const auto ranked = topn_from_scores(scores, train_u, opts.n);
        const double denom = static_cast<double>(
            std::min<std::size_t>(opts.n, test_u.size()));
        std::int64_t hits = 0;
        double ap = 0.0;
        for (std::size_t r = 0; r < ranked.size(); ++r) {
            if (std::binary_search(test_u.begin(), test_u.end(), ranked[r])) {
                ++hits;
                ap += static_cast<double>(hits) / static_cast<double>(r + 1);
            }
        }
        recall_sum += static_cast<double>(hits) / denom;
        ap_sum += ap / denom;

        // AUC over (test positive, unobserved) pairs
        const auto observed = merge_sorted(train_u, test_u);
        const std::int64_t n_neg =
            static_cast<std::int64_t>(m.n_items) - static_cast<std::int64_t>(observed.size());
        if (n_neg <= 0) continue;

        std::int64_t wins = 0;
        std::int64_t pairs = 0;
        if (rep.auc_exact) {
            neg_scores.clear();
            for (std::uint32_t i = 0; i < m.n_items; ++i) {
                if (!std::binary_search(observed.begin(), observed.end(), i))
                    neg_scores.push_back(scores[i]);
            }
            std::sort(neg_scores.begin(), neg_scores.end());
            for (std::uint32_t i : test_u) {
                wins += std::lower_bound(neg_scores.begin(), neg_scores.end(), scores[i]) -
                        neg_scores.begin();
            }
            pairs = static_cast<std::int64_t>(test_u.size()) * n_neg;
        } else {
            for (int s = 0; s < opts.neg_samples; ++s) {
                std::uint32_t j;
                do {
                    j = static_cast<std::uint32_t>(uniform_below(rng, m.n_items));
                } while (std::binary_search(observed.begin(), observed.end(), j));
                for (std::uint32_t i : test_u)
                    if (scores[i] > scores[j]) ++wins;
            }
            pairs = static_cast<std::int64_t>(test_u.size()) * opts.neg_samples;
        }
        const double frac = static_cast<double>(wins) / static_cast<double>(pairs);
        macro_sum += frac;
        ++macro_users;
        // subsampled per-user fractions are weighted by the user's true pair
        // count so the pooled ratio stays unbiased
        const double true_pairs = static_cast<double>(test_u.size()) * static_cast<double>(n_neg);
        micro_wins += frac * true_pairs;
        micro_pairs += true_pairs;
    }

    if (rep.users_evaluated == 0) throw std::runtime_error("evaluate: no users with test items");
    rep.recall = recall_sum / static_cast<double>(rep.users_evaluated);
    rep.map = ap_sum / static_cast<double>(rep.users_evaluated);
    rep.auc_macro = macro_users > 0 ? macro_sum / static_cast<double>(macro_users) : 0.0;
    rep.auc_micro = micro_pairs > 0 ? micro_wins / micro_pairs : 0.0;
    return rep;
}

double recall_at_n(const EmbeddingModel& m, const Interactions& train, const Interactions& test,
                   int n) {
    EvalOptions o;
    o.n = n;
    return evaluate(m, train, test, o).recall;
}

double map_at_n(const EmbeddingModel& m, const Interactions& train, const Interactions& test,
                int n) {
    EvalOptions o;
    o.n = n;
    return evaluate(m, train, test, o).map;
}

double auc_macro(const EmbeddingModel& m, const Interactions& train, const Interactions& test,
                 const EvalOptions& opts) {
    return evaluate(m, train, test, opts).auc_macro;
}

double auc_micro(const EmbeddingModel& m, const Interactions& train, const Interactions& test,
                 const EvalOptions& opts) {
    return evaluate(m, train, test, opts).auc_micro;
}

}  // namespace skewrec

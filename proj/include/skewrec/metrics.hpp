#pragma once

#include <cstdint>

#include "skewrec/corpus.hpp"
#include "skewrec/embed.hpp"

namespace skewrec {

struct EvalOptions {
    int n = 10;
    // Enumerate every negative when the item set is at most this large;
    // otherwise sample neg_samples negatives per user.
    std::int64_t exact_item_bound = 20000;
    int neg_samples = 1000;
    std::uint64_t seed = 0;
};

struct EvalReport {
    int n = 10;
    double recall = 0.0;
    double map = 0.0;
    double auc_macro = 0.0;
    double auc_micro = 0.0;
    std::int64_t users_evaluated = 0;  // users with a non-empty test set
    bool auc_exact = true;
    std::int64_t auc_negatives = 0;  // sampled negatives per user (0 in exact mode)
};

// Top-N metrics rank all items a user has not interacted with in training;
// per-user recall and average precision normalize by min(n, |test_u|). AUC
// counts (test positive, unobserved item) pairs with a strictly positive
// score difference; ties are misses. Users without test items are skipped.
EvalReport evaluate(const EmbeddingModel& m, const Interactions& train,
                    const Interactions& test, const EvalOptions& opts = {});

double recall_at_n(const EmbeddingModel& m, const Interactions& train, const Interactions& test,
                   int n);
double map_at_n(const EmbeddingModel& m, const Interactions& train, const Interactions& test,
                int n);
double auc_macro(const EmbeddingModel& m, const Interactions& train, const Interactions& test,
                 const EvalOptions& opts = {});
double auc_micro(const EmbeddingModel& m, const Interactions& train, const Interactions& test,
                 const EvalOptions& opts = {});

}  // namespace skewrec

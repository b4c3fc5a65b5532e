#pragma once

#include <cstdint>
#include <vector>

#include "skewrec/corpus.hpp"
#include "skewrec/rng.hpp"

namespace skewrec {

// Training instance: user u prefers item i over item j.
struct Triple {
    std::uint32_t u;
    std::uint32_t i;
    std::uint32_t j;
};

// Draws (u, i, j) with u uniform over users that have at least one positive
// and at least one negative, i uniform over the user's positives, and j by
// uniform rejection from the item set until j is not a positive.
//
// One sampler per worker thread; no shared state between instances.
class TripleSampler {
  public:
    TripleSampler(const Interactions& train, std::uint64_t seed);

    Triple sample();

    // |S|: total positive pairs; one epoch = this many sampled triples.
    static std::int64_t epoch_size(const Interactions& train);

  private:
    const Interactions* train_;
    Rng rng_;
    std::vector<std::uint32_t> eligible_;
};

}  // namespace skewrec

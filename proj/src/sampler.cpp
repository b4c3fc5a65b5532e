#include "skewrec/sampler.hpp"

#include <stdexcept>

namespace skewrec {

TripleSampler::TripleSampler(const Interactions& train, std::uint64_t seed)
    : train_(&train), rng_(seed) {
    for (std::uint32_t u = 0; u < train.n_users; ++u) {
        const std::size_t np = train.pos[u].size();
        if (np >= 1 && np < train.n_items) eligible_.push_back(u);
    }
    if (eligible_.empty()) {
        throw std::runtime_error(
            "TripleSampler: no user has both a positive and a negative item");
    }
}

Triple TripleSampler::sample() {
    const std::uint32_t u = eligible_[uniform_below(rng_, eligible_.size())];
    const auto& pos = train_->pos[u];
    const std::uint32_t i = pos[uniform_below(rng_, pos.size())];
    std::uint32_t j;
    do {
        j = static_cast<std::uint32_t>(uniform_below(rng_, train_->n_items));
    } while (train_->has(u, j));
    return {u, i, j};
}

std::int64_t TripleSampler::epoch_size(const Interactions& train) {
    const std::int64_t n = train.pair_count();
    if (n == 0) throw std::runtime_error("epoch_size: training set has no positive pairs");
    return n;
}

}  // namespace skewrec

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "skewrec/corpus.hpp"

namespace skewrec {

// The full parameter matrix: one d-vector per user and per item, stored
// row-major, plus the ID maps of the corpus the model was built for.
//
// Scoring is read-only and thread-safe. During training the trainer mutates
// entries concurrently (see skewopt.hpp); anything that reads scores for
// evaluation must run on a quiesced model.
struct EmbeddingModel {
    std::uint32_t d = 0;
    std::uint32_t n_users = 0;
    std::uint32_t n_items = 0;
    std::vector<double> user_vecs;  // n_users * d
    std::vector<double> item_vecs;  // n_items * d
    std::vector<std::string> user_keys;
    std::vector<std::string> item_keys;

    std::span<const double> user_row(std::uint32_t u) const {
        return {user_vecs.data() + static_cast<std::size_t>(u) * d, d};
    }
    std::span<const double> item_row(std::uint32_t i) const {
        return {item_vecs.data() + static_cast<std::size_t>(i) * d, d};
    }
    std::span<double> user_row(std::uint32_t u) {
        return {user_vecs.data() + static_cast<std::size_t>(u) * d, d};
    }
    std::span<double> item_row(std::uint32_t i) {
        return {item_vecs.data() + static_cast<std::size_t>(i) * d, d};
    }

    std::unordered_map<std::string, std::uint32_t> user_lookup() const;
    std::unordered_map<std::string, std::uint32_t> item_lookup() const;
};

// Entries i.i.d. uniform on [-0.5/sqrt(d), +0.5/sqrt(d)]; deterministic per seed.
EmbeddingModel init_model(std::uint32_t n_users, std::uint32_t n_items, std::uint32_t d,
                          std::uint64_t seed);
EmbeddingModel init_model(const Interactions& data, std::uint32_t d, std::uint64_t seed);

double score(const EmbeddingModel& m, std::uint32_t u, std::uint32_t i);

// x_uij = score(u, i) - score(u, j).
double score_pair(const EmbeddingModel& m, std::uint32_t u, std::uint32_t i, std::uint32_t j);

// Top n items by score, descending, ties broken by ascending item ID.
// `exclude_sorted` must be sorted; excluded items never appear.
std::vector<std::uint32_t> top_n(const EmbeddingModel& m, std::uint32_t u, std::size_t n,
                                 std::span<const std::uint32_t> exclude_sorted);

// Binary format: magic "SKEWREC1"; d, n_users, n_items as u64 LE; user then
// item keys, each u64 LE length + UTF-8 bytes; user rows then item rows as
// f64 LE, row-major. load(save(m)) is bit-exact.
void save_model(const EmbeddingModel& m, const std::string& path);
EmbeddingModel load_model(const std::string& path);

}  // namespace skewrec

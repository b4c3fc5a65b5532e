#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace skewrec {

// One parsed input row: (user, item, value) where value is a rating, a count,
// or 1.0 for already-binary data.
struct RawInteraction {
    std::string user_key;
    std::string item_key;
    double value = 0.0;
};

enum class BinarizeMode { rating, count, binary };

struct TsvSchema {
    char delimiter = '\t';
    bool has_header = false;
};

// Implicit-feedback interactions with dense contiguous IDs. pos[u] is the
// sorted, duplicate-free list of positive items for user u.
struct Interactions {
    std::uint32_t n_users = 0;
    std::uint32_t n_items = 0;
    std::vector<std::vector<std::uint32_t>> pos;
    std::vector<std::string> user_keys;  // ID -> original key
    std::vector<std::string> item_keys;
    std::unordered_map<std::string, std::uint32_t> user_ids;  // key -> ID
    std::unordered_map<std::string, std::uint32_t> item_ids;

    std::int64_t pair_count() const;
    bool has(std::uint32_t u, std::uint32_t i) const;

    // Same dimensions and ID maps, no positives.
    Interactions empty_copy() const;
};

struct SplitPair {
    Interactions train;
    Interactions test;
    std::uint64_t seed = 0;
};

std::vector<RawInteraction> load_tsv(const std::string& path, const TsvSchema& schema);

// rating: keep value >= threshold; count: keep value > threshold; binary: keep all.
std::vector<std::pair<std::string, std::string>> binarize(
    const std::vector<RawInteraction>& raw, BinarizeMode mode, double threshold);

// Deduplicates, assigns IDs in first-appearance order, sorts per-user lists.
Interactions build_interactions(const std::vector<std::pair<std::string, std::string>>& pairs);

// Per-pair Bernoulli(test_fraction) assignment. A user whose train side would
// come out empty keeps all items in train instead.
SplitPair split(const Interactions& data, double test_fraction, std::uint64_t seed);

// Builds interactions against an existing ID space (key lists in ID order).
// Unknown keys are errors; users may end up with empty positive lists.
Interactions build_with_maps(const std::vector<std::pair<std::string, std::string>>& pairs,
                             const std::vector<std::string>& user_keys,
                             const std::vector<std::string>& item_keys);

}  // namespace skewrec

#include "skewrec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "skewrec/rng.hpp"

namespace skewrec {

std::int64_t Interactions::pair_count() const {
    std::int64_t n = 0;
    for (const auto& p : pos) n += static_cast<std::int64_t>(p.size());
    return n;
}

bool Interactions::has(std::uint32_t u, std::uint32_t i) const {
    const auto& p = pos[u];
    return std::binary_search(p.begin(), p.end(), i);
}

Interactions Interactions::empty_copy() const {
    Interactions out = *this;
    out.pos.assign(n_users, {});
    return out;
}

namespace {

void split_fields(const std::string& line, char delim, std::vector<std::string>& out) {
    out.clear();
    std::size_t start = 0;
    for (;;) {
        const std::size_t end = line.find(delim, start);
        if (end == std::string::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, end - start));
        start = end + 1;
    }
}

bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

std::vector<RawInteraction> load_tsv(const std::string& path, const TsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open interaction file: " + path);

    std::vector<RawInteraction> rows;
    std::vector<std::string> fields;
    std::string line;
    std::int64_t lineno = 0;
    bool skipped_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (schema.has_header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        split_fields(line, schema.delimiter, fields);
        if (fields.size() < 3) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected at least 3 fields, got " +
                                     std::to_string(fields.size()));
        }
        double value = 0.0;
        if (fields[0].empty() || fields[1].empty()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": empty user or item key");
        }
        if (!parse_double(fields[2], value) || !std::isfinite(value)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": cannot parse value '" + fields[2] + "'");
        }
        rows.push_back({fields[0], fields[1], value});
    }
    if (rows.empty()) throw std::runtime_error("no interaction rows in " + path);
    return rows;
}

std::vector<std::pair<std::string, std::string>> binarize(
    const std::vector<RawInteraction>& raw, BinarizeMode mode, double threshold) {
    if (!std::isfinite(threshold)) throw std::invalid_argument("binarize: non-finite threshold");
    std::vector<std::pair<std::string, std::string>> kept;
    kept.reserve(raw.size());
    for (const auto& r : raw) {
        bool keep = false;
        switch (mode) {
            case BinarizeMode::rating: keep = r.value >= threshold; break;
            case BinarizeMode::count: keep = r.value > threshold; break;
            case BinarizeMode::binary: keep = true; break;
        }
        if (keep) kept.emplace_back(r.user_key, r.item_key);
    }
    return kept;
}

Interactions build_interactions(const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("build_interactions: no pairs");

    Interactions out;
    for (const auto& [ukey, ikey] : pairs) {
        auto [uit, unew] = out.user_ids.try_emplace(ukey, out.n_users);
        if (unew) {
            out.user_keys.push_back(ukey);
            out.pos.emplace_back();
            ++out.n_users;
        }
        auto [iit, inew] = out.item_ids.try_emplace(ikey, out.n_items);
        if (inew) {
            out.item_keys.push_back(ikey);
            ++out.n_items;
        }
        out.pos[uit->second].push_back(iit->second);
    }
    for (auto& p : out.pos) {
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
    }
    return out;
}

Interactions build_with_maps(const std::vector<std::pair<std::string, std::string>>& pairs,
                             const std::vector<std::string>& user_keys,
                             const std::vector<std::string>& item_keys) {
    Interactions out;
    out.n_users = static_cast<std::uint32_t>(user_keys.size());
    out.n_items = static_cast<std::uint32_t>(item_keys.size());
    out.user_keys = user_keys;
    out.item_keys = item_keys;
    for (std::uint32_t u = 0; u < out.n_users; ++u) out.user_ids.emplace(user_keys[u], u);
    for (std::uint32_t i = 0; i < out.n_items; ++i) out.item_ids.emplace(item_keys[i], i);
    out.pos.assign(out.n_users, {});
    for (const auto& [ukey, ikey] : pairs) {
        const auto uit = out.user_ids.find(ukey);
        if (uit == out.user_ids.end())
            throw std::runtime_error("user key not in ID map: " + ukey);
        const auto iit = out.item_ids.find(ikey);
        if (iit == out.item_ids.end())
            throw std::runtime_error("item key not in ID map: " + ikey);
        out.pos[uit->second].push_back(iit->second);
    }
    for (auto& p : out.pos) {
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
    }
    return out;
}

SplitPair split(const Interactions& data, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("split: test_fraction must be in (0, 1)");
    }

    SplitPair out;
    out.seed = seed;
    out.train = data.empty_copy();
    out.test = data.empty_copy();

    Rng rng(seed);
    for (std::uint32_t u = 0; u < data.n_users; ++u) {
        auto& tr = out.train.pos[u];
        auto& te = out.test.pos[u];
        for (std::uint32_t i : data.pos[u]) {
            if (uniform_unit(rng) < test_fraction) {
                te.push_back(i);
            } else {
                tr.push_back(i);
            }
        }
        if (tr.empty() && !te.empty()) {
            tr = std::move(te);
            te.clear();
        }
    }
    return out;
}

}  // namespace skewrec

#include "skewrec/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "skewrec/io_util.hpp"
#include "skewrec/rng.hpp"

namespace skewrec {

std::unordered_map<std::string, std::uint32_t> EmbeddingModel::user_lookup() const {
    std::unordered_map<std::string, std::uint32_t> m;
    m.reserve(user_keys.size());
    for (std::uint32_t u = 0; u < user_keys.size(); ++u) m.emplace(user_keys[u], u);
    return m;
}

std::unordered_map<std::string, std::uint32_t> EmbeddingModel::item_lookup() const {
    std::unordered_map<std::string, std::uint32_t> m;
    m.reserve(item_keys.size());
    for (std::uint32_t i = 0; i < item_keys.size(); ++i) m.emplace(item_keys[i], i);
    return m;
}

EmbeddingModel init_model(std::uint32_t n_users, std::uint32_t n_items, std::uint32_t d,
                          std::uint64_t seed) {
    if (n_users == 0 || n_items == 0) throw std::invalid_argument("init_model: empty user or item set");
    if (d < 1) throw std::invalid_argument("init_model: d must be >= 1");

    EmbeddingModel m;
    m.d = d;
    m.n_users = n_users;
    m.n_items = n_items;
    const double bound = 0.5 / std::sqrt(static_cast<double>(d));
    Rng rng(seed);
    m.user_vecs.resize(static_cast<std::size_t>(n_users) * d);
    m.item_vecs.resize(static_cast<std::size_t>(n_items) * d);
    for (double& v : m.user_vecs) v = uniform_range(rng, -bound, bound);
    for (double& v : m.item_vecs) v = uniform_range(rng, -bound, bound);
    m.user_keys.resize(n_users);
    m.item_keys.resize(n_items);
    for (std::uint32_t u = 0; u < n_users; ++u) m.user_keys[u] = std::to_string(u);
    for (std::uint32_t i = 0; i < n_items; ++i) m.item_keys[i] = std::to_string(i);
    return m;
}

EmbeddingModel init_model(const Interactions& data, std::uint32_t d, std::uint64_t seed) {
    EmbeddingModel m = init_model(data.n_users, data.n_items, d, seed);
    m.user_keys = data.user_keys;
    m.item_keys = data.item_keys;
    return m;
}

double score(const EmbeddingModel& m, std::uint32_t u, std::uint32_t i) {
    if (u >= m.n_users) throw std::out_of_range("score: user ID out of range");
    if (i >= m.n_items) throw std::out_of_range("score: item ID out of range");
    const double* a = m.user_vecs.data() + static_cast<std::size_t>(u) * m.d;
    const double* b = m.item_vecs.data() + static_cast<std::size_t>(i) * m.d;
    double s = 0.0;
    for (std::uint32_t k = 0; k < m.d; ++k) s += a[k] * b[k];
    return s;
}

double score_pair(const EmbeddingModel& m, std::uint32_t u, std::uint32_t i, std::uint32_t j) {
    return score(m, u, i) - score(m, u, j);
}

std::vector<std::uint32_t> top_n(const EmbeddingModel& m, std::uint32_t u, std::size_t n,
                                 std::span<const std::uint32_t> exclude_sorted) {
    if (u >= m.n_users) throw std::out_of_range("top_n: user ID out of range");
    if (n < 1) throw std::invalid_argument("top_n: n must be >= 1");

    std::vector<std::pair<double, std::uint32_t>> cand;
    cand.reserve(m.n_items);
    for (std::uint32_t i = 0; i < m.n_items; ++i) {
        if (std::binary_search(exclude_sorted.begin(), exclude_sorted.end(), i)) continue;
        cand.emplace_back(score(m, u, i), i);
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

namespace {

constexpr char kMagic[8] = {'S', 'K', 'E', 'W', 'R', 'E', 'C', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    detail::store_le64(v, buf);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

void put_keys(std::ostream& os, const std::vector<std::string>& keys) {
    for (const auto& k : keys) {
        put_u64(os, k.size());
        os.write(k.data(), static_cast<std::streamsize>(k.size()));
    }
}

void put_doubles(std::ostream& os, const std::vector<double>& v) {
    unsigned char buf[8];
    for (double x : v) {
        detail::store_le_double(x, buf);
        os.write(reinterpret_cast<const char*>(buf), 8);
    }
}

std::uint64_t get_u64(std::istream& is, const char* what) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    if (is.gcount() != 8) throw std::runtime_error(std::string("model file truncated reading ") + what);
    return detail::load_le64(buf);
}

std::string get_key(std::istream& is) {
    const std::uint64_t len = get_u64(is, "key length");
    if (len > (1u << 20)) throw std::runtime_error("model file: implausible key length");
    std::string s(len, '\0');
    is.read(s.data(), static_cast<std::streamsize>(len));
    if (static_cast<std::uint64_t>(is.gcount()) != len)
        throw std::runtime_error("model file truncated reading key");
    return s;
}

}  // namespace

void save_model(const EmbeddingModel& m, const std::string& path) {
    atomic_write_file(path, [&](std::ostream& os) {
        os.write(kMagic, 8);
        put_u64(os, m.d);
        put_u64(os, m.n_users);
        put_u64(os, m.n_items);
        put_keys(os, m.user_keys);
        put_keys(os, m.item_keys);
        put_doubles(os, m.user_vecs);
        put_doubles(os, m.item_vecs);
    });
}

EmbeddingModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open model file: " + path);

    char magic[8];
    is.read(magic, 8);
    if (is.gcount() != 8 || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a model file (bad magic): " + path);

    EmbeddingModel m;
    const std::uint64_t d = get_u64(is, "d");
    const std::uint64_t n_users = get_u64(is, "n_users");
    const std::uint64_t n_items = get_u64(is, "n_items");
    if (d < 1 || n_users < 1 || n_items < 1 || d > (1u << 20) || n_users > UINT32_MAX ||
        n_items > UINT32_MAX)
        throw std::runtime_error("model file: invalid header dimensions");
    m.d = static_cast<std::uint32_t>(d);
    m.n_users = static_cast<std::uint32_t>(n_users);
    m.n_items = static_cast<std::uint32_t>(n_items);

    m.user_keys.reserve(m.n_users);
    for (std::uint32_t u = 0; u < m.n_users; ++u) m.user_keys.push_back(get_key(is));
    m.item_keys.reserve(m.n_items);
    for (std::uint32_t i = 0; i < m.n_items; ++i) m.item_keys.push_back(get_key(is));

    const auto read_matrix = [&](std::vector<double>& v, std::size_t count) {
        v.resize(count);
        unsigned char buf[8];
        for (std::size_t k = 0; k < count; ++k) {
            is.read(reinterpret_cast<char*>(buf), 8);
            if (is.gcount() != 8)
                throw std::runtime_error("model file truncated: payload shorter than header dimensions");
            v[k] = detail::load_le_double(buf);
        }
    };
    read_matrix(m.user_vecs, static_cast<std::size_t>(m.n_users) * m.d);
    read_matrix(m.item_vecs, static_cast<std::size_t>(m.n_items) * m.d);

    // Trailing bytes mean the header dimensions disagree with the payload.
    is.peek();
    if (!is.eof()) throw std::runtime_error("model file: payload longer than header dimensions");
    return m;
}

}  // namespace skewrec

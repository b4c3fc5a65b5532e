#include "skewrec/skewstats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "skewrec/rng.hpp"
#include "skewrec/sampler.hpp"

namespace skewrec {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2 pi)
constexpr double kTwoPi = 6.2831853071795864769;

void check_params(const SkewNormalParams& p) {
    if (!(std::isfinite(p.xi) && std::isfinite(p.alpha) && std::isfinite(p.omega) &&
          p.omega > 0.0))
        throw std::invalid_argument("skew normal params: omega must be > 0 and all finite");
}

// Adaptive Simpson with error pushed well below the callers' stated
// tolerances; depth-limited so pathological inputs terminate.
double adapt(const std::function<double(double)>& f, double a, double fa, double m, double fm,
             double b, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adapt(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

// Seeds the recursion with `panels` equal segments so narrow features cannot
// slip between the first sample points and fake convergence.
double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int panels = 16) {
    if (a == b) return 0.0;
    const double w = (b - a) / panels;
    const double ptol = tol / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + p * w;
        const double pb = p + 1 == panels ? b : pa + w;
        const double m = 0.5 * (pa + pb);
        const double fa = f(pa);
        const double fb = f(pb);
        const double fm = f(m);
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += adapt(f, pa, fa, m, fm, pb, fb, whole, ptol, 48);
    }
    return total;
}

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double owen_t(double h, double a) {
    if (std::isnan(h) || std::isnan(a)) throw std::invalid_argument("owen_t: NaN argument");
    if (a == 0.0) return 0.0;
    const double sign = a > 0.0 ? 1.0 : -1.0;
    const double hh = 0.5 * h * h;
    // x = tan(theta) turns the integral into one of a bounded smooth
    // function over [0, atan|a|], which also covers a = infinity.
    if (hh == 0.0) return sign * std::atan(std::abs(a)) / kTwoPi;
    const double hi = std::atan(std::abs(a));
    const auto f = [hh](double theta) {
        const double c = std::cos(theta);
        const double sec2 = 1.0 / (c * c);
        return std::exp(-hh * sec2);
    };
    return sign * integrate(f, 0.0, hi, 1e-13) / kTwoPi;
}

double sn_pdf(const SkewNormalParams& p, double x) {
    check_params(p);
    const double z = (x - p.xi) / p.omega;
    return 2.0 / p.omega * norm_pdf(z) * norm_cdf(p.alpha * z);
}

double sn_cdf(const SkewNormalParams& p, double x) {
    check_params(p);
    const double z = (x - p.xi) / p.omega;
    const double v = norm_cdf(z) - 2.0 * owen_t(z, p.alpha);
    return std::clamp(v, 0.0, 1.0);
}

double sn_skewness(double alpha) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("sn_skewness: non-finite alpha");
    const double delta = alpha / std::sqrt(1.0 + alpha * alpha);
    const double m = delta * std::sqrt(2.0 / M_PI);  // mean of the standardized variate
    return (4.0 - M_PI) / 2.0 * (m * m * m) / std::pow(1.0 - m * m, 1.5);
}

namespace {

double ipow_n(double z, int n) {
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

}  // namespace

double sn_moment(int eta, double alpha) {
    if (eta < 0) throw std::invalid_argument("sn_moment: eta must be >= 0");
    if (!std::isfinite(alpha)) throw std::invalid_argument("sn_moment: non-finite alpha");
    const auto f = [eta, alpha](double z) {
        return ipow_n(z, eta) * 2.0 * norm_pdf(z) * norm_cdf(alpha * z);
    };
    return integrate(f, -12.0, 12.0, 1e-11, 24);
}

double sn_moment_dalpha(int eta, double alpha) {
    if (eta < 0) throw std::invalid_argument("sn_moment_dalpha: eta must be >= 0");
    if (!std::isfinite(alpha)) throw std::invalid_argument("sn_moment_dalpha: non-finite alpha");
    const auto f = [eta, alpha](double z) {
        return ipow_n(z, eta + 1) * 2.0 * norm_pdf(z) * norm_pdf(alpha * z);
    };
    return integrate(f, -12.0, 12.0, 1e-11, 24);
}

double sn_prob_positive(const SkewNormalParams& p) { return 1.0 - sn_cdf(p, 0.0); }

double sample_skewness(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("sample_skewness: need at least 2 values");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        const double c = v - mean;
        m2 += c * c;
        m3 += c * c * c;
    }
    m2 /= n;
    m3 /= n;
    if (m2 <= 0.0) throw std::invalid_argument("sample_skewness: zero variance");
    return m3 / std::pow(m2, 1.5);
}

Histogram make_histogram(std::span<const double> values, int bins) {
    if (values.empty()) throw std::invalid_argument("make_histogram: empty sample");
    if (bins < 1) throw std::invalid_argument("make_histogram: bins must be >= 1");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) {  // constant sample still gets a valid bin range
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.edges.resize(bins + 1);
    const double w = (hi - lo) / bins;
    for (int k = 0; k <= bins; ++k) h.edges[k] = lo + w * k;
    h.edges[bins] = hi;
    h.counts.assign(bins, 0);
    for (double v : values) {
        auto idx = static_cast<std::int64_t>((v - lo) / w);
        idx = std::clamp<std::int64_t>(idx, 0, bins - 1);
        ++h.counts[idx];
    }
    return h;
}

EstimatorSample collect_estimator(const EmbeddingModel& m, const Interactions& train,
                                  std::int64_t n_triples, std::uint64_t seed) {
    if (n_triples < 1) throw std::invalid_argument("collect_estimator: n_triples must be >= 1");
    TripleSampler sampler(train, seed);
    EstimatorSample out;
    out.values.reserve(n_triples);
    for (std::int64_t k = 0; k < n_triples; ++k) {
        const Triple t = sampler.sample();
        out.values.push_back(score_pair(m, t.u, t.i, t.j));
    }
    out.skewness = sample_skewness(out.values);
    out.hist = make_histogram(out.values, 100);
    return out;
}

std::vector<double> sample_skew_normal(const SkewNormalParams& p, std::int64_t n,
                                       std::uint64_t seed) {
    check_params(p);
    if (n < 1) throw std::invalid_argument("sample_skew_normal: n must be >= 1");
    const double delta = p.alpha / std::sqrt(1.0 + p.alpha * p.alpha);
    const double rest = std::sqrt(1.0 - delta * delta);
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::int64_t k = 0; k < n; ++k) {
        const auto [z0, z1] = normal_pair(rng);
        out.push_back(p.xi + p.omega * (delta * std::abs(z0) + rest * z1));
    }
    return out;
}

void write_histogram(std::ostream& os, const EstimatorSample& sample,
                     const std::vector<std::pair<std::string, std::string>>& header_kv) {
    os.precision(10);
    for (const auto& [k, v] : header_kv) os << "# " << k << "\t" << v << "\n";
    os << "# sample_skewness\t" << sample.skewness << "\n";
    os << "# n_values\t" << sample.values.size() << "\n";
    const auto& h = sample.hist;
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        os << h.edges[b] << "\t" << h.edges[b + 1] << "\t" << h.counts[b] << "\n";
}

void write_pdf_curve(std::ostream& os, const SkewNormalParams& p, double lo, double hi,
                     int points) {
    check_params(p);
    if (points < 2) throw std::invalid_argument("write_pdf_curve: need at least 2 points");
    os.precision(10);
    os << "# xi\t" << p.xi << "\n# omega\t" << p.omega << "\n# alpha\t" << p.alpha << "\n";
    const double step = (hi - lo) / (points - 1);
    for (int k = 0; k < points; ++k) {
        const double x = lo + step * k;
        os << x << "\t" << sn_pdf(p, x) << "\n";
    }
}

}  // namespace skewrec

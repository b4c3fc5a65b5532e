#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skewrec/corpus.hpp"
#include "skewrec/embed.hpp"

namespace skewrec {

// Skew normal distribution: location xi, scale omega > 0, shape alpha.
struct SkewNormalParams {
    double xi = 0.0;
    double omega = 1.0;
    double alpha = 0.0;
};

// Standard normal density and CDF (CDF via erfc, |error| < 1e-14).
double norm_pdf(double x);
double norm_cdf(double x);

// Owen's T function
//   T(h, a) = (1/2pi) * integral_0^a exp(-h^2 (1+x^2)/2) / (1+x^2) dx,
// evaluated by adaptive quadrature of the defining integral under the
// substitution x = tan(theta); |error| < 1e-10. Infinite `a` is supported
// (the substitution maps it to a finite endpoint).
double owen_t(double h, double a);

// Density (2/omega) phi(z) Phi(alpha z) with z = (x - xi)/omega.
double sn_pdf(const SkewNormalParams& p, double x);

// CDF Phi(z) - 2 T(z, alpha), clamped to [0, 1] against rounding.
double sn_cdf(const SkewNormalParams& p, double x);

// Skewness of the skew normal as a function of the shape parameter alone.
double sn_skewness(double alpha);

// kappa(alpha) = E[z^eta] for standardized z = (X - xi)/omega, X skew normal
// with shape alpha; quadrature over [-12, 12], |error| < 1e-8.
double sn_moment(int eta, double alpha);

// d kappa / d alpha: quadrature of 2 z^(eta+1) phi(z) phi(alpha z);
// strictly positive for odd eta.
double sn_moment_dalpha(int eta, double alpha);

// P(X > 0) = 1 - F(0), the closed form the micro-averaged pairwise ranking
// accuracy takes when the estimator is skew normal.
double sn_prob_positive(const SkewNormalParams& p);

// Third standardized sample moment m3 / m2^(3/2); throws on zero variance.
double sample_skewness(std::span<const double> values);

struct Histogram {
    std::vector<double> edges;       // size bins + 1, contiguous
    std::vector<std::int64_t> counts;  // size bins, sums to the sample size
};

Histogram make_histogram(std::span<const double> values, int bins);

// Realized estimator values x_uij over sampled training triples.
struct EstimatorSample {
    std::vector<double> values;
    double skewness = 0.0;
    Histogram hist;
};

// Samples n_triples triples from the training set (seeded, deterministic),
// scores each with the model, and summarizes the distribution (100 bins).
EstimatorSample collect_estimator(const EmbeddingModel& m, const Interactions& train,
                                  std::int64_t n_triples, std::uint64_t seed);

// Draws via delta |z0| + sqrt(1 - delta^2) z1 with z0, z1 standard normal.
std::vector<double> sample_skew_normal(const SkewNormalParams& p, std::int64_t n,
                                       std::uint64_t seed);

// Text exports: `# key<TAB>value` comment header, then one row per bin/point.
void write_histogram(std::ostream& os, const EstimatorSample& sample,
                     const std::vector<std::pair<std::string, std::string>>& header_kv = {});
void write_pdf_curve(std::ostream& os, const SkewNormalParams& p, double lo, double hi,
                     int points);

}  // namespace skewrec

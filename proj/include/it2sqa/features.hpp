#pragma once

#include "it2sqa/signal.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace it2sqa::features {

inline constexpr std::size_t kDimension = 4;
inline constexpr std::size_t kEntropyBins = 16;

// Fixed feature order: skewness, excess kurtosis, histogram entropy (bits),
// zero-crossing rate of the mean-removed window.
inline constexpr std::array<std::string_view, kDimension> kFeatureNames{
    "skewness", "excess_kurtosis", "shannon_entropy", "zero_crossing_rate"};

inline constexpr std::string_view kFeatureSetId = "time_domain_v1";

struct FeatureVector {
    std::vector<double> values;
    std::string subject_id;
    std::size_t window_index = 0;

    std::size_t dimension() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

struct LabelledVector {
    FeatureVector x;
    ClassLabel label = ClassLabel::Clean;
};

FeatureVector extract_features(std::span<const double> samples);
FeatureVector extract_features(const signal::PpgWindow& window);

struct FeatureStats {
    std::size_t n_terms = 0;
    std::vector<std::vector<double>> breakpoints;  // per feature, n_terms - 1 values
    std::vector<double> min;
    std::vector<double> max;
    std::vector<bool> degenerate;  // breakpoints collapsed before widening

    std::size_t dimension() const { return min.size(); }
};

// Equal-frequency breakpoints at the j/n_terms quantiles (linear interpolation
// between order statistics). Collapsed breakpoints are flagged and widened
// symmetrically so the returned sequences are always strictly increasing.
FeatureStats fit_feature_stats(std::span<const FeatureVector> train, std::size_t n_terms);
FeatureStats fit_feature_stats(std::span<const LabelledVector> train, std::size_t n_terms);

// Linear-interpolation quantile of already sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace it2sqa::features

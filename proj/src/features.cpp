#include "it2sqa/features.hpp"

#include <algorithm>
#include <cmath>

namespace it2sqa::features {

FeatureVector extract_features(std::span<const double> x) {
    FeatureVector fv;
    fv.values.assign(kDimension, 0.0);
    const std::size_t n = x.size();
    if (n == 0) return fv;

    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) return fv;  // constant window

    const double dn = static_cast<double>(n);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= dn;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= dn;
    m3 /= dn;
    m4 /= dn;
    if (!(m2 > 0.0)) return fv;

    fv.values[0] = m3 / std::pow(m2, 1.5);
    fv.values[1] = m4 / (m2 * m2) - 3.0;

    std::array<std::size_t, kEntropyBins> hist{};
    const double range = hi - lo;
    for (double v : x) {
        auto bin = static_cast<std::size_t>((v - lo) / range * static_cast<double>(kEntropyBins));
        hist[std::min(bin, kEntropyBins - 1)]++;
    }
    double entropy = 0.0;
    for (std::size_t c : hist) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / dn;
        entropy -= p * std::log2(p);
    }
    fv.values[2] = entropy;

    std::size_t crossings = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const bool prev_neg = x[i - 1] - mean < 0.0;
        const bool cur_neg = x[i] - mean < 0.0;
        if (prev_neg != cur_neg) ++crossings;
    }
    fv.values[3] = n > 1 ? static_cast<double>(crossings) / static_cast<double>(n - 1) : 0.0;
    return fv;
}

FeatureVector extract_features(const signal::PpgWindow& window) {
    FeatureVector fv = extract_features(std::span<const double>(window.samples));
    fv.subject_id = window.subject_id;
    fv.window_index = window.window_index;
    return fv;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ValidationError("quantile of empty sequence");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

FeatureStats fit_feature_stats(std::span<const FeatureVector> train, std::size_t n_terms) {
    if (train.empty()) throw ValidationError("cannot fit feature statistics on an empty set");
    if (n_terms < 2) throw ValidationError("need at least two linguistic terms");
    const std::size_t dim = train.front().dimension();
    for (const auto& fv : train)
        if (fv.dimension() != dim) throw ValidationError("inconsistent feature dimensions in training set");

    FeatureStats st;
    st.n_terms = n_terms;
    st.breakpoints.resize(dim);
    st.min.resize(dim);
    st.max.resize(dim);
    st.degenerate.assign(dim, false);

    std::vector<double> col(train.size());
    for (std::size_t f = 0; f < dim; ++f) {
        for (std::size_t i = 0; i < train.size(); ++i) col[i] = train[i][f];
        std::sort(col.begin(), col.end());
        double lo = col.front();
        double hi = col.back();

        std::vector<double> bp(n_terms - 1);
        for (std::size_t j = 1; j < n_terms; ++j)
            bp[j - 1] = quantile_sorted(col, static_cast<double>(j) / static_cast<double>(n_terms));

        bool strict = true;
        for (std::size_t j = 1; j < bp.size(); ++j)
            if (!(bp[j] > bp[j - 1])) strict = false;
        if (!(hi > lo)) strict = false;
        // a breakpoint sitting on the domain edge leaves an empty outer bin
        if (!(bp.front() > lo) || !(bp.back() < hi)) strict = false;

        if (!strict) {
            st.degenerate[f] = true;
            if (!(hi > lo)) {
                const double half = 0.5 * std::max(std::abs(lo), 1.0);
                lo -= half;
                hi += half;
            }
            for (std::size_t j = 1; j < n_terms; ++j)
                bp[j - 1] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n_terms);
        }
        st.breakpoints[f] = std::move(bp);
        st.min[f] = lo;
        st.max[f] = hi;
    }
    return st;
}

FeatureStats fit_feature_stats(std::span<const LabelledVector> train, std::size_t n_terms) {
    std::vector<FeatureVector> xs;
    xs.reserve(train.size());
    for (const auto& s : train) xs.push_back(s.x);
    return fit_feature_stats(std::span<const FeatureVector>(xs), n_terms);
}

}  // namespace it2sqa::features

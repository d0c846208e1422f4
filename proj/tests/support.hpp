#pragma once

#include "it2sqa/features.hpp"
#include "it2sqa/fuzzy.hpp"

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

namespace it2sqa::fixtures {

inline features::FeatureStats random_stats(std::mt19937_64& rng, std::size_t dim = features::kDimension,
                                           std::size_t n_terms = 3) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    features::FeatureStats s;
    s.n_terms = n_terms;
    for (std::size_t f = 0; f < dim; ++f) {
        std::vector<double> pts(n_terms + 1);
        for (double& p : pts) p = u(rng);
        std::sort(pts.begin(), pts.end());
        for (std::size_t j = 1; j < pts.size(); ++j)
            if (pts[j] <= pts[j - 1] + 1e-3) pts[j] = pts[j - 1] + 1e-3 + 0.1 * (j + 1);
        s.min.push_back(pts.front());
        s.max.push_back(pts.back());
        s.breakpoints.emplace_back(pts.begin() + 1, pts.end() - 1);
        s.degenerate.push_back(false);
    }
    return s;
}

inline fuzzy::RuleBase random_rule_base(std::mt19937_64& rng, const fuzzy::Partitions& partitions) {
    const std::size_t dim = partitions.size();
    const std::size_t terms = partitions.front().size();
    std::uniform_int_distribution<std::size_t> n_rules(1, fuzzy::kMaxRules);
    std::uniform_int_distribution<std::size_t> n_ante(1, fuzzy::kMaxAntecedents);
    std::uniform_int_distribution<std::size_t> term(0, terms - 1);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    fuzzy::RuleBase base;
    base.partitions = partitions;
    const std::size_t m = n_rules(rng);
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<std::size_t> feats(dim);
        for (std::size_t f = 0; f < dim; ++f) feats[f] = f;
        std::shuffle(feats.begin(), feats.end(), rng);
        feats.resize(std::min(dim, n_ante(rng)));
        std::sort(feats.begin(), feats.end());
        fuzzy::FuzzyRule rule;
        for (std::size_t f : feats) rule.antecedents.push_back({f, term(rng)});
        rule.consequent = coin(rng) ? ClassLabel::Clean : ClassLabel::Noisy;
        rule.rw_lower = w(rng);
        rule.rw_upper = w(rng);
        base.rules.push_back(rule);
    }
    return base;
}

inline features::FeatureVector random_vector(std::mt19937_64& rng, const features::FeatureStats& s) {
    features::FeatureVector x;
    for (std::size_t f = 0; f < s.dimension(); ++f) {
        const double pad = 0.1 * (s.max[f] - s.min[f]);
        std::uniform_real_distribution<double> u(s.min[f] - pad, s.max[f] + pad);
        x.values.push_back(u(rng));
    }
    return x;
}

// Straight-line evaluation of the fused reasoning from the stored triangle
// parameters, sharing no code with the library.
struct OracleScores {
    double noisy = 0.0;
    double clean = 0.0;
};

inline double oracle_triangle(const fuzzy::Triangle& t, double x) {
    if (x <= t.left || x >= t.right) return x == t.apex ? t.height : 0.0;
    if (x <= t.apex) return t.height * (x - t.left) / (t.apex - t.left);
    return t.height * (t.right - x) / (t.right - t.apex);
}

inline OracleScores oracle_base_scores(const fuzzy::RuleBase& base, const features::FeatureVector& x) {
    OracleScores s;
    for (const auto& rule : base.rules) {
        double lo = 1.0, up = 1.0;
        for (const auto& a : rule.antecedents) {
            const auto& p = base.partitions[a.feature];
            double v = x.values[a.feature];
            if (v < p.domain_min()) v = p.domain_min();
            if (v > p.domain_max()) v = p.domain_max();
            const auto& mf = p.terms()[a.term];
            lo *= oracle_triangle(mf.lower, v);
            up *= oracle_triangle(mf.upper, v);
        }
        const double overall = 0.5 * (lo * rule.rw_lower + up * rule.rw_upper);
        (rule.consequent == ClassLabel::Noisy ? s.noisy : s.clean) += overall;
    }
    return s;
}

inline OracleScores oracle_fused(const fuzzy::RuleBase& sd, const fuzzy::RuleBase& si, double alpha,
                                 const features::FeatureVector& x) {
    const OracleScores a = oracle_base_scores(sd, x);
    const OracleScores b = oracle_base_scores(si, x);
    return {alpha * a.noisy + (1.0 - alpha) * b.noisy, alpha * a.clean + (1.0 - alpha) * b.clean};
}

}  // namespace it2sqa::fixtures

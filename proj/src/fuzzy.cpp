#include "it2sqa/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace it2sqa::fuzzy {

double Triangle::operator()(double x) const {
    if (x < left || x > right) return 0.0;
    if (x == apex) return height;
    double v = x < apex ? height * (x - left) / (apex - left) : height * (right - x) / (right - apex);
    return std::clamp(v, 0.0, height);
}

bool IT2TriangularMf::valid() const {
    return lower.apex == upper.apex && upper.left <= lower.left && lower.left <= lower.apex &&
           lower.apex <= lower.right && lower.right <= upper.right && lower.height > 0.0 &&
           lower.height <= 1.0 && upper.height == 1.0;
}

IT2TriangularMf IT2TriangularMf::make(Triangle lower, Triangle upper) {
    IT2TriangularMf mf{lower, upper};
    if (!mf.valid()) throw ValidationError("IT2 triangle violates a_u <= a_l <= m <= b_l <= b_u / height constraints");
    return mf;
}

MembershipInterval membership(const IT2TriangularMf& mf, double x) {
    return {mf.lower(x), mf.upper(x)};
}

LinguisticPartition::LinguisticPartition(std::size_t feature, std::vector<IT2TriangularMf> terms,
                                         double domain_min, double domain_max)
    : feature_(feature), terms_(std::move(terms)), domain_min_(domain_min), domain_max_(domain_max) {
    if (terms_.empty()) throw ValidationError("partition needs at least one term");
    if (!(domain_max_ >= domain_min_)) throw ValidationError("partition domain is inverted");
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        if (!terms_[j].valid()) throw ValidationError("partition term violates IT2 invariants");
        if (j > 0 && !(terms_[j].upper.apex > terms_[j - 1].upper.apex))
            throw ValidationError("partition apexes must be strictly increasing");
    }
}

MembershipInterval LinguisticPartition::membership(std::size_t term, double x) const {
    return fuzzy::membership(terms_.at(term), std::clamp(x, domain_min_, domain_max_));
}

LinguisticPartition build_partition(const features::FeatureStats& stats, std::size_t feature,
                                    const PartitionParams& params) {
    const std::size_t n = stats.n_terms;
    std::vector<double> edges;
    edges.push_back(stats.min.at(feature));
    for (double b : stats.breakpoints.at(feature)) edges.push_back(b);
    edges.push_back(stats.max.at(feature));

    std::vector<double> centre(n);
    for (std::size_t j = 0; j < n; ++j) centre[j] = 0.5 * (edges[j] + edges[j + 1]);

    std::vector<IT2TriangularMf> terms;
    terms.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double left = j > 0 ? centre[j - 1] : centre[0] - (centre[1] - centre[0]);
        const double right = j + 1 < n ? centre[j + 1] : centre[n - 1] + (centre[n - 1] - centre[n - 2]);
        const double widen = params.delta * (right - left);
        Triangle lower{left, centre[j], right, params.lower_height};
        Triangle upper{left - widen, centre[j], right + widen, 1.0};
        terms.push_back(IT2TriangularMf::make(lower, upper));
    }
    return LinguisticPartition(feature, std::move(terms), edges.front(), edges.back());
}

Partitions build_partitions(const features::FeatureStats& stats, const PartitionParams& params) {
    Partitions out;
    out.reserve(stats.dimension());
    for (std::size_t f = 0; f < stats.dimension(); ++f) out.push_back(build_partition(stats, f, params));
    return out;
}

std::optional<std::string> FuzzyRule::check(std::size_t dimension, std::size_t n_terms,
                                            std::size_t a_max) const {
    if (antecedents.empty()) return "rule has no antecedents";
    if (antecedents.size() > a_max) return "rule exceeds the antecedent limit";
    std::set<std::size_t> seen;
    for (const auto& a : antecedents) {
        if (a.feature >= dimension) return "antecedent feature index out of range";
        if (a.term >= n_terms) return "antecedent term index out of range";
        if (!seen.insert(a.feature).second) return "two antecedents on the same feature";
    }
    if (!(rw_lower >= 0.0 && rw_lower <= 1.0 && rw_upper >= 0.0 && rw_upper <= 1.0))
        return "rule weight outside [0, 1]";
    return std::nullopt;
}

std::string_view to_string(Origin origin) {
    return origin == Origin::SubjectDependent ? "SD" : "SI";
}

Origin parse_origin(std::string_view text) {
    if (text == "SD") return Origin::SubjectDependent;
    if (text == "SI") return Origin::SubjectIndependent;
    throw ValidationError("unknown rule-base origin '" + std::string(text) + "'");
}

std::optional<std::string> RuleBase::check(std::size_t m_max, std::size_t a_max) const {
    if (rules.empty()) return "rule base is empty";
    if (rules.size() > m_max) return "rule base exceeds the rule limit";
    if (partitions.empty()) return "rule base has no partitions";
    const std::size_t n_terms = partitions.front().size();
    for (std::size_t f = 0; f < partitions.size(); ++f) {
        if (partitions[f].feature() != f) return "partition feature indices out of order";
        if (partitions[f].size() != n_terms) return "partitions disagree on the number of terms";
    }
    for (std::size_t r = 0; r < rules.size(); ++r) {
        if (auto why = rules[r].check(partitions.size(), n_terms, a_max)) {
            std::ostringstream msg;
            msg << "rule " << r << ": " << *why;
            return msg.str();
        }
    }
    return std::nullopt;
}

MembershipInterval firing_strength(const FuzzyRule& rule, const features::FeatureVector& x,
                                   const Partitions& partitions) {
    MembershipInterval s{1.0, 1.0};
    for (const auto& a : rule.antecedents) {
        const MembershipInterval m = partitions.at(a.feature).membership(a.term, x.values.at(a.feature));
        s.lower *= m.lower;
        s.upper *= m.upper;
    }
    return s;
}

namespace {

RuleWeights certainty_factor(double cls_lower, double all_lower, double cls_upper, double all_upper) {
    RuleWeights w;
    w.lower = all_lower > 0.0 ? cls_lower / all_lower : 0.0;
    w.upper = all_upper > 0.0 ? cls_upper / all_upper : 0.0;
    return w;
}

}  // namespace

RuleWeights fit_rule_weights(const FuzzyRule& rule, std::span<const features::LabelledVector> train,
                             const Partitions& partitions) {
    if (train.empty()) throw ValidationError("cannot fit rule weights on an empty set");
    double cls_l = 0.0, all_l = 0.0, cls_u = 0.0, all_u = 0.0;
    for (const auto& sample : train) {
        const MembershipInterval s = firing_strength(rule, sample.x, partitions);
        all_l += s.lower;
        all_u += s.upper;
        if (sample.label == rule.consequent) {
            cls_l += s.lower;
            cls_u += s.upper;
        }
    }
    return certainty_factor(cls_l, all_l, cls_u, all_u);
}

void fit_rule_base_weights(RuleBase& base, std::span<const features::LabelledVector> train) {
    for (auto& rule : base.rules) {
        const RuleWeights w = fit_rule_weights(rule, train, base.partitions);
        rule.rw_lower = w.lower;
        rule.rw_upper = w.upper;
    }
}

AssociationDegree association_degree(const FuzzyRule& rule, const features::FeatureVector& x,
                                     const Partitions& partitions) {
    const MembershipInterval s = firing_strength(rule, x, partitions);
    const double a = s.lower * rule.rw_lower;
    const double b = s.upper * rule.rw_upper;
    // a larger lower weight can invert the scaled bounds; keep the interval ordered
    AssociationDegree d{std::min(a, b), std::max(a, b), 0.0};
    d.overall = 0.5 * (d.lower + d.upper);
    return d;
}

ClassScores class_scores(const RuleBase& base, const features::FeatureVector& x) {
    if (x.dimension() != base.dimension()) {
        std::ostringstream msg;
        msg << "feature dimension mismatch: expected " << base.dimension() << ", got " << x.dimension();
        throw ValidationError(msg.str());
    }
    ClassScores scores;
    for (const auto& rule : base.rules) scores[rule.consequent] += association_degree(rule, x, base.partitions).overall;
    return scores;
}

ClassLabel decide(const ClassScores& scores) {
    return scores.clean > scores.noisy ? ClassLabel::Clean : ClassLabel::Noisy;
}

MembershipTable::MembershipTable(std::span<const features::LabelledVector> data, const Partitions& partitions)
    : rows_(data.size()), dim_(partitions.size()), terms_(partitions.empty() ? 0 : partitions.front().size()) {
    cells_.resize(rows_ * dim_ * terms_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t f = 0; f < dim_; ++f)
            for (std::size_t t = 0; t < terms_; ++t)
                cells_[(r * dim_ + f) * terms_ + t] = partitions[f].membership(t, data[r].x.values.at(f));
}

MembershipInterval MembershipTable::firing_strength(const FuzzyRule& rule, std::size_t row) const {
    MembershipInterval s{1.0, 1.0};
    for (const auto& a : rule.antecedents) {
        const MembershipInterval m = at(row, a);
        s.lower *= m.lower;
        s.upper *= m.upper;
    }
    return s;
}

}  // namespace it2sqa::fuzzy

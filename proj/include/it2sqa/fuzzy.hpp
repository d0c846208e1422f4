#pragma once

#include "it2sqa/features.hpp"
#include "it2sqa/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace it2sqa::fuzzy {

inline constexpr std::size_t kMaxAntecedents = 3;
inline constexpr std::size_t kMaxRules = 10;

struct Triangle {
    double left = 0.0;
    double apex = 0.0;
    double right = 0.0;
    double height = 1.0;

    double operator()(double x) const;
};

struct MembershipInterval {
    double lower = 0.0;
    double upper = 0.0;
};

// Interval type-2 triangular set. Both triangles share the apex abscissa; the
// lower one sits inside the upper one and peaks at height <= 1.
struct IT2TriangularMf {
    Triangle lower;
    Triangle upper;

    static IT2TriangularMf make(Triangle lower, Triangle upper);  // validates
    bool valid() const;
};

MembershipInterval membership(const IT2TriangularMf& mf, double x);

struct PartitionParams {
    double delta = 0.15;        // foot widening of the upper MF, fraction of the prototype support
    double lower_height = 0.8;  // apex height of the lower MF
};

class LinguisticPartition {
public:
    LinguisticPartition() = default;
    LinguisticPartition(std::size_t feature, std::vector<IT2TriangularMf> terms, double domain_min,
                        double domain_max);

    std::size_t feature() const { return feature_; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<IT2TriangularMf>& terms() const { return terms_; }
    double domain_min() const { return domain_min_; }
    double domain_max() const { return domain_max_; }

    // Inputs are clamped to the training domain, so the outer terms act as shoulders.
    MembershipInterval membership(std::size_t term, double x) const;

private:
    std::size_t feature_ = 0;
    std::vector<IT2TriangularMf> terms_;
    double domain_min_ = 0.0;
    double domain_max_ = 0.0;
};

using Partitions = std::vector<LinguisticPartition>;

LinguisticPartition build_partition(const features::FeatureStats& stats, std::size_t feature,
                                    const PartitionParams& params = {});
Partitions build_partitions(const features::FeatureStats& stats, const PartitionParams& params = {});

struct Antecedent {
    std::size_t feature = 0;
    std::size_t term = 0;

    friend bool operator==(const Antecedent&, const Antecedent&) = default;
    friend auto operator<=>(const Antecedent&, const Antecedent&) = default;
};

struct FuzzyRule {
    std::vector<Antecedent> antecedents;  // sorted by feature
    ClassLabel consequent = ClassLabel::Clean;
    double rw_lower = 0.0;
    double rw_upper = 0.0;

    // Empty optional when valid, otherwise the reason.
    std::optional<std::string> check(std::size_t dimension, std::size_t n_terms,
                                     std::size_t a_max = kMaxAntecedents) const;
};

enum class Origin { SubjectDependent, SubjectIndependent };

std::string_view to_string(Origin origin);
Origin parse_origin(std::string_view text);

struct RuleBase {
    std::vector<FuzzyRule> rules;
    Origin origin = Origin::SubjectIndependent;
    std::string subject_id;  // empty for SI
    std::string feature_set = std::string(features::kFeatureSetId);
    Partitions partitions;

    std::size_t dimension() const { return partitions.size(); }
    std::optional<std::string> check(std::size_t m_max = kMaxRules,
                                     std::size_t a_max = kMaxAntecedents) const;
};

struct AssociationDegree {
    double lower = 0.0;
    double upper = 0.0;
    double overall = 0.0;
};

struct ClassScores {
    double noisy = 0.0;
    double clean = 0.0;

    double& operator[](ClassLabel c) { return c == ClassLabel::Noisy ? noisy : clean; }
    double operator[](ClassLabel c) const { return c == ClassLabel::Noisy ? noisy : clean; }
};

// Product t-norm over the antecedent memberships, per bound.
MembershipInterval firing_strength(const FuzzyRule& rule, const features::FeatureVector& x,
                                   const Partitions& partitions);

struct RuleWeights {
    double lower = 0.0;
    double upper = 0.0;
};

// Certainty factor per bound: activation mass on the consequent class over the
// total activation mass; zero when the rule never fires.
RuleWeights fit_rule_weights(const FuzzyRule& rule, std::span<const features::LabelledVector> train,
                             const Partitions& partitions);

void fit_rule_base_weights(RuleBase& base, std::span<const features::LabelledVector> train);

AssociationDegree association_degree(const FuzzyRule& rule, const features::FeatureVector& x,
                                     const Partitions& partitions);

// Per-class sums of overall association degrees of one rule base.
ClassScores class_scores(const RuleBase& base, const features::FeatureVector& x);

// Ties, including no activation at all, resolve to Noisy.
ClassLabel decide(const ClassScores& scores);

// Precomputed memberships of many vectors against one partition set; used by
// the learner so each fitness evaluation only multiplies table entries.
class MembershipTable {
public:
    MembershipTable() = default;
    MembershipTable(std::span<const features::LabelledVector> data, const Partitions& partitions);

    std::size_t rows() const { return rows_; }
    MembershipInterval at(std::size_t row, Antecedent a) const {
        return cells_[(row * dim_ + a.feature) * terms_ + a.term];
    }
    MembershipInterval firing_strength(const FuzzyRule& rule, std::size_t row) const;

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::size_t terms_ = 0;
    std::vector<MembershipInterval> cells_;
};

}  // namespace it2sqa::fuzzy

#pragma once

#include "it2sqa/features.hpp"
#include "it2sqa/fuzzy.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace it2sqa::fusion {

struct SqaDecision {
    ClassLabel predicted = ClassLabel::Noisy;
    double score_noisy = 0.0;
    double score_clean = 0.0;
    double sqi = 0.0;  // clean share of the fused scores, 0 when nothing fires
};

// Subject-dependent and subject-independent rule bases blended by the
// personalisation score alpha (0 = global only, 1 = personalised only).
class FusedModel {
public:
    FusedModel(std::shared_ptr<const fuzzy::RuleBase> sd, std::shared_ptr<const fuzzy::RuleBase> si,
               double alpha);

    const fuzzy::RuleBase& sd() const { return *sd_; }
    const fuzzy::RuleBase& si() const { return *si_; }
    double alpha() const { return alpha_; }

    FusedModel with_alpha(double alpha) const { return FusedModel(sd_, si_, alpha); }

private:
    std::shared_ptr<const fuzzy::RuleBase> sd_;
    std::shared_ptr<const fuzzy::RuleBase> si_;
    double alpha_;
};

fuzzy::ClassScores fused_scores(const fuzzy::RuleBase& sd, const fuzzy::RuleBase& si, double alpha,
                                const features::FeatureVector& x);

SqaDecision make_decision(const fuzzy::ClassScores& scores);

SqaDecision classify(const FusedModel& model, const features::FeatureVector& x);
SqaDecision classify(const fuzzy::RuleBase& sd, const fuzzy::RuleBase& si, double alpha,
                     const features::FeatureVector& x);

// a:step:b inclusive, e.g. "0:0.1:1" -> 11 points.
std::vector<double> parse_grid(std::string_view text);
std::vector<double> default_grid();

struct SubjectSweepInput {
    std::string subject_id;
    std::shared_ptr<const fuzzy::RuleBase> sd;
    std::vector<features::LabelledVector> data;
};

struct SweepRow {
    double alpha = 0.0;
    std::vector<std::string> subject_ids;  // sorted
    std::vector<double> mcc;               // parallel to subject_ids
    double mean_mcc = 0.0;
    double std_mcc = 0.0;
};

std::vector<SweepRow> sweep_alpha(std::span<const SubjectSweepInput> subjects, const fuzzy::RuleBase& si,
                                  std::span<const double> grid);

// Row with the highest mean MCC; the first such row on ties.
const SweepRow& best_row(std::span<const SweepRow> rows);

}  // namespace it2sqa::fusion

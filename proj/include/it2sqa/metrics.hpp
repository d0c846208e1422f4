#pragma once

#include "it2sqa/types.hpp"

#include <cstddef>
#include <span>

namespace it2sqa::metrics {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

// Counts with `positive` as the detection target (Noisy unless overridden).
ConfusionMatrix confusion(std::span<const ClassLabel> predictions, std::span<const ClassLabel> labels,
                          ClassLabel positive = ClassLabel::Noisy);

struct MetricReport {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double gmean = 0.0;
    double mcc = 0.0;
    double acc = 0.0;
};

// Any metric whose denominator vanishes is reported as 0.
MetricReport report(const ConfusionMatrix& cm);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population
};

struct AggregateReport {
    MeanStd sensitivity, specificity, gmean, mcc, acc;
    std::size_t count = 0;
};

MeanStd mean_std(std::span<const double> values);

// Unweighted across subjects: each report is one vote.
AggregateReport aggregate(std::span<const MetricReport> per_subject);

}  // namespace it2sqa::metrics

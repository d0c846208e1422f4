#include "it2sqa/metrics.hpp"

#include <cmath>
#include <vector>

namespace it2sqa::metrics {

ConfusionMatrix confusion(std::span<const ClassLabel> predictions, std::span<const ClassLabel> labels,
                          ClassLabel positive) {
    if (predictions.size() != labels.size())
        throw ValidationError("prediction/label length mismatch");
    if (labels.empty()) throw ValidationError("confusion matrix over zero windows");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool pred_pos = predictions[i] == positive;
        const bool true_pos = labels[i] == positive;
        if (pred_pos && true_pos) ++cm.tp;
        else if (pred_pos) ++cm.fp;
        else if (true_pos) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

MetricReport report(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw ValidationError("metric report of an empty confusion matrix");
    const auto tp = static_cast<double>(cm.tp);
    const auto fp = static_cast<double>(cm.fp);
    const auto tn = static_cast<double>(cm.tn);
    const auto fn = static_cast<double>(cm.fn);

    MetricReport r;
    r.sensitivity = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    r.specificity = tn + fp > 0.0 ? tn / (tn + fp) : 0.0;
    r.gmean = std::sqrt(r.sensitivity * r.specificity);
    r.acc = (tp + tn) / static_cast<double>(cm.total());
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    r.mcc = denom > 0.0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
    return r;
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd out;
    if (values.empty()) return out;
    const auto n = static_cast<double>(values.size());
    for (double v : values) out.mean += v;
    out.mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / n);
    return out;
}

AggregateReport aggregate(std::span<const MetricReport> per_subject) {
    if (per_subject.empty()) throw ValidationError("aggregate over zero subjects");
    auto column = [&](double MetricReport::*field) {
        std::vector<double> v;
        v.reserve(per_subject.size());
        for (const auto& r : per_subject) v.push_back(r.*field);
        return mean_std(v);
    };
    AggregateReport a;
    a.sensitivity = column(&MetricReport::sensitivity);
    a.specificity = column(&MetricReport::specificity);
    a.gmean = column(&MetricReport::gmean);
    a.mcc = column(&MetricReport::mcc);
    a.acc = column(&MetricReport::acc);
    a.count = per_subject.size();
    return a;
}

}  // namespace it2sqa::metrics

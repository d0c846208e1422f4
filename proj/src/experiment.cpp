#include "it2sqa/experiment.hpp"

#include <algorithm>
#include <ostream>

namespace it2sqa::experiment {

std::vector<fusion::SubjectSweepInput> subject_inputs(const io::ModelSet& models,
                                                      const std::vector<io::FeatureCorpus>& corpora, Split split,
                                                      std::vector<std::string>* skipped) {
    std::vector<fusion::SubjectSweepInput> out;
    for (const auto& c : corpora) {
        const auto sd = models.sd.find(c.subject_id);
        auto data = c.in_split(split);
        if (sd == models.sd.end() || data.empty()) {
            if (skipped) skipped->push_back(c.subject_id);
            continue;
        }
        out.push_back({c.subject_id, sd->second, std::move(data)});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.subject_id < b.subject_id; });
    return out;
}

ModelRow evaluate_fused(const io::ModelSet& models, std::span<const fusion::SubjectSweepInput> subjects,
                        double alpha, std::string model_type) {
    if (subjects.empty()) throw ValidationError("no subject has both a model and data in the requested split");
    ModelRow row;
    row.model_type = std::move(model_type);
    row.alpha = alpha;
    for (const auto& s : subjects) {
        const fusion::FusedModel model(s.sd, models.si, alpha);
        std::vector<ClassLabel> pred, truth;
        for (const auto& item : s.data) {
            pred.push_back(fusion::classify(model, item.x).predicted);
            truth.push_back(item.label);
        }
        row.subject_ids.push_back(s.subject_id);
        row.per_subject.push_back(metrics::report(metrics::confusion(pred, truth)));
    }
    row.aggregate = metrics::aggregate(row.per_subject);
    return row;
}

std::vector<ModelRow> evaluate_report(const io::ModelSet& models, std::span<const fusion::SubjectSweepInput> subjects,
                                      double alpha) {
    std::vector<ModelRow> rows;
    rows.push_back(evaluate_fused(models, subjects, 0.0, "global"));
    rows.push_back(evaluate_fused(models, subjects, 1.0, "personalised"));
    rows.push_back(evaluate_fused(models, subjects, alpha, "fused"));
    return rows;
}

void write_report_csv(std::ostream& out, const std::vector<ModelRow>& rows) {
    out << "model_type,alpha,n_subjects,sensitivity_mean,sensitivity_std,specificity_mean,specificity_std,"
           "gmean_mean,gmean_std,mcc_mean,mcc_std,acc_mean,acc_std\n";
    for (const auto& r : rows) {
        const auto& a = r.aggregate;
        out << r.model_type << ',' << io::format_number(r.alpha) << ',' << a.count;
        for (const auto* ms : {&a.sensitivity, &a.specificity, &a.gmean, &a.mcc, &a.acc})
            out << ',' << io::format_number(ms->mean) << ',' << io::format_number(ms->std);
        out << '\n';
    }
}

void write_report_per_subject_csv(std::ostream& out, const std::vector<ModelRow>& rows) {
    out << "model_type,alpha,subject_id,sensitivity,specificity,gmean,mcc,acc\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.subject_ids.size(); ++i) {
            const auto& m = r.per_subject[i];
            out << r.model_type << ',' << io::format_number(r.alpha) << ',' << r.subject_ids[i] << ','
                << io::format_number(m.sensitivity) << ',' << io::format_number(m.specificity) << ','
                << io::format_number(m.gmean) << ',' << io::format_number(m.mcc) << ',' << io::format_number(m.acc)
                << '\n';
        }
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<fusion::SweepRow>& rows) {
    out << "alpha,subject_id,mcc\n";
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.subject_ids.size(); ++i)
            out << io::format_number(r.alpha) << ',' << r.subject_ids[i] << ',' << io::format_number(r.mcc[i]) << '\n';
}

void write_sweep_summary_csv(std::ostream& out, const std::vector<fusion::SweepRow>& rows) {
    out << "alpha,mean_mcc,std_mcc\n";
    for (const auto& r : rows)
        out << io::format_number(r.alpha) << ',' << io::format_number(r.mean_mcc) << ','
            << io::format_number(r.std_mcc) << '\n';
}

}  // namespace it2sqa::experiment

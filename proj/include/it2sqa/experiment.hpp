#pragma once

#include "it2sqa/corpus_io.hpp"
#include "it2sqa/fusion.hpp"
#include "it2sqa/metrics.hpp"
#include "it2sqa/model_io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace it2sqa::experiment {

// Subjects that have both an SD rule base and windows in `split`, sorted by id.
// Subjects lacking either are listed in `skipped` when given.
std::vector<fusion::SubjectSweepInput> subject_inputs(const io::ModelSet& models,
                                                      const std::vector<io::FeatureCorpus>& corpora, Split split,
                                                      std::vector<std::string>* skipped = nullptr);

struct ModelRow {
    std::string model_type;
    double alpha = 0.0;
    std::vector<std::string> subject_ids;
    std::vector<metrics::MetricReport> per_subject;
    metrics::AggregateReport aggregate;
};

ModelRow evaluate_fused(const io::ModelSet& models, std::span<const fusion::SubjectSweepInput> subjects,
                        double alpha, std::string model_type);

// Global (alpha 0), personalised (alpha 1) and the requested alpha.
std::vector<ModelRow> evaluate_report(const io::ModelSet& models, std::span<const fusion::SubjectSweepInput> subjects,
                                      double alpha);

void write_report_csv(std::ostream& out, const std::vector<ModelRow>& rows);
void write_report_per_subject_csv(std::ostream& out, const std::vector<ModelRow>& rows);

void write_sweep_csv(std::ostream& out, const std::vector<fusion::SweepRow>& rows);
void write_sweep_summary_csv(std::ostream& out, const std::vector<fusion::SweepRow>& rows);

}  // namespace it2sqa::experiment

#pragma once

#include "it2sqa/features.hpp"
#include "it2sqa/signal.hpp"

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace it2sqa::io {

// Shortest decimal text that parses back to the identical double.
std::string format_number(double v);
double parse_number(std::string_view text);  // throws ValidationError

std::vector<std::string_view> split_csv_line(std::string_view line);

// Columns: subject_id, window_index, split, label, s0..s{n-1}.
void write_corpus_csv(std::ostream& out, const std::vector<signal::SubjectCorpus>& study);
void write_corpus_csv(const std::filesystem::path& path, const std::vector<signal::SubjectCorpus>& study);

// Errors name the 1-based line number of the offending row.
std::vector<signal::SubjectCorpus> read_corpus_csv(std::istream& in, double fs = signal::kDefaultFs);
std::vector<signal::SubjectCorpus> read_corpus_csv(const std::filesystem::path& path,
                                                   double fs = signal::kDefaultFs);

// Single column of samples, optional non-numeric header line.
std::vector<double> read_raw_signal_csv(const std::filesystem::path& path);

// Featurized view of one subject's windows, parallel to the corpus.
struct FeatureCorpus {
    std::string subject_id;
    std::vector<features::LabelledVector> items;
    std::vector<Split> splits;

    std::vector<features::LabelledVector> in_split(Split split) const;
};

FeatureCorpus featurize(const signal::SubjectCorpus& corpus);
std::vector<FeatureCorpus> featurize(const std::vector<signal::SubjectCorpus>& study);

// Columns: subject_id, window_index, split, label, f0..f3.
void write_feature_table_csv(std::ostream& out, const std::vector<FeatureCorpus>& study);
void write_feature_table_csv(const std::filesystem::path& path, const std::vector<FeatureCorpus>& study);

std::ofstream open_output(const std::filesystem::path& path);

}  // namespace it2sqa::io

#include "it2sqa/corpus_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace it2sqa::io {

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

double parse_number(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw ValidationError("not a number: '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
        while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
        out.push_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void write_corpus_csv(std::ostream& out, const std::vector<signal::SubjectCorpus>& study) {
    std::size_t width = 0;
    for (const auto& c : study)
        for (const auto& w : c.windows) {
            if (width == 0) width = w.samples.size();
            if (w.samples.size() != width) throw ValidationError("corpus windows differ in length");
        }
    out << "subject_id,window_index,split,label";
    for (std::size_t i = 0; i < width; ++i) out << ",s" << i;
    out << '\n';
    for (const auto& c : study) {
        for (std::size_t i = 0; i < c.windows.size(); ++i) {
            const auto& w = c.windows[i];
            if (!w.label) throw ValidationError("corpus window without a label");
            out << c.subject_id << ',' << w.window_index << ',' << to_string(c.splits.at(i)) << ','
                << to_string(*w.label);
            for (double v : w.samples) out << ',' << format_number(v);
            out << '\n';
        }
    }
}

void write_corpus_csv(const std::filesystem::path& path, const std::vector<signal::SubjectCorpus>& study) {
    auto out = open_output(path);
    write_corpus_csv(out, study);
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

namespace {

[[noreturn]] void row_error(std::size_t line_no, const std::string& what) {
    std::ostringstream msg;
    msg << "corpus row " << line_no << ": " << what;
    throw ValidationError(msg.str());
}

}  // namespace

std::vector<signal::SubjectCorpus> read_corpus_csv(std::istream& in, double fs) {
    if (!(fs > 0.0)) throw ValidationError("sampling rate must be positive");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("corpus file is empty");
    const auto header = split_csv_line(line);
    if (header.size() < 5 || header[0] != "subject_id" || header[1] != "window_index" || header[2] != "split" ||
        header[3] != "label")
        throw ValidationError("corpus header must start with subject_id,window_index,split,label,s0");
    const std::size_t width = header.size() - 4;
    for (std::size_t i = 0; i < width; ++i)
        if (header[4 + i] != "s" + std::to_string(i)) row_error(1, "unexpected sample column '" + std::string(header[4 + i]) + "'");

    std::vector<signal::SubjectCorpus> study;
    std::map<std::string, std::size_t> index_of;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            std::ostringstream msg;
            msg << "expected " << header.size() << " columns, found " << cells.size();
            row_error(line_no, msg.str());
        }
        signal::PpgWindow w;
        w.subject_id = std::string(cells[0]);
        if (w.subject_id.empty()) row_error(line_no, "empty subject_id");
        try {
            const double idx = parse_number(cells[1]);
            if (idx < 0 || idx != std::floor(idx)) row_error(line_no, "window_index must be a non-negative integer");
            w.window_index = static_cast<std::size_t>(idx);
            const Split split = parse_split(cells[2]);
            w.label = parse_label(cells[3]);
            w.fs = fs;
            w.samples.reserve(width);
            for (std::size_t i = 0; i < width; ++i) {
                const double v = parse_number(cells[4 + i]);
                if (!std::isfinite(v)) row_error(line_no, "non-finite sample s" + std::to_string(i));
                w.samples.push_back(v);
            }
            auto [it, inserted] = index_of.emplace(w.subject_id, study.size());
            if (inserted) {
                study.emplace_back();
                study.back().subject_id = w.subject_id;
            }
            auto& corpus = study[it->second];
            corpus.windows.push_back(std::move(w));
            corpus.splits.push_back(split);
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            if (what.rfind("corpus row", 0) == 0) throw;
            row_error(line_no, what);
        }
    }
    if (study.empty()) throw ValidationError("corpus has no rows");
    return study;
}

std::vector<signal::SubjectCorpus> read_corpus_csv(const std::filesystem::path& path, double fs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus '" + path.string() + "'");
    return read_corpus_csv(in, fs);
}

std::vector<double> read_raw_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open signal file '" + path.string() + "'");
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto cells = split_csv_line(line);
        if (cells.size() == 1 && cells[0].empty()) continue;
        if (cells.size() != 1) {
            std::ostringstream msg;
            msg << "signal line " << line_no << ": expected a single column";
            throw ValidationError(msg.str());
        }
        try {
            out.push_back(parse_number(cells[0]));
        } catch (const ValidationError&) {
            if (line_no == 1) continue;  // header
            std::ostringstream msg;
            msg << "signal line " << line_no << ": not a number";
            throw ValidationError(msg.str());
        }
    }
    return out;
}

std::vector<features::LabelledVector> FeatureCorpus::in_split(Split split) const {
    std::vector<features::LabelledVector> out;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (splits[i] == split) out.push_back(items[i]);
    return out;
}

FeatureCorpus featurize(const signal::SubjectCorpus& corpus) {
    FeatureCorpus fc;
    fc.subject_id = corpus.subject_id;
    fc.splits = corpus.splits;
    fc.items.reserve(corpus.windows.size());
    for (const auto& w : corpus.windows) {
        if (!w.label) throw ValidationError("window " + std::to_string(w.window_index) + " has no label");
        fc.items.push_back({features::extract_features(w), *w.label});
    }
    return fc;
}

std::vector<FeatureCorpus> featurize(const std::vector<signal::SubjectCorpus>& study) {
    std::vector<FeatureCorpus> out;
    out.reserve(study.size());
    for (const auto& c : study) out.push_back(featurize(c));
    return out;
}

void write_feature_table_csv(std::ostream& out, const std::vector<FeatureCorpus>& study) {
    out << "subject_id,window_index,split,label";
    for (std::size_t f = 0; f < features::kDimension; ++f) out << ",f" << f;
    out << '\n';
    for (const auto& c : study) {
        for (std::size_t i = 0; i < c.items.size(); ++i) {
            const auto& item = c.items[i];
            out << c.subject_id << ',' << item.x.window_index << ',' << to_string(c.splits[i]) << ','
                << to_string(item.label);
            for (double v : item.x.values) out << ',' << format_number(v);
            out << '\n';
        }
    }
}

void write_feature_table_csv(const std::filesystem::path& path, const std::vector<FeatureCorpus>& study) {
    auto out = open_output(path);
    write_feature_table_csv(out, study);
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace it2sqa::io

// it2sqa command-line front end. Talks to the library only through the C API.

#include "it2sqa/it2sqa.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// Stable exit codes: 0 ok, 1 runtime failure, 2 input validation failure.
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class CommandError : public std::runtime_error {
public:
    CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

void check(it2sqa_status status, const std::string& context) {
    if (status == IT2SQA_OK) return;
    const int code = status == IT2SQA_ERR_INVALID || status == IT2SQA_ERR_UNTRAINABLE ? kExitUsage : kExitRuntime;
    throw CommandError(code, context + ": " + it2sqa_last_error());
}

struct StudyDeleter {
    void operator()(it2sqa_study* s) const { it2sqa_study_free(s); }
};
struct ModelsDeleter {
    void operator()(it2sqa_models* m) const { it2sqa_models_free(m); }
};
using StudyPtr = std::unique_ptr<it2sqa_study, StudyDeleter>;
using ModelsPtr = std::unique_ptr<it2sqa_models, ModelsDeleter>;

std::string fnv1a_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// Everything a rerun needs to reproduce the outputs; no timestamps, so identical
// invocations produce identical manifests.
struct Manifest {
    Manifest(std::string cmd, std::string cfg, std::optional<std::uint64_t> run_seed)
        : command(std::move(cmd)), config(std::move(cfg)), seed(run_seed) {}

    std::string command;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;
    nlohmann::json parameters = nlohmann::json::object();

    void write(const fs::path& dir) const {
        nlohmann::json doc;
        doc["tool"] = "it2sqa";
        doc["tool_version"] = it2sqa_version();
        doc["command"] = command;
        doc["config"] = config;
        doc["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
        doc["parameters"] = parameters;
        // outputs are named relative to the manifest so a moved directory still verifies
        auto files = [&dir](const std::vector<fs::path>& paths, bool relative) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& p : paths) {
                const fs::path shown = relative ? p.lexically_relative(dir) : p;
                arr.push_back({{"path", shown.generic_string()}, {"fnv1a64", fnv1a_file(p)}});
            }
            return arr;
        };
        doc["inputs"] = files(inputs, false);
        doc["outputs"] = files(outputs, true);
        std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
        if (!out) throw CommandError(kExitRuntime, "cannot write manifest in '" + dir.string() + "'");
        out << doc.dump(2) << '\n';
    }
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw CommandError(kExitRuntime, "cannot create output directory '" + dir.string() + "'");
}

it2sqa_split parse_split(const std::string& s) {
    if (s == "train") return IT2SQA_SPLIT_TRAIN;
    if (s == "validation") return IT2SQA_SPLIT_VALIDATION;
    if (s == "test") return IT2SQA_SPLIT_TEST;
    throw CommandError(kExitUsage, "unknown split '" + s + "'");
}

std::vector<fs::path> list_files(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() != "manifest.json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::string corpus;
    std::string models;
    std::string input;
    std::string subject;
    double alpha = 0.7;
    std::string grid = "0:0.1:1";
    std::string split = "validation";
    double fs = 200.0;
    std::optional<std::size_t> subjects;
    std::optional<std::size_t> threads;
};

int cmd_synth(const Options& o) {
    it2sqa_synth_params params;
    it2sqa_synth_params_default(&params);
    if (!o.config.empty()) check(it2sqa_config_load(o.config.c_str(), &params, nullptr), "config");
    if (o.seed) params.seed = *o.seed;
    if (o.subjects) params.n_subjects = *o.subjects;

    it2sqa_study* raw = nullptr;
    check(it2sqa_study_synthesize(&params, &raw), "synth");
    StudyPtr study(raw);

    const fs::path dir = o.out;
    ensure_dir(dir);
    const fs::path corpus = dir / "corpus.csv";
    const fs::path features = dir / "features.csv";
    check(it2sqa_study_save_csv(study.get(), corpus.string().c_str()), "write corpus");
    check(it2sqa_study_save_features_csv(study.get(), features.string().c_str()), "write features");

    std::size_t subjects = 0, windows = 0, noisy = 0;
    check(it2sqa_study_counts(study.get(), &subjects, &windows, &noisy), "counts");
    std::cout << "synthesized " << subjects << " subjects, " << windows << " windows (" << windows - noisy
              << " clean / " << noisy << " noisy) -> " << corpus.string() << '\n';

    Manifest m{"synth", o.config, params.seed};
    if (!o.config.empty()) m.inputs.push_back(o.config);
    m.outputs = {corpus, features};
    m.parameters = {{"subjects", params.n_subjects},
                    {"windows_per_subject", params.windows_per_subject},
                    {"noisy_fraction", params.noisy_fraction},
                    {"subject_shift", params.subject_shift}};
    m.write(dir);
    return kExitOk;
}

StudyPtr load_study(const std::string& path, double fs) {
    if (path.empty()) throw CommandError(kExitUsage, "--corpus is required");
    it2sqa_study* raw = nullptr;
    check(it2sqa_study_load_csv(path.c_str(), fs, &raw), "corpus");
    return StudyPtr(raw);
}

ModelsPtr load_models(const std::string& dir) {
    if (dir.empty()) throw CommandError(kExitUsage, "--models is required");
    it2sqa_models* raw = nullptr;
    check(it2sqa_models_load(dir.c_str(), &raw), "models");
    return ModelsPtr(raw);
}

int cmd_train(const Options& o) {
    it2sqa_ga_config cfg;
    it2sqa_ga_config_default(&cfg);
    if (!o.config.empty()) check(it2sqa_config_load(o.config.c_str(), nullptr, &cfg), "config");
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;

    StudyPtr study = load_study(o.corpus, o.fs);
    it2sqa_models* raw = nullptr;
    check(it2sqa_train(study.get(), &cfg, &raw), "train");
    ModelsPtr models(raw);

    for (std::size_t i = 0; i < it2sqa_models_untrainable_count(models.get()); ++i)
        std::cerr << "warning: subject " << it2sqa_models_untrainable_subject(models.get(), i)
                  << " untrainable: " << it2sqa_models_untrainable_reason(models.get(), i) << '\n';
    if (it2sqa_models_sd_count(models.get()) == 0)
        throw CommandError(kExitUsage, "no trainable subjects in '" + o.corpus + "'");

    const fs::path dir = o.out;
    ensure_dir(dir);
    check(it2sqa_models_save(models.get(), dir.string().c_str()), "save models");
    std::cout << "trained 1 SI + " << it2sqa_models_sd_count(models.get()) << " SD rule bases -> " << dir.string()
              << '\n';

    Manifest m{"train", o.config, cfg.seed};
    m.inputs.push_back(o.corpus);
    if (!o.config.empty()) m.inputs.push_back(o.config);
    m.outputs = list_files(dir);
    m.parameters = {{"population_size", cfg.population_size}, {"generations", cfg.generations},
                    {"a_max", cfg.a_max}, {"m_max", cfg.m_max}, {"n_terms", cfg.n_terms}, {"fs", o.fs}};
    m.write(dir);
    return kExitOk;
}

int cmd_evaluate(const Options& o) {
    if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) throw CommandError(kExitUsage, "--alpha must lie in [0, 1]");
    const it2sqa_split split = parse_split(o.split);
    ModelsPtr models = load_models(o.models);
    StudyPtr study = load_study(o.corpus, o.fs);

    const fs::path dir = o.out;
    ensure_dir(dir);
    const fs::path report = dir / "report.csv";
    const fs::path per_subject = dir / "report_per_subject.csv";
    it2sqa_eval_summary summary{};
    check(it2sqa_evaluate(models.get(), study.get(), split, o.alpha, report.string().c_str(),
                          per_subject.string().c_str(), &summary),
          "evaluate");
    if (summary.n_skipped > 0)
        std::cerr << "warning: " << summary.n_skipped << " subject(s) skipped (no SD model or no " << o.split
                  << " windows)\n";
    std::cout << "alpha=" << o.alpha << " on " << o.split << ": MCC " << summary.mcc_mean << " (" << summary.mcc_std
              << "), ACC " << summary.acc_mean << " (" << summary.acc_std << ") over " << summary.n_subjects
              << " subjects\n";

    Manifest m{"evaluate", o.config, std::nullopt};
    m.inputs = {o.corpus};
    for (const auto& f : list_files(o.models))
        if (f.extension() == ".json") m.inputs.push_back(f);
    m.outputs = {report, per_subject};
    m.parameters = {{"alpha", o.alpha}, {"split", o.split}, {"fs", o.fs}};
    m.write(dir);
    return kExitOk;
}

int cmd_sweep(const Options& o) {
    const it2sqa_split split = parse_split(o.split);
    std::size_t n = 0;
    check(it2sqa_parse_grid(o.grid.c_str(), nullptr, 0, &n), "--grid");
    std::vector<double> grid(n);
    check(it2sqa_parse_grid(o.grid.c_str(), grid.data(), grid.size(), &n), "--grid");

    ModelsPtr models = load_models(o.models);
    StudyPtr study = load_study(o.corpus, o.fs);

    const fs::path dir = o.out;
    ensure_dir(dir);
    const fs::path per_subject = dir / "sweep.csv";
    const fs::path summary_path = dir / "sweep_summary.csv";
    it2sqa_sweep_summary summary{};
    check(it2sqa_sweep(models.get(), study.get(), split, grid.data(), grid.size(), per_subject.string().c_str(),
                       summary_path.string().c_str(), &summary),
          "sweep");
    std::cout << summary.n_points << " alpha points over " << summary.n_subjects << " subjects; best alpha "
              << summary.best_alpha << " with mean MCC " << summary.best_mean_mcc << " (" << summary.best_std_mcc
              << ")\n";

    Manifest m{"sweep", o.config, std::nullopt};
    m.inputs = {o.corpus};
    for (const auto& f : list_files(o.models))
        if (f.extension() == ".json") m.inputs.push_back(f);
    m.outputs = {per_subject, summary_path};
    m.parameters = {{"grid", o.grid}, {"split", o.split}, {"fs", o.fs}};
    m.write(dir);
    return kExitOk;
}

int cmd_classify(const Options& o) {
    if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) throw CommandError(kExitUsage, "--alpha must lie in [0, 1]");
    if (o.input.empty()) throw CommandError(kExitUsage, "--input is required");
    if (o.subject.empty()) throw CommandError(kExitUsage, "--subject is required");
    ModelsPtr models = load_models(o.models);

    const fs::path dir = o.out;
    ensure_dir(dir);
    const fs::path decisions = dir / "decisions.csv";
    std::size_t windows = 0;
    check(it2sqa_classify_signal_csv(models.get(), o.subject.c_str(), o.alpha, o.input.c_str(), o.fs, 3.0,
                                     decisions.string().c_str(), &windows),
          "classify");
    std::cout << "classified " << windows << " windows -> " << decisions.string() << '\n';

    Manifest m{"classify", o.config, std::nullopt};
    m.inputs = {o.input};
    m.outputs = {decisions};
    m.parameters = {{"alpha", o.alpha}, {"subject", o.subject}, {"fs", o.fs}};
    m.write(dir);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Personalised interval type-2 fuzzy PPG signal-quality assessment"};
    app.set_version_flag("--version", std::string(it2sqa_version()));
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config, "TOML-style config file")->check(CLI::ExistingFile);
        cmd->add_option("--out", o.out, "output directory");
        cmd->add_option("--fs", o.fs, "sampling rate in Hz")->check(CLI::PositiveNumber);
    };

    auto* synth = app.add_subcommand("synth", "generate the synthetic study corpus");
    add_common(synth);
    synth->add_option("--seed", o.seed, "corpus seed");
    synth->add_option("--subjects", o.subjects, "number of subjects")->check(CLI::PositiveNumber);

    auto* train = app.add_subcommand("train", "learn SD and SI rule bases");
    add_common(train);
    train->add_option("--corpus", o.corpus, "corpus CSV")->required();
    train->add_option("--seed", o.seed, "GA seed");
    train->add_option("--threads", o.threads, "fitness worker threads")->check(CLI::PositiveNumber);

    auto* evaluate = app.add_subcommand("evaluate", "metric report for alpha 0, 1 and --alpha");
    add_common(evaluate);
    evaluate->add_option("--models", o.models, "model directory")->required();
    evaluate->add_option("--corpus", o.corpus, "corpus CSV")->required();
    evaluate->add_option("--alpha", o.alpha, "personalisation score in [0, 1]");
    evaluate->add_option("--split", o.split, "train|validation|test");

    auto* sweep = app.add_subcommand("sweep", "mean/std MCC over an alpha grid");
    add_common(sweep);
    sweep->add_option("--models", o.models, "model directory")->required();
    sweep->add_option("--corpus", o.corpus, "corpus CSV")->required();
    sweep->add_option("--grid", o.grid, "start:step:stop");
    sweep->add_option("--split", o.split, "train|validation|test");

    auto* classify = app.add_subcommand("classify", "score a raw single-column signal CSV");
    add_common(classify);
    classify->add_option("--models", o.models, "model directory")->required();
    classify->add_option("--input", o.input, "signal CSV")->required();
    classify->add_option("--subject", o.subject, "subject id selecting the SD rule base")->required();
    classify->add_option("--alpha", o.alpha, "personalisation score in [0, 1]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(o);
        if (train->parsed()) return cmd_train(o);
        if (evaluate->parsed()) return cmd_evaluate(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (classify->parsed()) return cmd_classify(o);
    } catch (const CommandError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

#include "it2sqa/it2sqa.h"

#include "it2sqa/config.hpp"
#include "it2sqa/corpus_io.hpp"
#include "it2sqa/experiment.hpp"
#include "it2sqa/fusion.hpp"
#include "it2sqa/learner.hpp"
#include "it2sqa/model_io.hpp"

#include <optional>
#include <string>
#include <vector>

using namespace it2sqa;

struct it2sqa_study {
    std::vector<signal::SubjectCorpus> corpora;
    std::vector<io::FeatureCorpus> features;
};

struct it2sqa_models {
    io::ModelSet set;
    std::optional<learner::StudyModels> trained;  // present when produced by it2sqa_train
    std::vector<std::pair<std::string, std::string>> untrainable;
};

namespace {

thread_local std::string g_last_error;

it2sqa_status fail(it2sqa_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Maps exceptions escaping the C++ core onto status codes.
template <typename F>
it2sqa_status guarded(F&& body) {
    try {
        body();
        return IT2SQA_OK;
    } catch (const learner::UntrainableError& e) {
        return fail(IT2SQA_ERR_UNTRAINABLE, e.what());
    } catch (const ValidationError& e) {
        return fail(IT2SQA_ERR_INVALID, e.what());
    } catch (const IoError& e) {
        return fail(IT2SQA_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(IT2SQA_ERR_RUNTIME, e.what());
    } catch (...) {
        return fail(IT2SQA_ERR_RUNTIME, "unknown error");
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw ValidationError(std::string(what) + " must not be null");
}

signal::StudyParams to_cpp(const it2sqa_synth_params& p) {
    signal::StudyParams s;
    s.n_subjects = p.n_subjects;
    s.windows_per_subject = p.windows_per_subject;
    s.noisy_fraction = p.noisy_fraction;
    s.subject_shift = p.subject_shift;
    s.seed = p.seed;
    s.fs = p.fs;
    s.window_seconds = p.window_seconds;
    s.train_fraction = p.train_fraction;
    s.validation_fraction = p.validation_fraction;
    return s;
}

void from_cpp(const signal::StudyParams& s, it2sqa_synth_params& p) {
    p.n_subjects = s.n_subjects;
    p.windows_per_subject = s.windows_per_subject;
    p.noisy_fraction = s.noisy_fraction;
    p.subject_shift = s.subject_shift;
    p.seed = s.seed;
    p.fs = s.fs;
    p.window_seconds = s.window_seconds;
    p.train_fraction = s.train_fraction;
    p.validation_fraction = s.validation_fraction;
}

learner::GaConfig to_cpp(const it2sqa_ga_config& c) {
    learner::GaConfig g;
    g.population_size = c.population_size;
    g.generations = c.generations;
    g.crossover_rate = c.crossover_rate;
    g.mutation_rate = c.mutation_rate;
    g.tournament_size = c.tournament_size;
    g.elite_count = c.elite_count;
    g.seed = c.seed;
    g.a_max = c.a_max;
    g.m_max = c.m_max;
    g.n_terms = c.n_terms;
    g.threads = c.threads;
    g.partition.delta = c.delta;
    g.partition.lower_height = c.lower_height;
    return g;
}

void from_cpp(const learner::GaConfig& g, it2sqa_ga_config& c) {
    c.population_size = g.population_size;
    c.generations = g.generations;
    c.crossover_rate = g.crossover_rate;
    c.mutation_rate = g.mutation_rate;
    c.tournament_size = g.tournament_size;
    c.elite_count = g.elite_count;
    c.seed = g.seed;
    c.a_max = g.a_max;
    c.m_max = g.m_max;
    c.n_terms = g.n_terms;
    c.threads = g.threads;
    c.delta = g.partition.delta;
    c.lower_height = g.partition.lower_height;
}

Split to_cpp(it2sqa_split s) {
    switch (s) {
        case IT2SQA_SPLIT_TRAIN: return Split::Train;
        case IT2SQA_SPLIT_VALIDATION: return Split::Validation;
        case IT2SQA_SPLIT_TEST: return Split::Test;
    }
    throw ValidationError("unknown split");
}

it2sqa_study* make_study(std::vector<signal::SubjectCorpus> corpora) {
    auto* s = new it2sqa_study;
    s->features = io::featurize(corpora);
    s->corpora = std::move(corpora);
    return s;
}

std::ofstream open_or_throw(const char* path) { return io::open_output(path); }

fuzzy::ClassScores subject_scores(const it2sqa_models& m, const std::string& subject, double alpha,
                                  const features::FeatureVector& x) {
    const auto sd = m.set.sd.find(subject);
    if (sd == m.set.sd.end()) {
        if (alpha != 0.0) throw ValidationError("no SD model for subject '" + subject + "'; only alpha 0 is available");
        return fusion::fused_scores(*m.set.si, *m.set.si, 0.0, x);
    }
    return fusion::fused_scores(*sd->second, *m.set.si, alpha, x);
}

}  // namespace

extern "C" {

const char* it2sqa_version(void) { return IT2SQA_VERSION_STRING; }

const char* it2sqa_last_error(void) { return g_last_error.c_str(); }

void it2sqa_synth_params_default(it2sqa_synth_params* params) {
    if (params) from_cpp(signal::StudyParams{}, *params);
}

void it2sqa_ga_config_default(it2sqa_ga_config* config) {
    if (config) from_cpp(learner::GaConfig{}, *config);
}

it2sqa_status it2sqa_config_load(const char* path, it2sqa_synth_params* synth, it2sqa_ga_config* ga) {
    return guarded([&] {
        require(path, "path");
        config::RunConfig base;
        if (synth) base.synth = to_cpp(*synth);
        if (ga) base.ga = to_cpp(*ga);
        const config::RunConfig cfg = config::load_config(path, base);
        if (synth) from_cpp(cfg.synth, *synth);
        if (ga) from_cpp(cfg.ga, *ga);
    });
}

it2sqa_status it2sqa_study_synthesize(const it2sqa_synth_params* params, it2sqa_study** out) {
    return guarded([&] {
        require(params, "params");
        require(out, "out");
        *out = make_study(signal::build_synthetic_study(to_cpp(*params)));
    });
}

it2sqa_status it2sqa_study_load_csv(const char* path, double fs, it2sqa_study** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = make_study(io::read_corpus_csv(std::filesystem::path(path), fs));
    });
}

it2sqa_status it2sqa_study_save_csv(const it2sqa_study* study, const char* path) {
    return guarded([&] {
        require(study, "study");
        require(path, "path");
        io::write_corpus_csv(std::filesystem::path(path), study->corpora);
    });
}

it2sqa_status it2sqa_study_save_features_csv(const it2sqa_study* study, const char* path) {
    return guarded([&] {
        require(study, "study");
        require(path, "path");
        io::write_feature_table_csv(std::filesystem::path(path), study->features);
    });
}

it2sqa_status it2sqa_study_counts(const it2sqa_study* study, size_t* subjects, size_t* windows, size_t* noisy) {
    return guarded([&] {
        require(study, "study");
        size_t w = 0, n = 0;
        for (const auto& c : study->features) {
            w += c.items.size();
            for (const auto& item : c.items) n += item.label == ClassLabel::Noisy ? 1 : 0;
        }
        if (subjects) *subjects = study->features.size();
        if (windows) *windows = w;
        if (noisy) *noisy = n;
    });
}

void it2sqa_study_free(it2sqa_study* study) { delete study; }

size_t it2sqa_feature_dimension(void) { return features::kDimension; }

it2sqa_status it2sqa_extract_features(const double* samples, size_t n, double* out, size_t dim) {
    return guarded([&] {
        require(samples, "samples");
        require(out, "out");
        if (dim != features::kDimension) throw ValidationError("feature buffer must hold exactly 4 values");
        const auto fv = features::extract_features(std::span<const double>(samples, n));
        std::copy(fv.values.begin(), fv.values.end(), out);
    });
}

it2sqa_status it2sqa_train(const it2sqa_study* study, const it2sqa_ga_config* config, it2sqa_models** out) {
    return guarded([&] {
        require(study, "study");
        require(config, "config");
        require(out, "out");
        std::vector<learner::SubjectTrainingSet> sets;
        for (const auto& c : study->features) sets.push_back({c.subject_id, c.in_split(Split::Train)});
        learner::StudyModels trained = learner::train_study(sets, to_cpp(*config));
        auto handle = std::make_unique<it2sqa_models>();
        for (const auto& [id, why] : trained.untrainable) handle->untrainable.emplace_back(id, why);
        handle->set = io::to_model_set(trained);
        handle->trained = std::move(trained);
        *out = handle.release();
    });
}

it2sqa_status it2sqa_models_save(const it2sqa_models* models, const char* dir) {
    return guarded([&] {
        require(models, "models");
        require(dir, "dir");
        if (models->trained) {
            io::save_study_models(dir, *models->trained);
            return;
        }
        std::filesystem::create_directories(dir);
        io::save_rule_base(std::filesystem::path(dir) / "si.json", *models->set.si);
        for (const auto& [id, base] : models->set.sd)
            io::save_rule_base(std::filesystem::path(dir) / ("sd_" + id + ".json"), *base);
    });
}

it2sqa_status it2sqa_models_load(const char* dir, it2sqa_models** out) {
    return guarded([&] {
        require(dir, "dir");
        require(out, "out");
        auto handle = std::make_unique<it2sqa_models>();
        handle->set = io::load_model_set(dir);
        *out = handle.release();
    });
}

size_t it2sqa_models_sd_count(const it2sqa_models* models) { return models ? models->set.sd.size() : 0; }

size_t it2sqa_models_untrainable_count(const it2sqa_models* models) {
    return models ? models->untrainable.size() : 0;
}

const char* it2sqa_models_untrainable_subject(const it2sqa_models* models, size_t i) {
    if (!models || i >= models->untrainable.size()) return nullptr;
    return models->untrainable[i].first.c_str();
}

const char* it2sqa_models_untrainable_reason(const it2sqa_models* models, size_t i) {
    if (!models || i >= models->untrainable.size()) return nullptr;
    return models->untrainable[i].second.c_str();
}

void it2sqa_models_free(it2sqa_models* models) { delete models; }

it2sqa_status it2sqa_classify(const it2sqa_models* models, const char* subject_id, double alpha,
                              const double* features, size_t dim, it2sqa_decision* out) {
    return guarded([&] {
        require(models, "models");
        require(subject_id, "subject_id");
        require(features, "features");
        require(out, "out");
        features::FeatureVector x;
        x.values.assign(features, features + dim);
        const auto d = fusion::make_decision(subject_scores(*models, subject_id, alpha, x));
        out->predicted = d.predicted == ClassLabel::Noisy ? IT2SQA_NOISY : IT2SQA_CLEAN;
        out->score_noisy = d.score_noisy;
        out->score_clean = d.score_clean;
        out->sqi = d.sqi;
    });
}

it2sqa_status it2sqa_classify_signal_csv(const it2sqa_models* models, const char* subject_id, double alpha,
                                         const char* signal_path, double fs, double window_seconds,
                                         const char* out_path, size_t* n_windows) {
    return guarded([&] {
        require(models, "models");
        require(subject_id, "subject_id");
        require(signal_path, "signal_path");
        require(out_path, "out_path");
        const auto samples = io::read_raw_signal_csv(signal_path);
        const auto windows = signal::segment_windows(samples, fs, window_seconds, subject_id);
        auto out = open_or_throw(out_path);
        out << "window_index,predicted,score_noisy,score_clean,sqi\n";
        for (const auto& w : windows) {
            const auto d = fusion::make_decision(subject_scores(*models, subject_id, alpha, features::extract_features(w)));
            out << w.window_index << ',' << to_string(d.predicted) << ',' << io::format_number(d.score_noisy) << ','
                << io::format_number(d.score_clean) << ',' << io::format_number(d.sqi) << '\n';
        }
        if (!out) throw IoError(std::string("write to '") + out_path + "' failed");
        if (n_windows) *n_windows = windows.size();
    });
}

it2sqa_status it2sqa_evaluate(const it2sqa_models* models, const it2sqa_study* study, it2sqa_split split,
                              double alpha, const char* report_path, const char* per_subject_path,
                              it2sqa_eval_summary* summary) {
    return guarded([&] {
        require(models, "models");
        require(study, "study");
        require(report_path, "report_path");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
        std::vector<std::string> skipped;
        const auto inputs = experiment::subject_inputs(models->set, study->features, to_cpp(split), &skipped);
        const auto rows = experiment::evaluate_report(models->set, inputs, alpha);
        {
            auto out = open_or_throw(report_path);
            experiment::write_report_csv(out, rows);
        }
        if (per_subject_path) {
            auto out = open_or_throw(per_subject_path);
            experiment::write_report_per_subject_csv(out, rows);
        }
        if (summary) {
            const auto& fused = rows.back().aggregate;
            summary->n_subjects = inputs.size();
            summary->n_skipped = skipped.size();
            summary->mcc_mean = fused.mcc.mean;
            summary->mcc_std = fused.mcc.std;
            summary->acc_mean = fused.acc.mean;
            summary->acc_std = fused.acc.std;
        }
    });
}

it2sqa_status it2sqa_parse_grid(const char* text, double* out, size_t capacity, size_t* count) {
    return guarded([&] {
        require(text, "text");
        require(count, "count");
        const auto grid = fusion::parse_grid(text);
        *count = grid.size();
        if (out) {
            if (capacity < grid.size()) throw ValidationError("grid buffer too small");
            std::copy(grid.begin(), grid.end(), out);
        }
    });
}

it2sqa_status it2sqa_sweep(const it2sqa_models* models, const it2sqa_study* study, it2sqa_split split,
                           const double* grid, size_t grid_size, const char* per_subject_path,
                           const char* summary_path, it2sqa_sweep_summary* summary) {
    return guarded([&] {
        require(models, "models");
        require(study, "study");
        const std::vector<double> points = grid ? std::vector<double>(grid, grid + grid_size) : fusion::default_grid();
        if (points.empty()) throw ValidationError("empty alpha grid");
        std::vector<std::string> skipped;
        const auto inputs = experiment::subject_inputs(models->set, study->features, to_cpp(split), &skipped);
        const auto rows = fusion::sweep_alpha(inputs, *models->set.si, points);
        if (per_subject_path) {
            auto out = open_or_throw(per_subject_path);
            experiment::write_sweep_csv(out, rows);
        }
        if (summary_path) {
            auto out = open_or_throw(summary_path);
            experiment::write_sweep_summary_csv(out, rows);
        }
        if (summary) {
            const auto& best = fusion::best_row(rows);
            summary->n_points = rows.size();
            summary->n_subjects = inputs.size();
            summary->n_skipped = skipped.size();
            summary->best_alpha = best.alpha;
            summary->best_mean_mcc = best.mean_mcc;
            summary->best_std_mcc = best.std_mcc;
        }
    });
}

}  // extern "C"

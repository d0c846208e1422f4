#include "it2sqa/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace it2sqa {

std::string_view to_string(ClassLabel label) {
    return label == ClassLabel::Noisy ? "noisy" : "clean";
}

std::string_view to_string(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "train";
}

ClassLabel parse_label(std::string_view text) {
    if (text == "noisy" || text == "Noisy") return ClassLabel::Noisy;
    if (text == "clean" || text == "Clean") return ClassLabel::Clean;
    throw ValidationError("unknown class label '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
    if (text == "train") return Split::Train;
    if (text == "validation") return Split::Validation;
    if (text == "test") return Split::Test;
    throw ValidationError("unknown split '" + std::string(text) + "'");
}

}  // namespace it2sqa

namespace it2sqa::signal {

std::vector<std::size_t> SubjectCorpus::indices_in(Split split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < splits.size(); ++i)
        if (splits[i] == split) out.push_back(i);
    return out;
}

std::size_t samples_per_window(double fs, double window_seconds) {
    if (!(fs > 0.0) || !std::isfinite(fs))
        throw ValidationError("sampling rate must be positive");
    if (!(window_seconds > 0.0) || !std::isfinite(window_seconds))
        throw ValidationError("window length must be positive");
    const auto n = static_cast<std::size_t>(std::llround(window_seconds * fs));
    if (n == 0) throw ValidationError("window shorter than one sample");
    return n;
}

std::vector<PpgWindow> segment_windows(std::span<const double> signal, double fs,
                                       double window_seconds, const std::string& subject_id) {
    const std::size_t len = samples_per_window(fs, window_seconds);
    for (std::size_t i = 0; i < signal.size(); ++i) {
        if (!std::isfinite(signal[i])) {
            std::ostringstream msg;
            msg << "non-finite sample at index " << i;
            throw ValidationError(msg.str());
        }
    }
    std::vector<PpgWindow> out;
    const std::size_t count = signal.size() / len;
    out.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        PpgWindow win;
        win.samples.assign(signal.begin() + static_cast<std::ptrdiff_t>(w * len),
                           signal.begin() + static_cast<std::ptrdiff_t>((w + 1) * len));
        win.fs = fs;
        win.subject_id = subject_id;
        win.window_index = w;
        out.push_back(std::move(win));
    }
    return out;
}

namespace {

double gaussian_bump(double t, double centre, double width) {
    const double z = (t - centre) / width;
    return std::exp(-0.5 * z * z);
}

}  // namespace

std::vector<double> synth_clean_ppg(double heart_rate_bpm, double duration_s, double fs,
                                    const PulseMorphology& m, std::uint64_t seed) {
    if (!(heart_rate_bpm >= 30.0 && heart_rate_bpm <= 220.0))
        throw ValidationError("heart rate must lie in [30, 220] bpm");
    if (!(duration_s > 0.0)) throw ValidationError("duration must be positive");
    if (!(fs > 0.0)) throw ValidationError("sampling rate must be positive");
    if (m.systolic_width <= 0.0 || m.dicrotic_width <= 0.0)
        throw ValidationError("pulse widths must be positive");
    if (m.interval_jitter < 0.0 || m.amplitude_jitter < 0.0)
        throw ValidationError("jitter must be non-negative");

    const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
    const double period = 60.0 / heart_rate_bpm;

    struct Beat {
        double start, period, amplitude;
    };
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Beat> beats;
    // one beat before t=0 so the first window starts mid-cycle like a real recording
    double t = -period;
    while (t < duration_s + period) {
        double p = period * (1.0 + m.interval_jitter * normal(rng));
        p = std::clamp(p, 0.5 * period, 1.5 * period);
        double a = 1.0 + m.amplitude_jitter * normal(rng);
        a = std::max(a, 0.1);
        beats.push_back({t, p, a});
        t += p;
    }

    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i) / fs;
        double v = 0.0;
        for (const Beat& b : beats) {
            if (ti < b.start - b.period || ti > b.start + 2.0 * b.period) continue;
            v += b.amplitude *
                 (gaussian_bump(ti, b.start + m.systolic_position * b.period,
                                m.systolic_width * b.period) +
                  m.dicrotic_amplitude * gaussian_bump(ti, b.start + m.dicrotic_position * b.period,
                                                       m.dicrotic_width * b.period));
        }
        out[i] = v;
    }
    return out;
}

ArtifactKind parse_artifact_kind(std::string_view text) {
    if (text == "baseline_wander") return ArtifactKind::BaselineWander;
    if (text == "spike") return ArtifactKind::Spike;
    if (text == "dropout") return ArtifactKind::Dropout;
    if (text == "noise_burst") return ArtifactKind::NoiseBurst;
    throw ValidationError("unknown artifact kind '" + std::string(text) + "'");
}

std::string_view to_string(ArtifactKind kind) {
    switch (kind) {
        case ArtifactKind::BaselineWander: return "baseline_wander";
        case ArtifactKind::Spike: return "spike";
        case ArtifactKind::Dropout: return "dropout";
        case ArtifactKind::NoiseBurst: return "noise_burst";
    }
    return "spike";
}

ArtifactResult inject_artifact(std::span<const double> signal, ArtifactKind kind, double severity,
                               SampleSpan span, std::uint64_t seed, std::size_t window_length) {
    if (!(severity >= 0.0 && severity <= 1.0))
        throw ValidationError("artifact severity must lie in [0, 1]");
    if (span.begin >= span.end || span.end > signal.size())
        throw ValidationError("artifact span outside signal bounds");
    if (window_length == 0) throw ValidationError("window length must be positive");

    ArtifactResult result;
    result.signal.assign(signal.begin(), signal.end());
    if (severity == 0.0) return result;

    const std::size_t len = span.end - span.begin;
    const auto segment = signal.subspan(span.begin, len);
    const double mean = std::accumulate(segment.begin(), segment.end(), 0.0) / static_cast<double>(len);
    double ss = 0.0;
    for (double v : segment) ss += (v - mean) * (v - mean);
    double rms = std::sqrt(ss / static_cast<double>(len));
    if (!(rms > 0.0)) rms = 1.0;
    const double amplitude = severity * rms;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto& x = result.signal;

    switch (kind) {
        case ArtifactKind::BaselineWander: {
            // slow drift: a fraction of one cycle of a 0.2-0.6 cycles-per-span sinusoid plus a ramp
            const double cycles = 0.2 + 0.4 * unit(rng);
            const double phase = 2.0 * std::numbers::pi * unit(rng);
            const double slope = (unit(rng) < 0.5 ? -1.0 : 1.0) * 3.0 * amplitude;
            for (std::size_t i = 0; i < len; ++i) {
                const double u = static_cast<double>(i) / static_cast<double>(len);
                x[span.begin + i] += 4.0 * amplitude *
                                         std::sin(2.0 * std::numbers::pi * cycles * u + phase) +
                                     slope * u;
            }
            break;
        }
        case ArtifactKind::Spike: {
            const std::size_t count = 1 + static_cast<std::size_t>(unit(rng) * 3.0);
            for (std::size_t c = 0; c < count; ++c) {
                const std::size_t at = span.begin + static_cast<std::size_t>(unit(rng) * static_cast<double>(len));
                const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
                const double height = sign * 8.0 * amplitude * (0.75 + 0.5 * unit(rng));
                const std::size_t width = 1 + static_cast<std::size_t>(unit(rng) * 3.0);
                for (std::size_t k = 0; k < width && at + k < span.end; ++k) x[at + k] += height;
            }
            break;
        }
        case ArtifactKind::Dropout: {
            // contact loss: samples collapse toward a flat floor below the pulse trough
            const double floor = *std::min_element(segment.begin(), segment.end()) - 0.5 * amplitude;
            for (std::size_t i = span.begin; i < span.end; ++i)
                x[i] = (1.0 - severity) * x[i] + severity * floor;
            break;
        }
        case ArtifactKind::NoiseBurst: {
            for (std::size_t i = span.begin; i < span.end; ++i) x[i] += 1.5 * amplitude * normal(rng);
            break;
        }
    }

    for (std::size_t w = span.begin / window_length; w <= (span.end - 1) / window_length; ++w)
        result.affected_windows.insert(w);
    return result;
}

namespace {

struct SubjectProfile {
    double heart_rate;
    PulseMorphology morphology;
    std::array<double, 4> artifact_weights;
};

SubjectProfile draw_profile(const StudyParams& p, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    auto z = [&] { return std::clamp(normal(rng), -2.0, 2.0); };
    const double s = p.subject_shift;
    SubjectProfile prof;
    prof.heart_rate = std::clamp(75.0 * (1.0 + 0.25 * s * z()), 40.0, 160.0);
    PulseMorphology& m = prof.morphology;
    m.systolic_width = std::clamp(m.systolic_width * (1.0 + 0.3 * s * z()), 0.03, 0.15);
    m.dicrotic_position = std::clamp(m.dicrotic_position + 0.05 * s * z(), 0.35, 0.65);
    m.dicrotic_width = std::clamp(m.dicrotic_width * (1.0 + 0.3 * s * z()), 0.04, 0.2);
    m.dicrotic_amplitude = std::clamp(m.dicrotic_amplitude * (1.0 + 0.5 * s * z()), 0.05, 0.9);
    for (double& w : prof.artifact_weights) w = std::exp(1.5 * s * z());
    return prof;
}

}  // namespace

std::vector<SubjectCorpus> build_synthetic_study(const StudyParams& p) {
    if (p.n_subjects < 1) throw ValidationError("study needs at least one subject");
    if (p.windows_per_subject < 1) throw ValidationError("windows_per_subject must be positive");
    if (!(p.noisy_fraction > 0.0 && p.noisy_fraction < 1.0))
        throw ValidationError("noisy_fraction must lie in (0, 1)");
    if (static_cast<double>(p.windows_per_subject) * p.noisy_fraction < 1.0)
        throw ValidationError("windows_per_subject x noisy_fraction < 1: no noisy windows per subject");
    if (!(p.subject_shift >= 0.0)) throw ValidationError("subject_shift must be non-negative");
    if (!(p.train_fraction > 0.0) || p.validation_fraction < 0.0 ||
        p.train_fraction + p.validation_fraction > 1.0)
        throw ValidationError("split fractions must satisfy train > 0, validation >= 0, sum <= 1");

    const std::size_t wlen = samples_per_window(p.fs, p.window_seconds);
    const std::size_t total = p.n_subjects * p.windows_per_subject;
    const auto total_noisy = static_cast<std::size_t>(std::llround(p.noisy_fraction * static_cast<double>(total)));

    std::vector<SubjectCorpus> study;
    study.reserve(p.n_subjects);
    for (std::size_t s = 0; s < p.n_subjects; ++s) {
        std::seed_seq seq{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32),
                          static_cast<std::uint32_t>(s), 0x5eedu};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        // profile first so subject_shift == 0 gives identical tuples regardless of later draws
        const SubjectProfile prof = draw_profile(p, rng);

        std::size_t n_noisy = total_noisy / p.n_subjects + (s < total_noisy % p.n_subjects ? 1 : 0);
        n_noisy = std::clamp<std::size_t>(n_noisy, 1, p.windows_per_subject - (p.windows_per_subject > 1 ? 1 : 0));

        const double duration = static_cast<double>(p.windows_per_subject) * p.window_seconds;
        std::vector<double> x = synth_clean_ppg(prof.heart_rate, duration, p.fs, prof.morphology, rng());
        // per-subject gain/offset; features are affine invariant but stored samples look realistic
        const double gain = 500.0 * (0.5 + unit(rng));
        const double offset = 2000.0 * unit(rng);
        for (double& v : x) v = gain * v + offset;

        std::vector<std::size_t> order(p.windows_per_subject);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::size_t> noisy_windows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_noisy));
        std::sort(noisy_windows.begin(), noisy_windows.end());

        std::discrete_distribution<int> kind_dist(prof.artifact_weights.begin(), prof.artifact_weights.end());
        std::set<std::size_t> mask;
        for (std::size_t w : noisy_windows) {
            const auto kind = static_cast<ArtifactKind>(kind_dist(rng));
            const double severity = 0.6 + 0.4 * unit(rng);
            const double frac = 0.3 + 0.7 * unit(rng);
            const auto span_len = std::max<std::size_t>(1, static_cast<std::size_t>(frac * static_cast<double>(wlen)));
            const std::size_t start = w * wlen + static_cast<std::size_t>(unit(rng) * static_cast<double>(wlen - span_len));
            ArtifactResult r = inject_artifact(x, kind, severity, {start, start + span_len}, rng(), wlen);
            x = std::move(r.signal);
            mask.insert(r.affected_windows.begin(), r.affected_windows.end());
        }

        SubjectCorpus corpus;
        corpus.subject_id = "S" + std::string(s + 1 < 10 ? "0" : "") + std::to_string(s + 1);
        corpus.windows = segment_windows(x, p.fs, p.window_seconds, corpus.subject_id);
        for (auto& win : corpus.windows)
            win.label = mask.contains(win.window_index) ? ClassLabel::Noisy : ClassLabel::Clean;

        corpus.splits.assign(corpus.windows.size(), Split::Test);
        for (ClassLabel cls : {ClassLabel::Noisy, ClassLabel::Clean}) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < corpus.windows.size(); ++i)
                if (corpus.windows[i].label == cls) idx.push_back(i);
            std::shuffle(idx.begin(), idx.end(), rng);
            const auto n = static_cast<double>(idx.size());
            const auto n_train = static_cast<std::size_t>(std::llround(p.train_fraction * n));
            const auto n_val = std::min(idx.size() - n_train,
                                        static_cast<std::size_t>(std::llround(p.validation_fraction * n)));
            for (std::size_t k = 0; k < idx.size(); ++k)
                corpus.splits[idx[k]] = k < n_train ? Split::Train
                                        : k < n_train + n_val ? Split::Validation
                                                              : Split::Test;
        }
        study.push_back(std::move(corpus));
    }
    return study;
}

}  // namespace it2sqa::signal

#pragma once

#include "it2sqa/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace it2sqa::signal {

inline constexpr double kDefaultFs = 200.0;
inline constexpr double kDefaultWindowSeconds = 3.0;

struct PpgWindow {
    std::vector<double> samples;
    double fs = kDefaultFs;
    std::string subject_id;
    std::optional<ClassLabel> label;
    std::size_t window_index = 0;
};

struct SubjectCorpus {
    std::string subject_id;
    std::vector<PpgWindow> windows;
    std::vector<Split> splits;  // parallel to windows

    std::vector<std::size_t> indices_in(Split split) const;
};

std::size_t samples_per_window(double fs, double window_seconds);

// Non-overlapping windows; a trailing partial window is dropped.
// Throws ValidationError naming the first non-finite sample.
std::vector<PpgWindow> segment_windows(std::span<const double> signal, double fs,
                                       double window_seconds,
                                       const std::string& subject_id = {});

// Pulse shape as two Gaussian bumps per beat. Positions and widths are
// fractions of the beat period; amplitudes are relative to the systolic peak.
struct PulseMorphology {
    double systolic_position = 0.20;
    double systolic_width = 0.07;
    double dicrotic_position = 0.50;
    double dicrotic_width = 0.10;
    double dicrotic_amplitude = 0.45;
    double interval_jitter = 0.03;   // relative std-dev of beat-to-beat period
    double amplitude_jitter = 0.05;  // relative std-dev of beat amplitude
};

std::vector<double> synth_clean_ppg(double heart_rate_bpm, double duration_s, double fs,
                                    const PulseMorphology& morphology, std::uint64_t seed);

enum class ArtifactKind { BaselineWander, Spike, Dropout, NoiseBurst };

ArtifactKind parse_artifact_kind(std::string_view text);
std::string_view to_string(ArtifactKind kind);

struct SampleSpan {
    std::size_t begin = 0;  // inclusive
    std::size_t end = 0;    // exclusive
};

struct ArtifactResult {
    std::vector<double> signal;
    std::set<std::size_t> affected_windows;
};

// Severity scales the artifact amplitude linearly relative to the RMS of the
// mean-removed clean signal inside the span.
ArtifactResult inject_artifact(std::span<const double> signal, ArtifactKind kind, double severity,
                               SampleSpan span, std::uint64_t seed,
                               std::size_t window_length = 600);

struct StudyParams {
    std::size_t n_subjects = 10;
    std::size_t windows_per_subject = 33;
    double noisy_fraction = 0.19;
    double subject_shift = 0.5;
    std::uint64_t seed = 42;
    double fs = kDefaultFs;
    double window_seconds = kDefaultWindowSeconds;
    double train_fraction = 0.5;
    double validation_fraction = 0.25;
};

std::vector<SubjectCorpus> build_synthetic_study(const StudyParams& params);

}  // namespace it2sqa::signal

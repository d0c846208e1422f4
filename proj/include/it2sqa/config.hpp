#pragma once

#include "it2sqa/learner.hpp"
#include "it2sqa/signal.hpp"

#include <filesystem>
#include <iosfwd>

namespace it2sqa::config {

struct RunConfig {
    signal::StudyParams synth;
    learner::GaConfig ga;
};

// TOML-style key/value text with [synth] and [ga] sections. Unknown sections
// or keys are rejected with the offending line number.
// Keys absent from the text keep their value from `base`.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace it2sqa::config

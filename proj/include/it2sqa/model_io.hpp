#pragma once

#include "it2sqa/fuzzy.hpp"
#include "it2sqa/learner.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace it2sqa::io {

inline constexpr int kModelFormatVersion = 1;

std::string rule_base_to_json(const fuzzy::RuleBase& base);
fuzzy::RuleBase rule_base_from_json(const std::string& text);  // validates invariants

void save_rule_base(const std::filesystem::path& path, const fuzzy::RuleBase& base);
fuzzy::RuleBase load_rule_base(const std::filesystem::path& path);

// Columns: generation, best_fitness, mean_fitness.
void write_training_log(std::ostream& out, const std::vector<learner::GenerationLog>& log);

// Directory layout: si.json, sd_<subject>.json, train_log_*.csv, untrainable.csv.
struct ModelSet {
    std::shared_ptr<const fuzzy::RuleBase> si;
    std::map<std::string, std::shared_ptr<const fuzzy::RuleBase>> sd;
};

ModelSet to_model_set(learner::StudyModels models);
std::vector<std::filesystem::path> save_study_models(const std::filesystem::path& dir,
                                                     const learner::StudyModels& models);
ModelSet load_model_set(const std::filesystem::path& dir);

}  // namespace it2sqa::io

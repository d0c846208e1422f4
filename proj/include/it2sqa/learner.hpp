#pragma once

#include "it2sqa/features.hpp"
#include "it2sqa/fuzzy.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace it2sqa::learner {

struct GaConfig {
    std::size_t population_size = 60;
    std::size_t generations = 100;
    double crossover_rate = 0.8;
    double mutation_rate = 0.1;  // per rule gene
    std::size_t tournament_size = 3;
    std::size_t elite_count = 2;
    std::uint64_t seed = 1;
    std::size_t a_max = fuzzy::kMaxAntecedents;
    std::size_t m_max = fuzzy::kMaxRules;
    std::size_t n_terms = 3;
    std::size_t threads = 1;  // fitness evaluation workers; results do not depend on it
    fuzzy::PartitionParams partition;

    void validate() const;  // throws ValidationError
};

// One rule in genome form: a term index per feature, -1 when the feature is absent.
struct RuleGene {
    std::vector<int> terms;
    ClassLabel consequent = ClassLabel::Clean;

    std::size_t antecedent_count() const;
    friend bool operator==(const RuleGene&, const RuleGene&) = default;
};

using Chromosome = std::vector<RuleGene>;

// Minority class must have at least this many windows for 3-fold CV, and
// kFiveFoldMinority for 5-fold.
inline constexpr std::size_t kMinMinority = 3;
inline constexpr std::size_t kFiveFoldMinority = 15;

class UntrainableError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

std::size_t choose_k(std::span<const ClassLabel> labels);

struct CvPlan {
    std::size_t k = 0;
    std::vector<std::size_t> fold_of;  // per training window

    std::vector<std::size_t> held_out(std::size_t fold) const;
    std::vector<std::size_t> fit_rows(std::size_t fold) const;
};

// Stratified assignment: each class is shuffled and dealt round-robin.
CvPlan make_cv_plan(std::span<const ClassLabel> labels, std::size_t k, std::uint64_t seed);

// Fold-local fuzzy state, fitted on the fold's training rows only.
struct FoldContext {
    std::vector<std::size_t> fit_rows;
    std::vector<std::size_t> eval_rows;
    features::FeatureStats stats;
    fuzzy::Partitions partitions;
    std::uint64_t fit_checksum = 0;  // over the feature vectors used for fitting
    std::vector<features::LabelledVector> fit_data;
    std::vector<features::LabelledVector> eval_data;
    fuzzy::MembershipTable fit_table;
    fuzzy::MembershipTable eval_table;
};

std::uint64_t checksum(std::span<const features::LabelledVector> data);

std::vector<FoldContext> prepare_folds(std::span<const features::LabelledVector> train, const CvPlan& plan,
                                       const GaConfig& config);

RuleGene random_gene(std::size_t dimension, const GaConfig& config, std::mt19937_64& rng);
Chromosome random_chromosome(std::size_t dimension, const GaConfig& config, std::mt19937_64& rng);

// Bring a genome back inside the rule-base invariants: every rule gets 1..a_max
// antecedents, duplicates are removed, contradictory duplicates dropped
// entirely, length capped at m_max and never empty. When m_max allows it, both
// consequent classes are represented.
void repair(Chromosome& chromosome, std::size_t dimension, const GaConfig& config, std::mt19937_64& rng);

// Rules with zero weights over the given partitions.
fuzzy::RuleBase decode(const Chromosome& chromosome, const fuzzy::Partitions& partitions);

// Mean held-out MCC over the folds, each fold refitting rule weights on its own
// training rows and classifying with the decoded rule base alone.
double fitness(const Chromosome& chromosome, std::span<const FoldContext> folds);
double fitness(const Chromosome& chromosome, std::span<const features::LabelledVector> train,
               const CvPlan& plan, const GaConfig& config);

struct GenerationLog {
    std::size_t generation = 0;
    double best_fitness = 0.0;  // best ever so far
    double mean_fitness = 0.0;  // current population
};

struct EvolveResult {
    fuzzy::RuleBase base;
    Chromosome best;
    double best_fitness = 0.0;
    std::size_t k = 0;
    std::vector<GenerationLog> log;
};

EvolveResult evolve(std::span<const features::LabelledVector> train, const GaConfig& config);

// Partitions and weights refitted on the full set.
fuzzy::RuleBase refit(const Chromosome& chromosome, std::span<const features::LabelledVector> train,
                      const GaConfig& config);

struct SubjectTrainingSet {
    std::string subject_id;
    std::vector<features::LabelledVector> train;
};

struct StudyModels {
    fuzzy::RuleBase si;
    std::map<std::string, fuzzy::RuleBase> sd;
    std::vector<GenerationLog> si_log;
    std::map<std::string, std::vector<GenerationLog>> sd_logs;
    std::map<std::string, std::string> untrainable;  // subject -> reason
    std::size_t si_training_size = 0;
};

// SI learns from the pooled training sets, each SD from its own subject only.
StudyModels train_study(std::span<const SubjectTrainingSet> study, const GaConfig& config);

}  // namespace it2sqa::learner

#include "it2sqa/learner.hpp"

#include "it2sqa/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace it2sqa::learner {

void GaConfig::validate() const {
    if (population_size < 2) throw ValidationError("population_size must be at least 2");
    if (elite_count >= population_size) throw ValidationError("elite_count must be below population_size");
    if (tournament_size < 1) throw ValidationError("tournament_size must be positive");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw ValidationError("crossover_rate outside [0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ValidationError("mutation_rate outside [0, 1]");
    if (a_max < 1) throw ValidationError("a_max must be positive");
    if (m_max < 1) throw ValidationError("m_max must be positive");
    if (n_terms < 2) throw ValidationError("n_terms must be at least 2");
    if (threads < 1) throw ValidationError("threads must be positive");
    if (!(partition.delta >= 0.0)) throw ValidationError("partition delta must be non-negative");
    if (!(partition.lower_height > 0.0 && partition.lower_height <= 1.0))
        throw ValidationError("lower apex height must lie in (0, 1]");
}

std::size_t RuleGene::antecedent_count() const {
    return static_cast<std::size_t>(std::count_if(terms.begin(), terms.end(), [](int t) { return t >= 0; }));
}

std::size_t choose_k(std::span<const ClassLabel> labels) {
    if (labels.empty()) throw ValidationError("no training labels");
    const auto noisy = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), ClassLabel::Noisy));
    const std::size_t minority = std::min(noisy, labels.size() - noisy);
    if (minority < kMinMinority) {
        std::ostringstream msg;
        msg << "minority class has " << minority << " windows (" << noisy << " noisy, " << labels.size() - noisy
            << " clean); stratified cross-validation needs at least " << kMinMinority;
        throw UntrainableError(msg.str());
    }
    return minority >= kFiveFoldMinority ? 5 : 3;
}

std::vector<std::size_t> CvPlan::held_out(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> CvPlan::fit_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != fold) out.push_back(i);
    return out;
}

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

CvPlan make_cv_plan(std::span<const ClassLabel> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("cross-validation needs k >= 2");
    CvPlan plan;
    plan.k = k;
    plan.fold_of.assign(labels.size(), 0);
    auto rng = stream(seed, 0xC5, 0);
    std::size_t dealt = 0;
    for (ClassLabel cls : {ClassLabel::Noisy, ClassLabel::Clean}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) idx.push_back(i);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i : idx) plan.fold_of[i] = dealt++ % k;
    }
    return plan;
}

std::uint64_t checksum(std::span<const features::LabelledVector> data) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& item : data) {
        for (double v : item.x.values) mix(&v, sizeof v);
        const int label = static_cast<int>(item.label);
        mix(&label, sizeof label);
    }
    return h;
}

std::vector<FoldContext> prepare_folds(std::span<const features::LabelledVector> train, const CvPlan& plan,
                                       const GaConfig& config) {
    if (plan.fold_of.size() != train.size()) throw ValidationError("CV plan does not match the training set");
    std::vector<FoldContext> folds(plan.k);
    for (std::size_t f = 0; f < plan.k; ++f) {
        FoldContext& ctx = folds[f];
        ctx.fit_rows = plan.fit_rows(f);
        ctx.eval_rows = plan.held_out(f);
        for (std::size_t i : ctx.fit_rows) ctx.fit_data.push_back(train[i]);
        for (std::size_t i : ctx.eval_rows) ctx.eval_data.push_back(train[i]);
        if (ctx.fit_data.empty() || ctx.eval_data.empty()) throw ValidationError("empty cross-validation fold");
        ctx.fit_checksum = checksum(ctx.fit_data);
        ctx.stats = features::fit_feature_stats(std::span<const features::LabelledVector>(ctx.fit_data), config.n_terms);
        ctx.partitions = fuzzy::build_partitions(ctx.stats, config.partition);
        ctx.fit_table = fuzzy::MembershipTable(ctx.fit_data, ctx.partitions);
        ctx.eval_table = fuzzy::MembershipTable(ctx.eval_data, ctx.partitions);
    }
    return folds;
}

RuleGene random_gene(std::size_t dimension, const GaConfig& config, std::mt19937_64& rng) {
    RuleGene g;
    g.terms.assign(dimension, -1);
    const std::size_t limit = std::min(config.a_max, dimension);
    const std::size_t count = 1 + uniform_index(rng, limit);
    std::vector<std::size_t> feats(dimension);
    std::iota(feats.begin(), feats.end(), std::size_t{0});
    std::shuffle(feats.begin(), feats.end(), rng);
    for (std::size_t i = 0; i < count; ++i)
        g.terms[feats[i]] = static_cast<int>(uniform_index(rng, config.n_terms));
    g.consequent = uniform_index(rng, 2) == 0 ? ClassLabel::Noisy : ClassLabel::Clean;
    return g;
}

Chromosome random_chromosome(std::size_t dimension, const GaConfig& config, std::mt19937_64& rng) {
    const std::size_t n = 1 + uniform_index(rng, config.m_max);
    Chromosome c;
    for (std::size_t i = 0; i < n; ++i) c.push_back(random_gene(dimension, config, rng));
    return c;
}

void repair(Chromosome& chromosome, std::size_t dimension, const GaConfig& config, std::mt19937_64& rng) {
    for (RuleGene& g : chromosome) {
        g.terms.resize(dimension, -1);
        for (int& t : g.terms)
            if (t >= static_cast<int>(config.n_terms)) t = static_cast<int>(config.n_terms) - 1;
        std::vector<std::size_t> present;
        for (std::size_t f = 0; f < dimension; ++f)
            if (g.terms[f] >= 0) present.push_back(f);
        while (present.size() > config.a_max) {
            const std::size_t drop = uniform_index(rng, present.size());
            g.terms[present[drop]] = -1;
            present.erase(present.begin() + static_cast<std::ptrdiff_t>(drop));
        }
        if (present.empty())
            g.terms[uniform_index(rng, dimension)] = static_cast<int>(uniform_index(rng, config.n_terms));
    }

    std::map<std::vector<int>, std::set<ClassLabel>> consequents;
    for (const RuleGene& g : chromosome) consequents[g.terms].insert(g.consequent);
    Chromosome kept;
    std::set<std::vector<int>> emitted;
    for (RuleGene& g : chromosome) {
        if (consequents[g.terms].size() > 1) continue;
        if (!emitted.insert(g.terms).second) continue;
        kept.push_back(std::move(g));
    }
    if (kept.size() > config.m_max) kept.resize(config.m_max);
    if (kept.empty()) kept.push_back(random_gene(dimension, config, rng));

    // Both classes need explicit evidence; otherwise Noisy is only ever predicted
    // through zero activation, which another rule base's Clean evidence overrides.
    if (config.m_max >= 2) {
        for (ClassLabel cls : {ClassLabel::Noisy, ClassLabel::Clean}) {
            const bool present = std::any_of(kept.begin(), kept.end(), [cls](const RuleGene& g) { return g.consequent == cls; });
            if (present) continue;
            RuleGene extra;
            bool unique = false;
            for (int attempt = 0; attempt < 16 && !unique; ++attempt) {
                extra = random_gene(dimension, config, rng);
                extra.consequent = cls;
                unique = std::none_of(kept.begin(), kept.end(), [&](const RuleGene& g) { return g.terms == extra.terms; });
            }
            if (!unique) continue;
            if (kept.size() == config.m_max) kept.back() = std::move(extra);
            else kept.push_back(std::move(extra));
        }
    }
    chromosome = std::move(kept);
}

fuzzy::RuleBase decode(const Chromosome& chromosome, const fuzzy::Partitions& partitions) {
    fuzzy::RuleBase base;
    base.partitions = partitions;
    for (const RuleGene& g : chromosome) {
        fuzzy::FuzzyRule rule;
        for (std::size_t f = 0; f < g.terms.size(); ++f)
            if (g.terms[f] >= 0) rule.antecedents.push_back({f, static_cast<std::size_t>(g.terms[f])});
        rule.consequent = g.consequent;
        base.rules.push_back(std::move(rule));
    }
    return base;
}

namespace {

double fold_mcc(const fuzzy::RuleBase& base, const FoldContext& ctx) {
    const std::size_t n_rules = base.rules.size();
    std::vector<fuzzy::RuleWeights> weights(n_rules);
    for (std::size_t r = 0; r < n_rules; ++r) {
        const auto& rule = base.rules[r];
        double cls_l = 0.0, all_l = 0.0, cls_u = 0.0, all_u = 0.0;
        for (std::size_t i = 0; i < ctx.fit_data.size(); ++i) {
            const auto s = ctx.fit_table.firing_strength(rule, i);
            all_l += s.lower;
            all_u += s.upper;
            if (ctx.fit_data[i].label == rule.consequent) {
                cls_l += s.lower;
                cls_u += s.upper;
            }
        }
        weights[r].lower = all_l > 0.0 ? cls_l / all_l : 0.0;
        weights[r].upper = all_u > 0.0 ? cls_u / all_u : 0.0;
    }

    std::vector<ClassLabel> pred, truth;
    pred.reserve(ctx.eval_data.size());
    truth.reserve(ctx.eval_data.size());
    for (std::size_t i = 0; i < ctx.eval_data.size(); ++i) {
        fuzzy::ClassScores scores;
        for (std::size_t r = 0; r < n_rules; ++r) {
            const auto s = ctx.eval_table.firing_strength(base.rules[r], i);
            const double a = s.lower * weights[r].lower;
            const double b = s.upper * weights[r].upper;
            scores[base.rules[r].consequent] += 0.5 * (a + b);
        }
        pred.push_back(fuzzy::decide(scores));
        truth.push_back(ctx.eval_data[i].label);
    }
    return metrics::report(metrics::confusion(pred, truth)).mcc;
}

}  // namespace

double fitness(const Chromosome& chromosome, std::span<const FoldContext> folds) {
    if (folds.empty()) throw ValidationError("fitness needs at least one fold");
    double sum = 0.0;
    for (const FoldContext& ctx : folds) sum += fold_mcc(decode(chromosome, ctx.partitions), ctx);
    return sum / static_cast<double>(folds.size());
}

double fitness(const Chromosome& chromosome, std::span<const features::LabelledVector> train,
               const CvPlan& plan, const GaConfig& config) {
    const auto folds = prepare_folds(train, plan, config);
    return fitness(chromosome, folds);
}

fuzzy::RuleBase refit(const Chromosome& chromosome, std::span<const features::LabelledVector> train,
                      const GaConfig& config) {
    const auto stats = features::fit_feature_stats(train, config.n_terms);
    fuzzy::RuleBase base = decode(chromosome, fuzzy::build_partitions(stats, config.partition));
    fuzzy::fit_rule_base_weights(base, train);
    return base;
}

namespace {

void evaluate_all(const std::vector<Chromosome>& pop, std::vector<double>& fit, std::size_t first,
                  std::span<const FoldContext> folds, std::size_t threads) {
    const std::size_t n = pop.size();
    if (first >= n) return;
    const std::size_t workers = std::min(threads, n - first);
    if (workers <= 1) {
        for (std::size_t i = first; i < n; ++i) fit[i] = fitness(pop[i], folds);
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = first + w; i < n; i += workers) fit[i] = fitness(pop[i], folds);
        });
    }
}

std::size_t complexity(const Chromosome& c) {
    std::size_t n = 0;
    for (const RuleGene& g : c) n += g.antecedent_count();
    return n;
}

// Fitness first; equal fitness prefers the smaller rule base.
bool fitter(double fa, const Chromosome& a, double fb, const Chromosome& b) {
    if (fa != fb) return fa > fb;
    return complexity(a) < complexity(b);
}

std::size_t tournament(const std::vector<Chromosome>& pop, std::span<const double> fit, std::size_t size,
                       std::mt19937_64& rng) {
    std::size_t best = uniform_index(rng, fit.size());
    for (std::size_t t = 1; t < size; ++t) {
        const std::size_t c = uniform_index(rng, fit.size());
        if (fitter(fit[c], pop[c], fit[best], pop[best])) best = c;
    }
    return best;
}

void mutate(Chromosome& c, std::size_t dimension, const GaConfig& config, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (RuleGene& g : c) {
        if (unit(rng) >= config.mutation_rate) continue;
        switch (uniform_index(rng, 3)) {
            case 0: {
                const std::size_t f = uniform_index(rng, dimension);
                g.terms[f] = g.terms[f] >= 0 ? -1 : static_cast<int>(uniform_index(rng, config.n_terms));
                break;
            }
            case 1: {
                std::vector<std::size_t> present;
                for (std::size_t f = 0; f < dimension; ++f)
                    if (g.terms[f] >= 0) present.push_back(f);
                if (present.empty()) break;
                const std::size_t f = present[uniform_index(rng, present.size())];
                const int shift = 1 + static_cast<int>(uniform_index(rng, config.n_terms - 1));
                g.terms[f] = (g.terms[f] + shift) % static_cast<int>(config.n_terms);
                break;
            }
            default:
                g.consequent = other(g.consequent);
                break;
        }
    }
}

}  // namespace

EvolveResult evolve(std::span<const features::LabelledVector> train, const GaConfig& config) {
    config.validate();
    std::vector<ClassLabel> labels;
    labels.reserve(train.size());
    for (const auto& s : train) labels.push_back(s.label);

    EvolveResult result;
    result.k = choose_k(labels);
    const CvPlan plan = make_cv_plan(labels, result.k, config.seed);
    const auto folds = prepare_folds(train, plan, config);
    const std::size_t dim = train.front().x.dimension();
    const std::size_t n = config.population_size;

    std::vector<Chromosome> pop(n);
    std::vector<double> fit(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = stream(config.seed, 0, i);
        pop[i] = random_chromosome(dim, config, rng);
        repair(pop[i], dim, config, rng);
    }
    evaluate_all(pop, fit, 0, folds, config.threads);

    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (fitter(fit[i], pop[i], fit[best_idx], pop[best_idx])) best_idx = i;
    result.best = pop[best_idx];
    result.best_fitness = fit[best_idx];

    auto log_generation = [&](std::size_t g) {
        const double mean = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(n);
        result.log.push_back({g, result.best_fitness, mean});
    };
    log_generation(0);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t g = 1; g <= config.generations; ++g) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fitter(fit[a], pop[a], fit[b], pop[b]); });

        std::vector<Chromosome> next;
        std::vector<double> next_fit;
        next.reserve(n);
        for (std::size_t e = 0; e < config.elite_count; ++e) {
            next.push_back(pop[order[e]]);
            next_fit.push_back(fit[order[e]]);
        }
        const std::size_t first_child = next.size();
        for (std::size_t pair = 0; next.size() < n; ++pair) {
            auto rng = stream(config.seed, g, pair);
            Chromosome a = pop[tournament(pop, fit, config.tournament_size, rng)];
            Chromosome b = pop[tournament(pop, fit, config.tournament_size, rng)];
            if (unit(rng) < config.crossover_rate) {
                const std::size_t ca = uniform_index(rng, a.size() + 1);
                const std::size_t cb = uniform_index(rng, b.size() + 1);
                Chromosome c1(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(ca));
                c1.insert(c1.end(), b.begin() + static_cast<std::ptrdiff_t>(cb), b.end());
                Chromosome c2(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cb));
                c2.insert(c2.end(), a.begin() + static_cast<std::ptrdiff_t>(ca), a.end());
                a = std::move(c1);
                b = std::move(c2);
            }
            for (Chromosome* child : {&a, &b}) {
                if (next.size() >= n) break;
                mutate(*child, dim, config, rng);
                repair(*child, dim, config, rng);
                next.push_back(std::move(*child));
                next_fit.push_back(0.0);
            }
        }
        pop = std::move(next);
        fit = std::move(next_fit);
        evaluate_all(pop, fit, first_child, folds, config.threads);

        for (std::size_t i = 0; i < n; ++i) {
            if (fitter(fit[i], pop[i], result.best_fitness, result.best)) {
                result.best_fitness = fit[i];
                result.best = pop[i];
            }
        }
        log_generation(g);
    }

    result.base = refit(result.best, train, config);
    return result;
}

StudyModels train_study(std::span<const SubjectTrainingSet> study, const GaConfig& config) {
    config.validate();
    if (study.empty()) throw ValidationError("study has no subjects");
    StudyModels out;

    std::vector<features::LabelledVector> pooled;
    for (const auto& s : study) pooled.insert(pooled.end(), s.train.begin(), s.train.end());
    if (pooled.empty()) throw UntrainableError("no training windows in any subject");
    out.si_training_size = pooled.size();

    EvolveResult si = evolve(pooled, config);
    si.base.origin = fuzzy::Origin::SubjectIndependent;
    out.si = std::move(si.base);
    out.si_log = std::move(si.log);

    for (const auto& s : study) {
        try {
            if (s.train.empty()) throw UntrainableError("subject has no training windows");
            EvolveResult sd = evolve(s.train, config);
            sd.base.origin = fuzzy::Origin::SubjectDependent;
            sd.base.subject_id = s.subject_id;
            out.sd.emplace(s.subject_id, std::move(sd.base));
            out.sd_logs.emplace(s.subject_id, std::move(sd.log));
        } catch (const UntrainableError& e) {
            out.untrainable.emplace(s.subject_id, e.what());
        }
    }
    return out;
}

}  // namespace it2sqa::learner

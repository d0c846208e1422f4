#include "it2sqa/corpus_io.hpp"
#include "it2sqa/experiment.hpp"
#include "it2sqa/fusion.hpp"
#include "it2sqa/learner.hpp"
#include "it2sqa/metrics.hpp"
#include "it2sqa/model_io.hpp"

#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace it2sqa;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Instance {
    features::FeatureStats stats;
    fuzzy::RuleBase sd, si;
    features::FeatureVector x;
};

Instance draw(std::mt19937_64& rng) {
    Instance in;
    in.stats = fixtures::random_stats(rng);
    auto parts = fuzzy::build_partitions(in.stats);
    in.sd = fixtures::random_rule_base(rng, parts);
    in.si = fixtures::random_rule_base(rng, parts);
    in.x = fixtures::random_vector(rng, in.stats);
    return in;
}

ClassLabel oracle_label(const fixtures::OracleScores& s) {
    return s.clean > s.noisy ? ClassLabel::Clean : ClassLabel::Noisy;
}

void fusion_oracle() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    const auto t0 = Clock::now();
    double worst = 0.0;
    int mismatched = 0;
    for (int i = 0; i < 1000; ++i) {
        auto in = draw(rng);
        const double alpha = ua(rng);
        auto d = fusion::classify(in.sd, in.si, alpha, in.x);
        auto o = fixtures::oracle_fused(in.sd, in.si, alpha, in.x);
        worst = std::max({worst, std::abs(d.score_noisy - o.noisy), std::abs(d.score_clean - o.clean)});
        mismatched += d.predicted != oracle_label(o);
    }
    const double t = seconds_since(t0);
    std::ostringstream msg;
    msg << "max score diff " << worst << ", class mismatches " << mismatched << ", " << t << " s";
    verdict(1, worst <= 1e-12 && mismatched == 0 && t < 10.0, msg.str());
}

void boundaries() {
    std::mt19937_64 rng(1002);
    int bad0 = 0, bad1 = 0;
    for (int i = 0; i < 1000; ++i) {
        auto in = draw(rng);
        bad0 += fusion::classify(in.sd, in.si, 0.0, in.x).predicted != fuzzy::decide(fuzzy::class_scores(in.si, in.x));
        bad1 += fusion::classify(in.sd, in.si, 1.0, in.x).predicted != fuzzy::decide(fuzzy::class_scores(in.sd, in.x));
    }
    std::ostringstream msg;
    msg << "alpha=0 vs SI-only mismatches " << bad0 << "/1000, alpha=1 vs SD-only mismatches " << bad1 << "/1000";
    verdict(2, bad0 == 0 && bad1 == 0, msg.str());
}

void affine() {
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        auto in = draw(rng);
        auto s0 = fusion::fused_scores(in.sd, in.si, 0.0, in.x);
        auto s1 = fusion::fused_scores(in.sd, in.si, 1.0, in.x);
        for (int k = 0; k < 100; ++k) {
            const double a = ua(rng);
            auto s = fusion::fused_scores(in.sd, in.si, a, in.x);
            worst = std::max({worst, std::abs(s.noisy - (a * s1.noisy + (1 - a) * s0.noisy)),
                              std::abs(s.clean - (a * s1.clean + (1 - a) * s0.clean))});
        }
    }
    std::ostringstream msg;
    msg << "1000 instances x 100 alphas, max deviation " << worst;
    verdict(3, worst <= 1e-12, msg.str());
}

std::size_t fou_violations(const fuzzy::Partitions& parts) {
    std::size_t bad = 0;
    for (const auto& p : parts) {
        const double lo = p.domain_min(), hi = p.domain_max();
        const double pad = 0.25 * (hi - lo);
        for (std::size_t t = 0; t < p.size(); ++t)
            for (int i = 0; i < 1000; ++i) {
                const double x = lo - pad + (hi - lo + 2 * pad) * i / 999.0;
                const auto m = p.membership(t, x);
                bad += !(m.lower <= m.upper);
            }
    }
    return bad;
}

void metric_identities() {
    std::mt19937_64 rng(1005);
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> len(1, 60);
    double worst_g = 0.0;
    int recount_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = len(rng);
        std::vector<ClassLabel> y(n), p(n);
        double tp = 0, tn = 0, fp = 0, fn = 0;
        for (int i = 0; i < n; ++i) {
            y[i] = coin(rng) ? ClassLabel::Noisy : ClassLabel::Clean;
            p[i] = coin(rng) ? ClassLabel::Noisy : ClassLabel::Clean;
            const bool py = p[i] == ClassLabel::Noisy, yy = y[i] == ClassLabel::Noisy;
            tp += py && yy;
            tn += !py && !yy;
            fp += py && !yy;
            fn += !py && yy;
        }
        auto r = metrics::report(metrics::confusion(p, y));
        worst_g = std::max(worst_g, std::abs(r.gmean * r.gmean - r.sensitivity * r.specificity));
        const double sens = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        const double spec = tn + fp > 0 ? tn / (tn + fp) : 0.0;
        const double d = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
        const double mcc = d > 0 ? (tp * tn - fp * fn) / std::sqrt(d) : 0.0;
        recount_bad += std::abs(r.sensitivity - sens) > 1e-12 || std::abs(r.specificity - spec) > 1e-12 ||
                       std::abs(r.acc - (tp + tn) / n) > 1e-12 || std::abs(r.mcc - mcc) > 1e-12;
    }
    metrics::ConfusionMatrix cm;
    cm.tp = 2;
    cm.tn = 2;
    cm.fp = 1;
    cm.fn = 1;
    const double mcc = metrics::report(cm).mcc;
    std::ostringstream msg;
    msg << "max |gmean^2 - sens*spec| " << worst_g << ", MCC(2,2,1,1) = " << mcc << ", recount mismatches "
        << recount_bad << "/1000";
    verdict(5, worst_g <= 1e-12 && std::abs(mcc - 1.0 / 3.0) <= 1e-12 && recount_bad == 0, msg.str());
}

std::vector<learner::SubjectTrainingSet> training_sets(const std::vector<io::FeatureCorpus>& corpora) {
    std::vector<learner::SubjectTrainingSet> out;
    for (const auto& fc : corpora) out.push_back({fc.subject_id, fc.in_split(Split::Train)});
    return out;
}

std::vector<std::string> serialized(const learner::StudyModels& m) {
    std::vector<std::string> out{io::rule_base_to_json(m.si)};
    for (const auto& [id, base] : m.sd) out.push_back(io::rule_base_to_json(base));
    return out;
}

bool logs_monotone(const std::vector<learner::GenerationLog>& log) {
    for (std::size_t g = 1; g < log.size(); ++g)
        if (log[g].best_fitness < log[g - 1].best_fitness) return false;
    return !log.empty();
}

void ga_sanity(const learner::StudyModels& serial, const std::vector<learner::SubjectTrainingSet>& sets,
               const learner::GaConfig& cfg) {
    std::size_t runs = 1, monotone = logs_monotone(serial.si_log);
    for (const auto& [id, log] : serial.sd_logs) {
        ++runs;
        monotone += logs_monotone(log);
    }
    learner::GaConfig par = cfg;
    par.threads = 4;
    const auto again = learner::train_study(sets, cfg);
    const auto threaded = learner::train_study(sets, par);
    const bool same_serial = serialized(again) == serialized(serial);
    const bool same_parallel = serialized(threaded) == serialized(serial);
    std::ostringstream msg;
    msg << "monotone best-so-far in " << monotone << "/" << runs << " runs; rerun identical " << same_serial
        << ", 4-thread identical " << same_parallel;
    verdict(6, monotone == runs && same_serial && same_parallel, msg.str());
}

bool fold_hygiene(std::span<const features::LabelledVector> train, const learner::GaConfig& cfg, std::string& why) {
    std::vector<ClassLabel> y;
    for (const auto& s : train) y.push_back(s.label);
    const std::size_t k = learner::choose_k(y);
    const auto plan = learner::make_cv_plan(y, k, cfg.seed);
    const auto folds = learner::prepare_folds(train, plan, cfg);
    std::size_t noisy_total = 0;
    for (auto l : y) noisy_total += l == ClassLabel::Noisy;
    std::vector<int> seen(train.size(), 0);
    for (std::size_t f = 0; f < k; ++f) {
        const auto& ctx = folds[f];
        std::set<std::size_t> held(ctx.eval_rows.begin(), ctx.eval_rows.end());
        for (std::size_t i : ctx.fit_rows)
            if (held.contains(i)) return why = "fit and held-out rows overlap", false;
        if (ctx.fit_rows.size() + ctx.eval_rows.size() != train.size()) return why = "fold does not cover the set", false;
        std::size_t noisy = 0;
        for (std::size_t i : ctx.eval_rows) {
            ++seen[i];
            noisy += y[i] == ClassLabel::Noisy;
        }
        const double share = static_cast<double>(noisy_total) / static_cast<double>(k);
        if (std::abs(static_cast<double>(noisy) - share) > 1.0) return why = "fold not stratified", false;
        std::vector<features::LabelledVector> kept;
        for (std::size_t i = 0; i < train.size(); ++i)
            if (!held.contains(i)) kept.push_back(train[i]);
        if (ctx.fit_checksum != learner::checksum(kept)) return why = "fit checksum includes held-out rows", false;
        const auto st = features::fit_feature_stats(std::span<const features::LabelledVector>(kept), cfg.n_terms);
        if (st.breakpoints != ctx.stats.breakpoints || st.min != ctx.stats.min || st.max != ctx.stats.max)
            return why = "fold statistics differ from a fit on the training rows", false;
    }
    for (int c : seen)
        if (c != 1) return why = "held-out folds not a partition", false;
    return true;
}

void cv_hygiene(const std::vector<learner::SubjectTrainingSet>& sets, const learner::GaConfig& cfg) {
    std::vector<features::LabelledVector> pooled;
    for (const auto& s : sets) pooled.insert(pooled.end(), s.train.begin(), s.train.end());
    std::size_t ok = 0, total = 0;
    std::string why;
    total++;
    ok += fold_hygiene(pooled, cfg, why);
    for (const auto& s : sets) {
        total++;
        ok += fold_hygiene(s.train, cfg, why);
    }
    std::ostringstream msg;
    msg << ok << "/" << total << " training sets with disjoint, exhaustive, stratified folds and clean fold statistics";
    if (ok != total) msg << " (" << why << ")";
    verdict(7, ok == total, msg.str());
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

void sweep_shape(const std::vector<fusion::SweepRow>& rows) {
    std::ostringstream per, summary;
    experiment::write_sweep_csv(per, rows);
    experiment::write_sweep_summary_csv(summary, rows);
    const auto p = parse_csv(per.str());
    const auto s = parse_csv(summary.str());
    std::map<std::string, std::vector<double>> by_alpha;
    for (std::size_t i = 1; i < p.size(); ++i) by_alpha[p[i][0]].push_back(io::parse_number(p[i][2]));
    std::size_t exact = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const auto& v = by_alpha[s[i][0]];
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / static_cast<double>(v.size()));
        exact += !v.empty() && io::parse_number(s[i][1]) == mean && io::parse_number(s[i][2]) == sd;
    }
    const std::size_t points = s.size() - 1;
    std::ostringstream msg;
    msg << points << " grid points; " << exact << "/" << points << " summary rows equal recomputation";
    verdict(9, points == 11 && exact == points && rows.size() == 11, msg.str());
}

}  // namespace

int main() {
    fusion_oracle();
    boundaries();
    affine();

    // end-to-end run on the default synthetic study
    const auto t0 = Clock::now();
    const signal::StudyParams params;
    const auto corpora = io::featurize(signal::build_synthetic_study(params));
    const auto sets = training_sets(corpora);
    const learner::GaConfig cfg;
    const auto trained = learner::train_study(sets, cfg);
    const io::ModelSet models = io::to_model_set(trained);
    const auto inputs = experiment::subject_inputs(models, corpora, Split::Validation);
    const auto grid = fusion::default_grid();
    const auto rows = fusion::sweep_alpha(inputs, *models.si, grid);
    const double pipeline_s = seconds_since(t0);

    std::size_t fou_bad = fou_violations(trained.si.partitions), partitions = trained.si.partitions.size();
    for (const auto& [id, base] : trained.sd) {
        fou_bad += fou_violations(base.partitions);
        partitions += base.partitions.size();
    }
    std::mt19937_64 rng(1004);
    for (int i = 0; i < 100; ++i) {
        const auto parts = fuzzy::build_partitions(fixtures::random_stats(rng));
        fou_bad += fou_violations(parts);
        partitions += parts.size();
    }
    verdict(4, fou_bad == 0,
            std::to_string(partitions) + " partitions on a 1000-point grid, " + std::to_string(fou_bad) + " violations");

    metric_identities();
    ga_sanity(trained, sets, cfg);
    cv_hygiene(sets, cfg);

    {
        const auto& best = fusion::best_row(rows);
        const auto fused = experiment::evaluate_fused(models, inputs, best.alpha, "fused");
        double interior = -2.0, interior_alpha = 0.0;
        for (std::size_t i = 1; i + 1 < rows.size(); ++i)
            if (rows[i].mean_mcc > interior) {
                interior = rows[i].mean_mcc;
                interior_alpha = rows[i].alpha;
            }
        const double ends = std::max(rows.front().mean_mcc, rows.back().mean_mcc);
        std::size_t windows = 0, noisy = 0;
        for (const auto& fc : corpora)
            for (const auto& item : fc.items) {
                ++windows;
                noisy += item.label == ClassLabel::Noisy;
            }
        std::ostringstream msg;
        msg << windows << " windows (" << noisy << " noisy), pipeline " << pipeline_s << " s; best alpha "
            << best.alpha << " mean MCC " << best.mean_mcc << " mean ACC " << fused.aggregate.acc.mean
            << "; MCC at alpha 0 " << rows.front().mean_mcc << ", alpha 1 " << rows.back().mean_mcc
            << ", best interior " << interior << " at " << interior_alpha;
        const bool ok = pipeline_s < 300.0 && best.mean_mcc >= 0.6 && fused.aggregate.acc.mean >= 0.85 &&
                        interior >= ends - 0.02;
        verdict(8, ok, msg.str());
    }

    sweep_shape(rows);

    std::printf("%s\n", failures == 0 ? "all criteria passed" : (std::to_string(failures) + " criteria failed").c_str());
    return failures == 0 ? 0 : 1;
}

#include "it2sqa/fusion.hpp"

#include "it2sqa/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace it2sqa::fusion {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        std::ostringstream msg;
        msg << "personalisation score " << alpha << " outside [0, 1]";
        throw ValidationError(msg.str());
    }
}

}  // namespace

FusedModel::FusedModel(std::shared_ptr<const fuzzy::RuleBase> sd, std::shared_ptr<const fuzzy::RuleBase> si,
                       double alpha)
    : sd_(std::move(sd)), si_(std::move(si)), alpha_(alpha) {
    if (!sd_ || !si_) throw ValidationError("fused model needs both rule bases");
    check_alpha(alpha_);
    if (sd_->dimension() != si_->dimension() || sd_->feature_set != si_->feature_set)
        throw ValidationError("SD and SI rule bases use different feature sets");
}

fuzzy::ClassScores fused_scores(const fuzzy::RuleBase& sd, const fuzzy::RuleBase& si, double alpha,
                                const features::FeatureVector& x) {
    check_alpha(alpha);
    const fuzzy::ClassScores a = fuzzy::class_scores(sd, x);
    const fuzzy::ClassScores b = fuzzy::class_scores(si, x);
    return {alpha * a.noisy + (1.0 - alpha) * b.noisy, alpha * a.clean + (1.0 - alpha) * b.clean};
}

SqaDecision make_decision(const fuzzy::ClassScores& scores) {
    SqaDecision d;
    d.score_noisy = scores.noisy;
    d.score_clean = scores.clean;
    d.predicted = fuzzy::decide(scores);
    const double total = scores.noisy + scores.clean;
    d.sqi = total > 0.0 ? scores.clean / total : 0.0;
    return d;
}

SqaDecision classify(const fuzzy::RuleBase& sd, const fuzzy::RuleBase& si, double alpha,
                     const features::FeatureVector& x) {
    return make_decision(fused_scores(sd, si, alpha, x));
}

SqaDecision classify(const FusedModel& model, const features::FeatureVector& x) {
    return classify(model.sd(), model.si(), model.alpha(), x);
}

namespace {

double parse_real(std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ValidationError("bad number '" + std::string(text) + "' in grid");
    return v;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw ValidationError("grid must be given as start:step:stop");
    const double start = parse_real(text.substr(0, c1));
    const double step = parse_real(text.substr(c1 + 1, c2 - c1 - 1));
    const double stop = parse_real(text.substr(c2 + 1));
    if (!(step > 0.0)) throw ValidationError("grid step must be positive");
    if (!(stop >= start)) throw ValidationError("grid stop precedes start");
    check_alpha(start);
    check_alpha(stop);
    const double span = (stop - start) / step;
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // snap accumulated rounding (0.30000000000000004 -> 0.3) so grid labels stay readable
        const double v = start + static_cast<double>(i) * step;
        grid.push_back(std::min(stop, std::round(v * 1e12) / 1e12));
    }
    return grid;
}

std::vector<double> default_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    return grid;
}

std::vector<SweepRow> sweep_alpha(std::span<const SubjectSweepInput> subjects, const fuzzy::RuleBase& si,
                                  std::span<const double> grid) {
    if (subjects.empty()) throw ValidationError("alpha sweep needs at least one subject");
    for (double a : grid) check_alpha(a);

    std::vector<const SubjectSweepInput*> order;
    for (const auto& s : subjects) {
        if (!s.sd) throw ValidationError("subject " + s.subject_id + " has no SD rule base");
        if (s.data.empty()) throw ValidationError("subject " + s.subject_id + " has no data");
        order.push_back(&s);
    }
    std::sort(order.begin(), order.end(),
              [](const auto* a, const auto* b) { return a->subject_id < b->subject_id; });

    // Per-subject, per-rule-base scores do not depend on alpha; compute once.
    struct Cached {
        std::vector<fuzzy::ClassScores> sd, si;
        std::vector<ClassLabel> labels;
    };
    std::vector<Cached> cache(order.size());
    for (std::size_t s = 0; s < order.size(); ++s) {
        for (const auto& item : order[s]->data) {
            cache[s].sd.push_back(fuzzy::class_scores(*order[s]->sd, item.x));
            cache[s].si.push_back(fuzzy::class_scores(si, item.x));
            cache[s].labels.push_back(item.label);
        }
    }

    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double alpha : grid) {
        SweepRow row;
        row.alpha = alpha;
        for (std::size_t s = 0; s < order.size(); ++s) {
            std::vector<ClassLabel> pred;
            pred.reserve(cache[s].labels.size());
            for (std::size_t i = 0; i < cache[s].labels.size(); ++i) {
                const auto& a = cache[s].sd[i];
                const auto& b = cache[s].si[i];
                const fuzzy::ClassScores fused{alpha * a.noisy + (1.0 - alpha) * b.noisy,
                                               alpha * a.clean + (1.0 - alpha) * b.clean};
                pred.push_back(fuzzy::decide(fused));
            }
            row.subject_ids.push_back(order[s]->subject_id);
            row.mcc.push_back(metrics::report(metrics::confusion(pred, cache[s].labels)).mcc);
        }
        const metrics::MeanStd ms = metrics::mean_std(row.mcc);
        row.mean_mcc = ms.mean;
        row.std_mcc = ms.std;
        rows.push_back(std::move(row));
    }
    return rows;
}

const SweepRow& best_row(std::span<const SweepRow> rows) {
    if (rows.empty()) throw ValidationError("empty sweep");
    const SweepRow* best = &rows.front();
    for (const auto& r : rows)
        if (r.mean_mcc > best->mean_mcc) best = &r;
    return *best;
}

}  // namespace it2sqa::fusion

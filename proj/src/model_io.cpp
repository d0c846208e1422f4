#include "it2sqa/model_io.hpp"

#include "it2sqa/corpus_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace it2sqa::io {

using nlohmann::json;

namespace {

json triangle_json(const fuzzy::Triangle& t) {
    return {{"left", t.left}, {"apex", t.apex}, {"right", t.right}, {"height", t.height}};
}

fuzzy::Triangle triangle_from(const json& j) {
    return {j.at("left").get<double>(), j.at("apex").get<double>(), j.at("right").get<double>(),
            j.at("height").get<double>()};
}

}  // namespace

std::string rule_base_to_json(const fuzzy::RuleBase& base) {
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["origin"] = std::string(fuzzy::to_string(base.origin));
    doc["subject_id"] = base.subject_id;
    json names = json::array();
    for (auto n : features::kFeatureNames) names.push_back(std::string(n));
    doc["feature_set"] = {{"id", base.feature_set}, {"dimension", base.dimension()}, {"names", names}};

    json parts = json::array();
    for (const auto& p : base.partitions) {
        json terms = json::array();
        for (const auto& mf : p.terms())
            terms.push_back({{"lower", triangle_json(mf.lower)}, {"upper", triangle_json(mf.upper)}});
        parts.push_back({{"feature", p.feature()},
                         {"domain_min", p.domain_min()},
                         {"domain_max", p.domain_max()},
                         {"terms", terms}});
    }
    doc["partitions"] = parts;

    json rules = json::array();
    for (const auto& r : base.rules) {
        json ants = json::array();
        for (const auto& a : r.antecedents) ants.push_back({{"feature", a.feature}, {"term", a.term}});
        rules.push_back({{"antecedents", ants},
                         {"consequent", std::string(to_string(r.consequent))},
                         {"rw_lower", r.rw_lower},
                         {"rw_upper", r.rw_upper}});
    }
    doc["rules"] = rules;
    return doc.dump(2) + "\n";
}

fuzzy::RuleBase rule_base_from_json(const std::string& text) {
    fuzzy::RuleBase base;
    try {
        const json doc = json::parse(text);
        const int version = doc.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw ValidationError("unsupported model format version " + std::to_string(version));
        base.origin = fuzzy::parse_origin(doc.at("origin").get<std::string>());
        base.subject_id = doc.value("subject_id", std::string{});
        base.feature_set = doc.at("feature_set").at("id").get<std::string>();
        const auto dim = doc.at("feature_set").at("dimension").get<std::size_t>();
        for (const auto& p : doc.at("partitions")) {
            std::vector<fuzzy::IT2TriangularMf> terms;
            for (const auto& t : p.at("terms"))
                terms.push_back(fuzzy::IT2TriangularMf::make(triangle_from(t.at("lower")), triangle_from(t.at("upper"))));
            base.partitions.emplace_back(p.at("feature").get<std::size_t>(), std::move(terms),
                                         p.at("domain_min").get<double>(), p.at("domain_max").get<double>());
        }
        if (base.partitions.size() != dim) throw ValidationError("partition count disagrees with feature dimension");
        for (const auto& r : doc.at("rules")) {
            fuzzy::FuzzyRule rule;
            for (const auto& a : r.at("antecedents"))
                rule.antecedents.push_back({a.at("feature").get<std::size_t>(), a.at("term").get<std::size_t>()});
            rule.consequent = parse_label(r.at("consequent").get<std::string>());
            rule.rw_lower = r.at("rw_lower").get<double>();
            rule.rw_upper = r.at("rw_upper").get<double>();
            base.rules.push_back(std::move(rule));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed model document: ") + e.what());
    }
    if (auto why = base.check()) throw ValidationError("invalid rule base: " + *why);
    return base;
}

void save_rule_base(const std::filesystem::path& path, const fuzzy::RuleBase& base) {
    auto out = open_output(path);
    out << rule_base_to_json(base);
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

fuzzy::RuleBase load_rule_base(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return rule_base_from_json(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_training_log(std::ostream& out, const std::vector<learner::GenerationLog>& log) {
    out << "generation,best_fitness,mean_fitness\n";
    for (const auto& row : log)
        out << row.generation << ',' << format_number(row.best_fitness) << ',' << format_number(row.mean_fitness) << '\n';
}

ModelSet to_model_set(learner::StudyModels models) {
    ModelSet set;
    set.si = std::make_shared<const fuzzy::RuleBase>(std::move(models.si));
    for (auto& [id, base] : models.sd) set.sd.emplace(id, std::make_shared<const fuzzy::RuleBase>(std::move(base)));
    return set;
}

std::vector<std::filesystem::path> save_study_models(const std::filesystem::path& dir,
                                                     const learner::StudyModels& models) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create model directory '" + dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    auto write_log = [&](const std::filesystem::path& p, const std::vector<learner::GenerationLog>& log) {
        auto out = open_output(p);
        write_training_log(out, log);
        written.push_back(p);
    };
    save_rule_base(dir / "si.json", models.si);
    written.push_back(dir / "si.json");
    write_log(dir / "train_log_si.csv", models.si_log);
    for (const auto& [id, base] : models.sd) {
        const auto p = dir / ("sd_" + id + ".json");
        save_rule_base(p, base);
        written.push_back(p);
        write_log(dir / ("train_log_sd_" + id + ".csv"), models.sd_logs.at(id));
    }
    if (!models.untrainable.empty()) {
        const auto p = dir / "untrainable.csv";
        auto out = open_output(p);
        out << "subject_id,reason\n";
        for (const auto& [id, why] : models.untrainable) out << id << ",\"" << why << "\"\n";
        written.push_back(p);
    }
    return written;
}

ModelSet load_model_set(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("model directory '" + dir.string() + "' not found");
    const auto si_path = dir / "si.json";
    if (!std::filesystem::exists(si_path)) throw IoError("missing model file '" + si_path.string() + "'");
    ModelSet set;
    set.si = std::make_shared<const fuzzy::RuleBase>(load_rule_base(si_path));
    if (set.si->origin != fuzzy::Origin::SubjectIndependent) throw ValidationError("si.json is not an SI rule base");

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("sd_", 0) == 0 && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        auto base = load_rule_base(p);
        if (base.origin != fuzzy::Origin::SubjectDependent)
            throw ValidationError(p.string() + " is not an SD rule base");
        if (base.dimension() != set.si->dimension() || base.feature_set != set.si->feature_set)
            throw ValidationError(p.string() + " uses a different feature set than si.json");
        const std::string id = base.subject_id;
        set.sd.emplace(id, std::make_shared<const fuzzy::RuleBase>(std::move(base)));
    }
    return set;
}

}  // namespace it2sqa::io

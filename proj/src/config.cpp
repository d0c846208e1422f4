#include "it2sqa/config.hpp"

#include "it2sqa/corpus_io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

namespace it2sqa::config {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T as_count(double v, std::string_view key) {
    if (v < 0 || v != std::floor(v)) throw ValidationError(std::string(key) + " must be a non-negative integer");
    return static_cast<T>(v);
}

using Setter = std::function<void(RunConfig&, double)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const std::map<std::string, std::map<std::string, Setter>> table{
        {"synth",
         {
             {"subjects", [](RunConfig& c, double v) { c.synth.n_subjects = as_count<std::size_t>(v, "subjects"); }},
             {"windows_per_subject",
              [](RunConfig& c, double v) { c.synth.windows_per_subject = as_count<std::size_t>(v, "windows_per_subject"); }},
             {"noisy_fraction", [](RunConfig& c, double v) { c.synth.noisy_fraction = v; }},
             {"subject_shift", [](RunConfig& c, double v) { c.synth.subject_shift = v; }},
             {"seed", [](RunConfig& c, double v) { c.synth.seed = as_count<std::uint64_t>(v, "seed"); }},
             {"fs", [](RunConfig& c, double v) { c.synth.fs = v; }},
             {"window_seconds", [](RunConfig& c, double v) { c.synth.window_seconds = v; }},
             {"train_fraction", [](RunConfig& c, double v) { c.synth.train_fraction = v; }},
             {"validation_fraction", [](RunConfig& c, double v) { c.synth.validation_fraction = v; }},
         }},
        {"ga",
         {
             {"population_size", [](RunConfig& c, double v) { c.ga.population_size = as_count<std::size_t>(v, "population_size"); }},
             {"generations", [](RunConfig& c, double v) { c.ga.generations = as_count<std::size_t>(v, "generations"); }},
             {"crossover_rate", [](RunConfig& c, double v) { c.ga.crossover_rate = v; }},
             {"mutation_rate", [](RunConfig& c, double v) { c.ga.mutation_rate = v; }},
             {"tournament_size", [](RunConfig& c, double v) { c.ga.tournament_size = as_count<std::size_t>(v, "tournament_size"); }},
             {"elite_count", [](RunConfig& c, double v) { c.ga.elite_count = as_count<std::size_t>(v, "elite_count"); }},
             {"seed", [](RunConfig& c, double v) { c.ga.seed = as_count<std::uint64_t>(v, "seed"); }},
             {"a_max", [](RunConfig& c, double v) { c.ga.a_max = as_count<std::size_t>(v, "a_max"); }},
             {"m_max", [](RunConfig& c, double v) { c.ga.m_max = as_count<std::size_t>(v, "m_max"); }},
             {"n_terms", [](RunConfig& c, double v) { c.ga.n_terms = as_count<std::size_t>(v, "n_terms"); }},
             {"threads", [](RunConfig& c, double v) { c.ga.threads = as_count<std::size_t>(v, "threads"); }},
             {"delta", [](RunConfig& c, double v) { c.ga.partition.delta = v; }},
             {"lower_height", [](RunConfig& c, double v) { c.ga.partition.lower_height = v; }},
         }},
    };
    return table;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    std::ostringstream msg;
    msg << "config line " << line_no << ": " << what;
    throw ValidationError(msg.str());
}

}  // namespace

RunConfig parse_config(std::istream& in, RunConfig base) {
    RunConfig cfg = std::move(base);
    const auto& table = schema();
    const std::map<std::string, Setter>* section = nullptr;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line_no, "malformed section header");
            const std::string name(trim(s.substr(1, s.size() - 2)));
            const auto it = table.find(name);
            if (it == table.end()) fail(line_no, "unknown section [" + name + "]");
            section = &it->second;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const std::string key(trim(s.substr(0, eq)));
        const std::string_view value = trim(s.substr(eq + 1));
        if (!section) fail(line_no, "key '" + key + "' outside a [synth] or [ga] section");
        const auto setter = section->find(key);
        if (setter == section->end()) fail(line_no, "unknown key '" + key + "'");
        try {
            setter->second(cfg, io::parse_number(value));
        } catch (const ValidationError& e) {
            fail(line_no, e.what());
        }
    }
    cfg.ga.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    return parse_config(in, std::move(base));
}

}  // namespace it2sqa::config

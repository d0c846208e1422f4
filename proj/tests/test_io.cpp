#include "it2sqa/config.hpp"
#include "it2sqa/corpus_io.hpp"
#include "it2sqa/model_io.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace it2sqa;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("it2sqa_io_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<signal::SubjectCorpus> small_study() {
    signal::StudyParams p;
    p.n_subjects = 2;
    p.windows_per_subject = 12;
    p.noisy_fraction = 0.25;
    return signal::build_synthetic_study(p);
}

void expect_same_partitions(const fuzzy::Partitions& a, const fuzzy::Partitions& b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t f = 0; f < a.size(); ++f) {
        EXPECT_EQ(a[f].domain_min(), b[f].domain_min());
        EXPECT_EQ(a[f].domain_max(), b[f].domain_max());
        ASSERT_EQ(a[f].size(), b[f].size());
        for (std::size_t t = 0; t < a[f].size(); ++t)
            for (auto tri : {&fuzzy::IT2TriangularMf::lower, &fuzzy::IT2TriangularMf::upper}) {
                const auto& x = a[f].terms()[t].*tri;
                const auto& y = b[f].terms()[t].*tri;
                EXPECT_EQ(x.left, y.left);
                EXPECT_EQ(x.apex, y.apex);
                EXPECT_EQ(x.right, y.right);
                EXPECT_EQ(x.height, y.height);
            }
    }
}

}  // namespace

TEST(Numbers, ShortestRoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) / 7.0;
        EXPECT_EQ(io::parse_number(io::format_number(v)), v);
    }
    EXPECT_EQ(io::format_number(0.1), "0.1");
    EXPECT_THROW(io::parse_number("1.5x"), ValidationError);
    EXPECT_THROW(io::parse_number(""), ValidationError);
}

TEST(Corpus, RoundTrip) {
    auto study = small_study();
    std::stringstream ss;
    io::write_corpus_csv(ss, study);
    auto back = io::read_corpus_csv(ss);
    ASSERT_EQ(back.size(), study.size());
    for (std::size_t s = 0; s < study.size(); ++s) {
        EXPECT_EQ(back[s].subject_id, study[s].subject_id);
        EXPECT_EQ(back[s].splits, study[s].splits);
        ASSERT_EQ(back[s].windows.size(), study[s].windows.size());
        for (std::size_t w = 0; w < study[s].windows.size(); ++w) {
            EXPECT_EQ(back[s].windows[w].samples, study[s].windows[w].samples);
            EXPECT_EQ(back[s].windows[w].label, study[s].windows[w].label);
            EXPECT_EQ(back[s].windows[w].window_index, study[s].windows[w].window_index);
        }
    }
}

TEST(Corpus, CorruptRowNamed) {
    auto study = small_study();
    std::stringstream ss;
    io::write_corpus_csv(ss, study);
    std::vector<std::string> lines;
    for (std::string l; std::getline(ss, l);) lines.push_back(l);
    lines[5] = lines[5].substr(0, lines[5].rfind(',')) + ",abc";
    std::stringstream bad;
    for (const auto& l : lines) bad << l << '\n';
    try {
        io::read_corpus_csv(bad);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("row 6"), std::string::npos) << e.what();
    }
}

TEST(Corpus, BadHeaderAndLabel) {
    std::stringstream a("subject,window_index,split,label,s0\nA,0,train,clean,1\n");
    EXPECT_THROW(io::read_corpus_csv(a), ValidationError);
    std::stringstream b("subject_id,window_index,split,label,s0\nA,0,train,meh,1\n");
    EXPECT_THROW(io::read_corpus_csv(b), ValidationError);
    EXPECT_THROW(io::read_corpus_csv(fs::path("/nonexistent/corpus.csv")), IoError);
}

TEST(RawSignal, HeaderOptional) {
    auto dir = scratch_dir("raw");
    {
        std::ofstream(dir / "a.csv") << "ppg\n1\n2.5\n-3\n";
        std::ofstream(dir / "b.csv") << "1\n2.5\n-3\n";
        std::ofstream(dir / "c.csv") << "1\nx\n";
    }
    const std::vector<double> want{1, 2.5, -3};
    EXPECT_EQ(io::read_raw_signal_csv(dir / "a.csv"), want);
    EXPECT_EQ(io::read_raw_signal_csv(dir / "b.csv"), want);
    EXPECT_THROW(io::read_raw_signal_csv(dir / "c.csv"), ValidationError);
    fs::remove_all(dir);
}

TEST(FeatureTable, OneRowPerWindow) {
    auto fc = io::featurize(small_study());
    std::stringstream ss;
    io::write_feature_table_csv(ss, fc);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "subject_id,window_index,split,label,f0,f1,f2,f3");
    std::size_t rows = 0;
    for (std::string l; std::getline(ss, l);) ++rows;
    EXPECT_EQ(rows, 24u);
    std::size_t train = 0;
    for (const auto& c : fc) train += c.in_split(Split::Train).size();
    EXPECT_GT(train, 0u);
}

TEST(ModelJson, LosslessRoundTrip) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        auto st = fixtures::random_stats(rng);
        auto base = fixtures::random_rule_base(rng, fuzzy::build_partitions(st));
        base.origin = trial % 2 ? fuzzy::Origin::SubjectDependent : fuzzy::Origin::SubjectIndependent;
        base.subject_id = trial % 2 ? "S07" : "";
        const auto text = io::rule_base_to_json(base);
        auto back = io::rule_base_from_json(text);
        EXPECT_EQ(io::rule_base_to_json(back), text);
        EXPECT_EQ(back.origin, base.origin);
        EXPECT_EQ(back.subject_id, base.subject_id);
        expect_same_partitions(back.partitions, base.partitions);
        ASSERT_EQ(back.rules.size(), base.rules.size());
        for (std::size_t r = 0; r < base.rules.size(); ++r) {
            EXPECT_EQ(back.rules[r].antecedents, base.rules[r].antecedents);
            EXPECT_EQ(back.rules[r].consequent, base.rules[r].consequent);
            EXPECT_EQ(back.rules[r].rw_lower, base.rules[r].rw_lower);
            EXPECT_EQ(back.rules[r].rw_upper, base.rules[r].rw_upper);
        }
        auto x = fixtures::random_vector(rng, st);
        EXPECT_EQ(fuzzy::class_scores(back, x).clean, fuzzy::class_scores(base, x).clean);
    }
}

TEST(ModelJson, InvalidDocumentsRejected) {
    std::mt19937_64 rng(4);
    auto base = fixtures::random_rule_base(rng, fuzzy::build_partitions(fixtures::random_stats(rng)));
    auto text = io::rule_base_to_json(base);
    EXPECT_THROW(io::rule_base_from_json("{"), ValidationError);
    EXPECT_THROW(io::rule_base_from_json("{}"), ValidationError);
    auto pos = text.find("\"format_version\"");
    ASSERT_NE(pos, std::string::npos);
    auto bumped = text;
    bumped.replace(text.find('1', pos), 1, "9");
    EXPECT_THROW(io::rule_base_from_json(bumped), ValidationError);
}

TEST(ModelDir, SaveAndLoad) {
    std::mt19937_64 rng(6);
    auto parts = fuzzy::build_partitions(fixtures::random_stats(rng));
    learner::StudyModels models;
    models.si = fixtures::random_rule_base(rng, parts);
    for (std::string id : {"S01", "S02"}) {
        auto b = fixtures::random_rule_base(rng, parts);
        b.origin = fuzzy::Origin::SubjectDependent;
        b.subject_id = id;
        models.sd.emplace(id, b);
        models.sd_logs[id] = {{0, 0.5, 0.25}, {1, 0.75, 0.5}};
    }
    models.si_log = {{0, 0.5, 0.25}};
    models.untrainable.emplace("S03", "minority class has 2 windows");
    auto dir = scratch_dir("models");
    auto written = io::save_study_models(dir, models);
    for (const char* f : {"si.json", "sd_S01.json", "sd_S02.json", "train_log_si.csv", "train_log_sd_S01.csv",
                          "untrainable.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    auto set = io::load_model_set(dir);
    EXPECT_EQ(set.sd.size(), 2u);
    EXPECT_EQ(io::rule_base_to_json(*set.si), io::rule_base_to_json(models.si));
    EXPECT_EQ(io::rule_base_to_json(*set.sd.at("S02")), io::rule_base_to_json(models.sd.at("S02")));

    fs::remove(dir / "si.json");
    EXPECT_THROW(io::load_model_set(dir), IoError);
    fs::remove_all(dir);
}

TEST(TrainingLog, Columns) {
    std::stringstream ss;
    io::write_training_log(ss, {{0, 0.5, 0.25}, {1, 0.75, 0.5}});
    EXPECT_EQ(ss.str(), "generation,best_fitness,mean_fitness\n0,0.5,0.25\n1,0.75,0.5\n");
}

TEST(Config, SectionsAndOverrides) {
    std::stringstream ss(R"(# study
[synth]
subjects = 4
noisy_fraction = 0.3
seed = 9

[ga]
population_size = 12
generations = 5
delta = 0.2
)");
    auto cfg = config::parse_config(ss);
    EXPECT_EQ(cfg.synth.n_subjects, 4u);
    EXPECT_EQ(cfg.synth.noisy_fraction, 0.3);
    EXPECT_EQ(cfg.synth.seed, 9u);
    EXPECT_EQ(cfg.synth.windows_per_subject, 33u);
    EXPECT_EQ(cfg.ga.population_size, 12u);
    EXPECT_EQ(cfg.ga.generations, 5u);
    EXPECT_EQ(cfg.ga.partition.delta, 0.2);
    EXPECT_EQ(cfg.ga.mutation_rate, 0.1);
}

TEST(Config, UnknownKeyRejectedWithLine) {
    std::stringstream ss("[ga]\npopulation_size = 10\npopulaton = 3\n");
    try {
        config::parse_config(ss);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    std::stringstream s2("[model]\nx = 1\n");
    EXPECT_THROW(config::parse_config(s2), ValidationError);
    std::stringstream s3("[ga]\ngenerations = 2.5\n");
    EXPECT_THROW(config::parse_config(s3), ValidationError);
    EXPECT_THROW(config::load_config("/nonexistent/run.toml"), IoError);
}

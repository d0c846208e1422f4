#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// per process: ctest may run the discovered cases in parallel
const fs::path kRoot = fs::temp_directory_path() / ("it2sqa_cli_tests_" + std::to_string(::getpid()));

struct Run {
    int code = -1;
    std::string err;
};

Run run(const std::string& args) {
    const fs::path err = kRoot / "stderr.txt";
    const std::string cmd = std::string(IT2SQA_CLI_PATH) + " " + args + " >/dev/null 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    r.err = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

double num(const std::string& s) {
    double v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        fs::remove_all(kRoot);
        fs::create_directories(kRoot);
        ASSERT_EQ(run("synth --out " + (kRoot / "corpus").string()).code, 0);
        ASSERT_EQ(run("train --corpus " + corpus().string() + " --out " + (kRoot / "models").string()).code, 0);
    }
    static void TearDownTestSuite() { fs::remove_all(kRoot); }
    static fs::path corpus() { return kRoot / "corpus" / "corpus.csv"; }
    static fs::path models() { return kRoot / "models"; }
};

}  // namespace

TEST_F(Cli, SynthDefaultCorpus) {
    auto rows = read_csv(corpus());
    ASSERT_EQ(rows.size(), 331u);
    EXPECT_EQ(rows[0][0], "subject_id");
    EXPECT_EQ(rows[0].size(), 604u);
    std::map<std::string, int> subjects;
    int noisy = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        subjects[rows[i][0]]++;
        noisy += rows[i][3] == "noisy";
    }
    EXPECT_EQ(subjects.size(), 10u);
    EXPECT_NEAR(noisy, 62, 3);
    EXPECT_TRUE(fs::exists(kRoot / "corpus" / "features.csv"));
    EXPECT_TRUE(fs::exists(kRoot / "corpus" / "manifest.json"));
}

TEST_F(Cli, SynthDeterministic) {
    const auto a = kRoot / "s7a", b = kRoot / "s7b";
    ASSERT_EQ(run("synth --seed 7 --out " + a.string()).code, 0);
    ASSERT_EQ(run("synth --seed 7 --out " + b.string()).code, 0);
    EXPECT_EQ(slurp(a / "corpus.csv"), slurp(b / "corpus.csv"));
    EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
    EXPECT_NE(slurp(a / "corpus.csv"), slurp(corpus()));
}

TEST_F(Cli, SynthSingleSubject) {
    const auto d = kRoot / "one";
    ASSERT_EQ(run("synth --subjects 1 --out " + d.string()).code, 0);
    auto rows = read_csv(d / "corpus.csv");
    EXPECT_EQ(rows.size(), 34u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][0], "S01");
}

TEST_F(Cli, TrainWritesElevenModels) {
    int json = 0;
    for (const auto& e : fs::directory_iterator(models()))
        if (e.path().extension() == ".json" && e.path().filename() != "manifest.json") ++json;
    EXPECT_EQ(json, 11);
    EXPECT_TRUE(fs::exists(models() / "si.json"));
    EXPECT_TRUE(fs::exists(models() / "sd_S10.json"));
    EXPECT_TRUE(fs::exists(models() / "train_log_si.csv"));
}

TEST_F(Cli, TrainRerunIdentical) {
    const auto d = kRoot / "models2";
    ASSERT_EQ(run("train --threads 3 --corpus " + corpus().string() + " --out " + d.string()).code, 0);
    for (const auto& e : fs::directory_iterator(models())) {
        if (e.path().filename() == "manifest.json") continue;
        EXPECT_EQ(slurp(e.path()), slurp(d / e.path().filename())) << e.path();
    }
}

TEST_F(Cli, CorruptRowRejected) {
    std::ifstream in(corpus());
    std::ofstream out(kRoot / "bad.csv");
    std::string line;
    for (int i = 1; std::getline(in, line); ++i) {
        if (i == 42) line.replace(line.find(',', line.find(',') + 1) - 1, 1, "x");
        out << line << '\n';
    }
    out.close();
    auto r = run("train --corpus " + (kRoot / "bad.csv").string() + " --out " + (kRoot / "badm").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("42"), std::string::npos) << r.err;
}

TEST_F(Cli, EvaluateRows) {
    const auto d = kRoot / "eval";
    ASSERT_EQ(run("evaluate --models " + models().string() + " --corpus " + corpus().string() + " --alpha 0.7 --out " +
                  d.string())
                  .code,
              0);
    auto rows = read_csv(d / "report.csv");
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[1][0], "global");
    EXPECT_EQ(num(rows[1][1]), 0.0);
    EXPECT_EQ(rows[2][0], "personalised");
    EXPECT_EQ(num(rows[2][1]), 1.0);
    EXPECT_EQ(rows[3][0], "fused");
    EXPECT_EQ(num(rows[3][1]), 0.7);
    EXPECT_TRUE(fs::exists(d / "report_per_subject.csv"));
    EXPECT_TRUE(fs::exists(d / "manifest.json"));
}

TEST_F(Cli, EvaluateUsageErrors) {
    EXPECT_EQ(run("evaluate --models " + models().string() + " --corpus " + corpus().string() + " --alpha 1.5 --out " +
                  (kRoot / "e2").string())
                  .code,
              2);
    EXPECT_NE(run("evaluate --models " + (kRoot / "nothing").string() + " --corpus " + corpus().string() +
                  " --out " + (kRoot / "e3").string())
                  .code,
              0);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, EvaluateTrainSplitFits) {
    const auto d = kRoot / "evaltrain";
    ASSERT_EQ(run("evaluate --models " + models().string() + " --corpus " + corpus().string() +
                  " --split train --alpha 1 --out " + d.string())
                  .code,
              0);
    auto rows = read_csv(d / "report.csv");
    const auto& h = rows[0];
    const auto col = std::find(h.begin(), h.end(), "acc_mean") - h.begin();
    EXPECT_GE(num(rows[2][col]), 0.9);
}

TEST_F(Cli, SweepDefaultGrid) {
    const auto d = kRoot / "sweep";
    ASSERT_EQ(run("sweep --models " + models().string() + " --corpus " + corpus().string() + " --out " + d.string()).code,
              0);
    auto summary = read_csv(d / "sweep_summary.csv");
    ASSERT_EQ(summary.size(), 12u);
    EXPECT_EQ(summary[0], (std::vector<std::string>{"alpha", "mean_mcc", "std_mcc"}));
    auto per = read_csv(d / "sweep.csv");
    std::map<std::string, std::vector<double>> by_alpha;
    for (std::size_t i = 1; i < per.size(); ++i) by_alpha[per[i][0]].push_back(num(per[i][2]));
    for (std::size_t k = 1; k < summary.size(); ++k) {
        EXPECT_NEAR(num(summary[k][0]), (k - 1) / 10.0, 1e-12);
        const auto& v = by_alpha.at(summary[k][0]);
        ASSERT_EQ(v.size(), 10u);
        double mean = 0;
        for (double x : v) mean += x;
        mean /= v.size();
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        EXPECT_EQ(num(summary[k][1]), mean);
        EXPECT_EQ(num(summary[k][2]), std::sqrt(ss / v.size()));
    }
}

TEST_F(Cli, SweepCustomGrid) {
    const auto d = kRoot / "sweep05";
    ASSERT_EQ(run("sweep --grid 0:0.05:1 --models " + models().string() + " --corpus " + corpus().string() + " --out " +
                  d.string())
                  .code,
              0);
    EXPECT_EQ(read_csv(d / "sweep_summary.csv").size(), 22u);
    EXPECT_EQ(run("sweep --grid 0:0:1 --models " + models().string() + " --corpus " + corpus().string() + " --out " +
                  d.string())
                  .code,
              2);
}

TEST_F(Cli, ClassifyRawSignal) {
    {
        std::ofstream f(kRoot / "sig.csv");
        for (int i = 0; i < 1800; ++i) f << std::sin(i * 2 * 3.14159265 / 160.0) + 0.4 * std::sin(i * 4 * 3.14159265 / 160.0) << '\n';
    }
    const auto d = kRoot / "cls";
    ASSERT_EQ(run("classify --models " + models().string() + " --input " + (kRoot / "sig.csv").string() +
                  " --subject S03 --out " + d.string())
                  .code,
              0);
    auto rows = read_csv(d / "decisions.csv");
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_TRUE(rows[i][1] == "clean" || rows[i][1] == "noisy");
        const double sqi = num(rows[i][4]);
        EXPECT_GE(sqi, 0.0);
        EXPECT_LE(sqi, 1.0);
    }
}

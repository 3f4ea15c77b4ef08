#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "screenseg/screenseg.hpp"

namespace fs = std::filesystem;
using namespace screenseg;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SCREENSEG_BIN) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Run run_stdout(const std::string& args) {
  const std::string cmd = std::string(SCREENSEG_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("screenseg_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, AnalyzeBlankPng) {
  const auto d = scratch("blank");
  write_png((d / "blank.png").string(), RgbImage(120, 200, Rgb{255, 255, 255}));
  const auto r = run_stdout("analyze " + (d / "blank.png").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], "screenseg/1");
  EXPECT_TRUE(j["root"]["children"].empty());
}

TEST(Cli, GenAnalyzeEval) {
  const auto d = scratch("corpus");
  const auto g = d / "gt";
  const auto p = d / "pred";
  fs::create_directories(p);
  ASSERT_EQ(run("gen --seed 3 --count 3 --out " + g.string() + " --proposals --scoremaps").code, 0);
  EXPECT_TRUE(fs::exists(g / "manifest.json"));
  for (int i = 3; i < 6; ++i) {
    const std::string stem = "synth_00000" + std::to_string(i);
    const auto r = run("analyze " + (g / (stem + ".png")).string() + " --backend proposals=" +
                       (g / (stem + ".jsonl")).string() + " --scoremaps " + (g / (stem + ".sseg")).string() +
                       " --out " + (p / (stem + ".json")).string() + " --overlay " + (p / (stem + ".png")).string() +
                       " --timing");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("gridblocks"), std::string::npos);
    EXPECT_TRUE(fs::exists(p / (stem + ".png")));
  }
  const auto e = run_stdout("eval --pred " + p.string() + " --gt " + g.string() + " --json");
  ASSERT_EQ(e.code, 0) << e.out;
  const auto j = nlohmann::json::parse(e.out);
  EXPECT_GE(j["overall"]["precision"].get<double>(), 0.9);
  EXPECT_GE(j["overall"]["recall"].get<double>(), 0.9);
}

TEST(Cli, EvalAgainstItselfIsPerfect) {
  const auto d = scratch("self");
  ASSERT_EQ(run("gen --seed 9 --count 2 --out " + d.string()).code, 0);
  const auto e = run_stdout("eval --pred " + d.string() + " --gt " + d.string());
  ASSERT_EQ(e.code, 0) << e.out;
  EXPECT_NE(e.out.find("overall        1.000   1.000   1.000"), std::string::npos) << e.out;
}

TEST(Cli, NmsBenchDeterministic) {
  const auto a = run_stdout("nms-bench --seed 7 --images 50");
  const auto b = run_stdout("nms-bench --seed 7 --images 50 --threads 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("weighted"), std::string::npos);
}

TEST(Cli, Gradcheck) {
  const auto r = run_stdout("gradcheck --trials 20");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("logcosh_pool"), std::string::npos);
}

TEST(Cli, Anchors) {
  const auto d = scratch("anchors");
  ASSERT_EQ(run("gen --seed 1 --count 4 --out " + d.string()).code, 0);
  const auto r = run_stdout("anchors --annotations " + d.string() + " --k 4 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(nlohmann::json::parse(r.out)["shapes"].size(), 4u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("analyze").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("analyze /nonexistent/x.png").code, 1);
  const auto d = scratch("bad");
  std::ofstream(d / "garbage.png") << "not an image";
  EXPECT_EQ(run("analyze " + (d / "garbage.png").string()).code, 1);
  write_png((d / "ok.png").string(), RgbImage(64, 64, Rgb{255, 255, 255}));
  std::ofstream(d / "p.jsonl") << R"({"class":"text","score":2,"cx":1,"cy":1,"w":1,"h":1})" << "\n";
  EXPECT_EQ(run("analyze " + (d / "ok.png").string() + " --backend proposals=" + (d / "p.jsonl").string()).code, 1);
  EXPECT_EQ(run("analyze " + (d / "ok.png").string() + " --granularity page").code, 1);
  EXPECT_EQ(run("eval --pred " + d.string() + " --gt " + (d / "missing").string()).code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

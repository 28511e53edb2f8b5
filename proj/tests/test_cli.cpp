#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <vector>

#include "vlaw/cli/cli.hpp"
#include "vlaw/common/util.hpp"
#include "vlaw/loop/run.hpp"

using namespace vlaw;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("vlaw");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return cli::cli_main(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    std::string path;
    explicit TempDir(const std::string& name) : path("tmp_" + name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_micro_config(const std::string& path) {
    std::ofstream out(path);
    out << "families = wipe2d,draw2d\n"
           "loop.k_real = 4\n"
           "loop.n_syn = 6\n"
           "loop.k_iter = 1\n"
           "wm.steps = 60\n"
           "wm.pretrain_steps = 60\n"
           "wm.batch = 16\n"
           "wm.hidden = 16\n"
           "wm.t_steps = 8\n"
           "policy.steps = 40\n"
           "policy.warmstart_steps = 60\n"
           "policy.batch = 16\n"
           "policy.hidden = 16\n"
           "rm.steps = 30\n"
           "rm.batch = 16\n"
           "rm.hidden = 8\n"
           "data.expert_demos = 4\n"
           "data.pretrain_demos = 6\n"
           "eval.episodes = 4\n";
}

std::uint64_t artifact_hash(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename() != "timings.json") {
            files.push_back(fs::relative(entry.path(), dir).string());
        }
    }
    std::sort(files.begin(), files.end());
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& rel : files) {
        h = fnv1a(rel.data(), rel.size(), h);
        const std::string body = read_file(dir + "/" + rel);
        h = fnv1a(body.data(), body.size(), h);
    }
    return h;
}

}  // namespace

TEST_CASE("cli: repeated loop runs with one seed produce hash-equal artifacts") {
    TempDir cfg_dir("cli_cfg");
    const std::string cfg_path = cfg_dir.path + "/micro.cfg";
    write_micro_config(cfg_path);
    TempDir a("cli_loop_a");
    TempDir b("cli_loop_b");
    CHECK(run_cli({"loop", "--config", cfg_path, "--run-dir", a.path, "--seed", "7"}) == 0);
    CHECK(run_cli({"loop", "--config", cfg_path, "--run-dir", b.path, "--seed", "7", "--jobs",
                   "2"}) == 0);
    CHECK(artifact_hash(a.path) == artifact_hash(b.path));
}

TEST_CASE("cli: staged subcommands equal one loop iteration bit for bit") {
    TempDir cfg_dir("cli_cfg2");
    const std::string cfg_path = cfg_dir.path + "/micro.cfg";
    write_micro_config(cfg_path);
    TempDir staged("cli_staged");
    TempDir looped("cli_looped");
    CHECK(run_cli({"warmstart", "--config", cfg_path, "--run-dir", staged.path, "--seed", "7"}) == 0);
    CHECK(run_cli({"collect", "--run-dir", staged.path, "--iter", "1"}) == 0);
    CHECK(run_cli({"train-wm", "--run-dir", staged.path, "--iter", "1"}) == 0);
    CHECK(run_cli({"dream", "--run-dir", staged.path, "--iter", "1"}) == 0);
    CHECK(run_cli({"train-policy", "--run-dir", staged.path, "--iter", "1"}) == 0);
    CHECK(run_cli({"loop", "--config", cfg_path, "--run-dir", looped.path, "--seed", "7"}) == 0);
    CHECK(artifact_hash(staged.path) == artifact_hash(looped.path));
}

TEST_CASE("cli: unknown override keys exit with code 2") {
    TempDir tmp("cli_badkey");
    CHECK(run_cli({"loop", "--run-dir", tmp.path, "--set", "loop.bogus=1"}) == 2);
    CHECK(run_cli({"loop", "--run-dir", tmp.path, "--set", "loop.n_syn=abc"}) == 2);
}

TEST_CASE("cli: eval without checkpoints exits with code 3") {
    TempDir tmp("cli_noart");
    CHECK(run_cli({"eval", "--run-dir", tmp.path}) == 3);
    // snapshot alone is not enough either
    loop::RunConfig cfg;
    loop::config_save(cfg, tmp.path + "/config.snapshot");
    CHECK(run_cli({"eval", "--run-dir", tmp.path}) == 3);
}

TEST_CASE("cli: conflicting snapshot is a config error") {
    TempDir cfg_dir("cli_cfg3");
    const std::string cfg_path = cfg_dir.path + "/micro.cfg";
    write_micro_config(cfg_path);
    TempDir tmp("cli_conflict");
    CHECK(run_cli({"warmstart", "--config", cfg_path, "--run-dir", tmp.path, "--seed", "7"}) == 0);
    CHECK(run_cli({"collect", "--run-dir", tmp.path, "--iter", "1", "--seed", "8"}) == 2);
    CHECK(run_cli({"collect", "--run-dir", tmp.path, "--iter", "1", "--seed", "7", "--config",
                   cfg_path}) == 0);
}

TEST_CASE("cli: missing prerequisites for a phase exit with code 3") {
    TempDir cfg_dir("cli_cfg4");
    const std::string cfg_path = cfg_dir.path + "/micro.cfg";
    write_micro_config(cfg_path);
    TempDir tmp("cli_phase3");
    CHECK(run_cli({"warmstart", "--config", cfg_path, "--run-dir", tmp.path}) == 0);
    // dream before collect/train-wm: world-model checkpoint for iter 1 missing
    CHECK(run_cli({"dream", "--run-dir", tmp.path, "--iter", "1"}) == 3);
}

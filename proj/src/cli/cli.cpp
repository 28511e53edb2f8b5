#include "vlaw/cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vlaw/common/util.hpp"
#include "vlaw/eval/evalkit.hpp"
#include "vlaw/loop/config.hpp"
#include "vlaw/loop/run.hpp"

namespace vlaw::cli {

namespace fs = std::filesystem;
using loop::ConfigError;
using loop::MissingArtifact;
using loop::RunConfig;
using loop::RunPaths;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string run_dir;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    int iter = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_iter) {
    cmd->add_option("--config", args.config_path, "config file (key = value lines)");
    cmd->add_option("--run-dir", args.run_dir, "run directory")->required();
    cmd->add_option("--set", args.sets, "override, key=value (repeatable)");
    cmd->add_option("--seed", args.seed, "master seed override");
    cmd->add_option("--jobs", args.jobs, "worker cap; never affects results");
    if (with_iter) {
        cmd->add_option("--iter", args.iter, "iteration index (1-based)");
    }
}

RunConfig build_cfg(const CommonArgs& args) {
    RunConfig cfg = loop::config_load(args.config_path, args.sets);
    if (args.seed) {
        cfg.seed = *args.seed;
    }
    cfg.jobs = args.jobs;
    return cfg;
}

// Run-starting commands write the snapshot; a pre-existing one must match.
RunConfig cfg_for_run_start(const CommonArgs& args) {
    RunConfig cfg = build_cfg(args);
    const RunPaths paths{args.run_dir};
    fs::create_directories(args.run_dir);
    const std::string snap = loop::config_snapshot(cfg);
    if (fs::exists(paths.snapshot())) {
        if (read_file(paths.snapshot()) != snap) {
            throw ConfigError("config.snapshot",
                              "config: run directory already holds a different config snapshot");
        }
    } else {
        std::ofstream out(paths.snapshot(), std::ios::trunc);
        out << snap;
    }
    return cfg;
}

// Phase commands run under the stored snapshot; explicit flags must agree.
RunConfig cfg_for_phase(const CommonArgs& args) {
    const RunPaths paths{args.run_dir};
    loop::require_file(paths.snapshot());
    RunConfig cfg = loop::config_load_snapshot(paths.snapshot());
    if (!args.config_path.empty() || !args.sets.empty() || args.seed) {
        RunConfig given = build_cfg(args);
        if (loop::config_snapshot(given) != loop::config_snapshot(cfg)) {
            throw ConfigError("config.snapshot",
                              "config: flags disagree with the run's config snapshot");
        }
    }
    cfg.jobs = args.jobs;
    return cfg;
}

void write_table(const eval::EvalTable& table, const std::string& dir, const std::string& stem) {
    fs::create_directories(dir);
    {
        std::ofstream out(dir + "/" + stem + ".csv", std::ios::trunc);
        out << table.to_csv();
    }
    {
        std::ofstream out(dir + "/" + stem + ".json", std::ios::trunc);
        out << table.to_json();
    }
    std::cout << table.to_csv();
}

int completed_iterations(const std::string& run_dir) {
    const RunPaths paths{run_dir};
    int k = 0;
    while (fs::exists(paths.pi_ckpt(k + 1))) {
        ++k;
    }
    return k;
}

int cmd_eval(const CommonArgs& args) {
    const RunConfig cfg = cfg_for_phase(args);
    const RunPaths paths{args.run_dir};
    loop::require_file(paths.pi_ckpt(0));
    eval::EvalTable table;
    const policy::Policy base = policy::load_policy(paths.pi_ckpt(0));
    const eval::EvalTable base_rows =
        eval::success_table(base, cfg.families, cfg.eval_episodes, cfg, "base");
    table.rows = base_rows.rows;
    for (int k = 1; k <= completed_iterations(args.run_dir); ++k) {
        const policy::Policy pi = policy::load_policy(paths.pi_ckpt(k));
        const eval::EvalTable rows =
            eval::success_table(pi, cfg.families, cfg.eval_episodes, cfg, "iter" + std::to_string(k));
        table.rows.insert(table.rows.end(), rows.rows.begin(), rows.rows.end());
    }
    write_table(table, args.run_dir + "/eval", "success");
    return 0;
}

int cmd_replay_eval(const CommonArgs& args) {
    const RunConfig cfg = cfg_for_phase(args);
    const RunPaths paths{args.run_dir};
    loop::require_file(paths.real_store(1));
    const data::TrajectoryStore real = data::load_store(paths.real_store(1));
    Rng clip_rng(loop::seed_for(cfg, loop::SeedTag::Eval, 0xc11b));
    const auto clips = eval::extract_clips(real, 256, clip_rng, false);
    Rng iclip_rng(loop::seed_for(cfg, loop::SeedTag::Eval, 0xc11c));
    const auto interaction_clips = eval::extract_clips(real, 50, iclip_rng, true);

    eval::EvalTable table;
    const int last = completed_iterations(args.run_dir);
    for (int k = 0; k <= std::max(last, args.iter <= last ? args.iter : 0); ++k) {
        if (!fs::exists(paths.wm_ckpt(k))) {
            continue;
        }
        const wm::WorldModel model = wm::load_worldmodel(paths.wm_ckpt(k));
        const std::string tag = k == 0 ? "wm_pretrain" : "wm_iter" + std::to_string(k);
        const auto fid = eval::replay_fidelity(eval::model_factory(model), clips,
                                               loop::seed_for(cfg, loop::SeedTag::Eval, 0xf1d),
                                               cfg.jobs);
        for (int h = 0; h < eval::kClipChunks; ++h) {
            table.add(tag, "mse_h" + std::to_string(h + 1),
                      fid.per_horizon[static_cast<std::size_t>(h)]);
        }
        table.add(tag, "mse_mean", fid.mean);
        const auto cm = eval::event_confusion_eval(eval::model_factory(model), interaction_clips,
                                                   loop::seed_for(cfg, loop::SeedTag::Eval, 0xcf5),
                                                   cfg.jobs);
        table.add(tag, "tp", cm.tp);
        table.add(tag, "fn", cm.fn);
        table.add(tag, "tn", cm.tn);
        table.add(tag, "fp", cm.fp);
    }
    write_table(table, args.run_dir + "/eval", "replay");
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"iterative policy / world-model co-improvement runner"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* c_warmstart = app.add_subcommand("warmstart", "demos, pretraining and policy warm start");
    CLI::App* c_collect = app.add_subcommand("collect", "phase 1: real rollouts");
    CLI::App* c_train_wm = app.add_subcommand("train-wm", "phase 2: world-model + reward update");
    CLI::App* c_train_rm = app.add_subcommand("train-rm", "reward-model update only");
    CLI::App* c_dream = app.add_subcommand("dream", "phase 3: synthetic rollouts");
    CLI::App* c_train_policy = app.add_subcommand("train-policy", "phase 4: policy update");
    CLI::App* c_loop = app.add_subcommand("loop", "full iterated run");
    CLI::App* c_eval = app.add_subcommand("eval", "success-rate tables");
    CLI::App* c_replay = app.add_subcommand("replay-eval", "replay fidelity and event confusion");
    CLI::App* c_ablate = app.add_subcommand("ablate", "final policy-update ablations");

    add_common(c_warmstart, args, false);
    add_common(c_collect, args, true);
    add_common(c_train_wm, args, true);
    add_common(c_train_rm, args, true);
    add_common(c_dream, args, true);
    add_common(c_train_policy, args, true);
    add_common(c_loop, args, false);
    add_common(c_eval, args, false);
    add_common(c_replay, args, true);
    add_common(c_ablate, args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(c_warmstart)) {
            loop::warmstart(cfg_for_run_start(args), args.run_dir);
            return 0;
        }
        if (app.got_subcommand(c_collect)) {
            loop::phase_collect(cfg_for_phase(args), args.run_dir, args.iter);
            return 0;
        }
        if (app.got_subcommand(c_train_wm)) {
            loop::phase_wm_update(cfg_for_phase(args), args.run_dir, args.iter);
            return 0;
        }
        if (app.got_subcommand(c_train_rm)) {
            loop::phase_train_rm(cfg_for_phase(args), args.run_dir, args.iter);
            return 0;
        }
        if (app.got_subcommand(c_dream)) {
            loop::phase_dream(cfg_for_phase(args), args.run_dir, args.iter);
            return 0;
        }
        if (app.got_subcommand(c_train_policy)) {
            loop::phase_policy_update(cfg_for_phase(args), args.run_dir, args.iter);
            return 0;
        }
        if (app.got_subcommand(c_loop)) {
            const RunConfig cfg = cfg_for_run_start(args);
            const auto reports = loop::run(cfg, args.run_dir);
            for (const auto& r : reports) {
                std::cout << "iter " << r.iter << ": d_real=" << r.d_real_total
                          << " d_syn+=" << r.d_syn_plus << " policy_loss=" << r.policy_loss << "\n";
            }
            return 0;
        }
        if (app.got_subcommand(c_eval)) {
            return cmd_eval(args);
        }
        if (app.got_subcommand(c_replay)) {
            return cmd_replay_eval(args);
        }
        if (app.got_subcommand(c_ablate)) {
            const RunConfig cfg = cfg_for_phase(args);
            const eval::EvalTable table = eval::ablation_suite(cfg, args.run_dir);
            write_table(table, args.run_dir + "/eval", "ablation");
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error [" << e.key << "]: " << e.what() << "\n";
        return 2;
    } catch (const MissingArtifact& e) {
        std::cerr << "missing artifact: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace vlaw::cli

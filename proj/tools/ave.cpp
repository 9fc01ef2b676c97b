// ave: command-line front end for the experiments and the live bridge.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ave/errors.hpp"
#include "ave/harness/config.hpp"
#include "ave/harness/runner.hpp"
#include "ave/learn/dqn.hpp"
#include "ave/lander.hpp"
#include "ave/rng.hpp"

#ifdef AVE_WITH_BRIDGE
#include "ave/bridge/server.hpp"
#endif

namespace {

using namespace ave;

struct CommonFlags {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string preset = "quick";
  std::string out;
  bool dump = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file; keys override the preset defaults");
  cmd->add_option("--seed", f.seeds, "Seed (repeatable); replaces the config seed list");
  cmd->add_option("--preset", f.preset, "quick | paper")->check(CLI::IsMember({"quick", "paper"}));
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--dump-config", f.dump, "Print the resolved config with all defaults and exit");
}

harness::ExperimentConfig resolve(harness::ExperimentKind kind, const CommonFlags& f) {
  auto cfg = harness::load_config(f.config, kind, harness::parse_preset(f.preset));
  if (!f.seeds.empty()) cfg.seeds = f.seeds;
  if (!f.out.empty()) cfg.out = f.out;
  cfg.validate();
  return cfg;
}

void progress(const std::string& msg) { std::cerr << "[ave] " << msg << '\n'; }

int run_kind(harness::ExperimentConfig cfg, const CommonFlags& f) {
  const auto kind = cfg.kind;
  if (f.dump) {
    std::cout << harness::to_json(cfg).dump(2) << '\n';
    return 0;
  }
  std::cerr << "[ave] " << harness::to_string(kind) << " preset=" << f.preset
            << " config=" << harness::config_hash(cfg) << " -> " << cfg.out << '\n';
  const auto out = harness::run_experiment(cfg, progress);
  if (!out.report.empty()) std::cout << out.report;
  for (const auto& file : out.files) std::cout << (out.dir / file).string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assistance via empowerment: experiments, tables and live sessions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", AVE_VERSION);

  struct Verb {
    const char* name;
    const char* help;
    harness::ExperimentKind kind;
  };
  const std::vector<Verb> verbs = {
      {"gridworld", "Gridworld trap study (success rate and mean steps per condition)",
       harness::ExperimentKind::gridworld},
      {"lander-train", "Train simulated pilots and copilots for every seed", harness::ExperimentKind::lander_train},
      {"lander-eval", "Cross-evaluate pilots and copilots from trained checkpoints",
       harness::ExperimentKind::lander_eval},
      {"sweep", "Sweep the empowerment coefficient for one pilot", harness::ExperimentKind::sweep},
      {"pendulum-landscape", "Emit the pendulum diversity-bonus landscape",
       harness::ExperimentKind::pendulum_landscape},
  };
  std::vector<CommonFlags> flags(verbs.size());
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < verbs.size(); ++i) {
    auto* cmd = app.add_subcommand(verbs[i].name, verbs[i].help);
    add_common(cmd, flags[i]);
    cmds.push_back(cmd);
  }
  std::string eval_checkpoints;
  cmds[2]->add_option("--checkpoints", eval_checkpoints, "Checkpoint directory written by lander-train");

  CommonFlags serve_flags;
  std::optional<int> port;
  std::string checkpoint, mode, condition, address = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Serve live piloting sessions over WebSocket");
  add_common(serve, serve_flags);
  serve->add_option("--port", port, "Listen port (overrides PORT and the config)");
  serve->add_option("--address", address, "Listen address");
  serve->add_option("--checkpoint", checkpoint, "Copilot checkpoint (.aveq)");
  serve->add_option("--mode", mode, "play | finetune")->check(CLI::IsMember({"play", "finetune"}));
  serve->add_option("--condition", condition, "empowerment | baseline")
      ->check(CLI::IsMember({"empowerment", "baseline"}));

  std::string run_dir, table, cell;
  auto* repro = app.add_subcommand("repro", "Re-derive one table cell of a finished run and compare");
  repro->add_option("run", run_dir, "Run directory holding manifest.json")->required();
  repro->add_option("--table", table, "trials | summary | landscape | cross_eval | sweep")->required();
  repro->add_option("--cell", cell, "Cell key, e.g. seed=1,scenario=center,condition=oracle,trial=3")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < verbs.size(); ++i) {
      if (!cmds[i]->parsed()) continue;
      auto cfg = resolve(verbs[i].kind, flags[i]);
      if (!eval_checkpoints.empty()) cfg.lander.checkpoints = eval_checkpoints;
      return run_kind(cfg, flags[i]);
    }

    if (repro->parsed()) {
      const auto r = harness::repro({run_dir, table, harness::parse_cell_key(cell)});
      std::cout << "table      " << r.table << '\n'
                << "config     " << r.config_hash << '\n'
                << "recorded   " << r.recorded << '\n'
                << "recomputed " << r.recomputed << '\n'
                << (r.match ? "MATCH" : "MISMATCH") << '\n';
      return r.match ? 0 : 1;
    }

    if (serve->parsed()) {
#ifdef AVE_WITH_BRIDGE
      auto cfg = resolve(harness::ExperimentKind::serve, serve_flags);
      if (!checkpoint.empty()) cfg.serve.copilot_checkpoint = checkpoint;
      if (!mode.empty()) cfg.serve.mode = mode;
      if (!condition.empty()) cfg.serve.condition = condition;
      cfg.serve.port = bridge::resolve_port(port, std::getenv("PORT"), cfg.serve.port);
      cfg.validate();
      if (serve_flags.dump) {
        std::cout << harness::to_json(cfg).dump(2) << '\n';
        return 0;
      }
      bridge::ServerOptions opts;
      opts.config = cfg;
      opts.address = address;
      opts.port = static_cast<std::uint16_t>(cfg.serve.port);
      if (cfg.serve.copilot_checkpoint.empty()) {
        SeededRng rng(cfg.seeds.front());
        opts.copilot = learn::ValueApproximator(lander::kCopilotObsDims, cfg.lander.copilot_schedule.hidden,
                                                lander::LanderAction::kCount, rng);
        opts.checkpoint_label = "untrained";
        std::cerr << "[ave] no copilot checkpoint given; serving an untrained copilot\n";
      } else {
        opts.copilot = learn::load_checkpoint(cfg.serve.copilot_checkpoint);
        opts.checkpoint_label = cfg.serve.copilot_checkpoint;
      }
      opts.on_session_end = [](const std::string& id, const bridge::SessionStats& s) {
        std::cerr << "[ave] session " << id << " closed: ticks=" << s.ticks << " episodes=" << s.episodes
                  << " successes=" << s.successes << " train_steps=" << s.train_steps
                  << " deferred=" << s.deferred_steps << " dropped=" << s.dropped_steps << '\n';
      };
      opts.stop_on_signals = true;
      bridge::Server server(std::move(opts));
      std::cerr << "[ave] serving " << cfg.serve.mode << "/" << cfg.serve.condition << " on ws://" << address << ":"
                << server.port() << " (logs in " << cfg.serve.log_dir << ")\n";
      server.run();
      return 0;
#else
      std::cerr << "ave was built without the bridge\n";
      return 2;
#endif
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

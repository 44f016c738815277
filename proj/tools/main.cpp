#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "predrep/harness.hpp"
#include "predrep/io.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string format = "json";
  std::vector<std::uint64_t> seeds;
  bool check = false;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config_path, "JSON config file");
  sub->add_option("--seed", opts.seeds, "seed override (repeat or comma-separate)")
      ->delimiter(',');
  sub->add_option("--out", opts.out_dir, "output directory for the report and data files");
  sub->add_option("--format", opts.format, "data file format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_flag("--check", opts.check, "exit 3 unless every report check passes");
}

enum class SeedKey { none, list, scalar };

json load_config(const CommonOpts& opts, SeedKey seed_key) {
  json cfg = json::object();
  if (!opts.config_path.empty()) cfg = predrep::load_json_file(opts.config_path);
  if (!opts.seeds.empty()) {
    switch (seed_key) {
      case SeedKey::list:
        cfg["seeds"] = opts.seeds;
        break;
      case SeedKey::scalar:
        cfg["seed"] = opts.seeds.front();
        break;
      case SeedKey::none:
        throw std::invalid_argument("this command does not take --seed");
    }
  }
  return cfg;
}

/// The report itself stays byte-stable for a fixed config; anything tied to
/// the wall clock goes into this sidecar instead.
void write_meta(const std::string& out_dir, const std::string& command) {
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
  ordered_json meta;
  meta["command"] = command;
  meta["generated_at"] = stamp;
  predrep::write_json_file((std::filesystem::path(out_dir) / "meta.json").string(), meta);
}

int deliver(const ordered_json& report, const CommonOpts& opts, const std::string& command) {
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    predrep::write_json_file((std::filesystem::path(opts.out_dir) / "report.json").string(),
                             report);
    write_meta(opts.out_dir, command);
    std::cout << "report written to " << opts.out_dir << "/report.json\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
  if (opts.check && !predrep::all_checks_pass(report)) {
    std::cerr << command << ": checks failed\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"predictive representation toolkit"};
  app.require_subcommand(1);

  CommonOpts sr_opts, sf_opts, explore_opts, neuro_opts;
  CommonOpts reval_opts, multi_opts, nav_opts, replay_opts;

  CLI::App* sr = app.add_subcommand("sr", "closed-form occupancy analysis of a gridworld");
  add_common(sr, sr_opts);
  CLI::App* sf = app.add_subcommand("sf", "successor-feature library and policy reuse");
  add_common(sf, sf_opts);
  CLI::App* explore = app.add_subcommand("explore", "spectral options and landmark maps");
  add_common(explore, explore_opts);
  CLI::App* neuro = app.add_subcommand("neuro", "receptive-field and track analysis exports");
  add_common(neuro, neuro_opts);

  CLI::App* experiment = app.add_subcommand("experiment", "batch experiment drivers");
  experiment->require_subcommand(1);
  CLI::App* reval = experiment->add_subcommand("revaluation", "reward/transition/policy revaluation");
  add_common(reval, reval_opts);
  CLI::App* multi = experiment->add_subcommand("multitask", "policy reuse across tasks");
  add_common(multi, multi_opts);
  CLI::App* nav = experiment->add_subcommand("navigation", "barrier adaptation race");
  add_common(nav, nav_opts);
  CLI::App* replay = experiment->add_subcommand("replay", "prioritized backup sweeps");
  add_common(replay, replay_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sr->parsed()) {
      json cfg = load_config(sr_opts, SeedKey::none);
      return deliver(predrep::run_sr_tool(cfg, sr_opts.out_dir, sr_opts.format), sr_opts, "sr");
    }
    if (sf->parsed()) {
      json cfg = load_config(sf_opts, SeedKey::none);
      return deliver(predrep::run_sf_tool(cfg, sf_opts.out_dir, sf_opts.format), sf_opts, "sf");
    }
    if (explore->parsed()) {
      json cfg = load_config(explore_opts, SeedKey::scalar);
      return deliver(predrep::run_explore_tool(cfg, explore_opts.out_dir, explore_opts.format),
                     explore_opts, "explore");
    }
    if (neuro->parsed()) {
      json cfg = load_config(neuro_opts, SeedKey::none);
      if (!neuro_opts.out_dir.empty() && neuro_opts.format == "csv") {
        cfg["out_dir"] = neuro_opts.out_dir;
      }
      auto config = predrep::NeuroMapsConfig::from_json(cfg);
      return deliver(predrep::run_neuro_maps(config), neuro_opts, "neuro");
    }
    if (reval->parsed()) {
      json cfg = load_config(reval_opts, SeedKey::list);
      auto config = predrep::RevaluationConfig::from_json(cfg);
      return deliver(predrep::run_revaluation(config), reval_opts, "experiment revaluation");
    }
    if (multi->parsed()) {
      json cfg = load_config(multi_opts, SeedKey::scalar);
      auto config = predrep::MultitaskConfig::from_json(cfg);
      return deliver(predrep::run_multitask_gpi(config), multi_opts, "experiment multitask");
    }
    if (nav->parsed()) {
      json cfg = load_config(nav_opts, SeedKey::list);
      auto config = predrep::NavigationConfig::from_json(cfg);
      return deliver(predrep::run_navigation(config), nav_opts, "experiment navigation");
    }
    if (replay->parsed()) {
      json cfg = load_config(replay_opts, SeedKey::none);
      auto config = predrep::ReplayDemoConfig::from_json(cfg);
      return deliver(predrep::run_replay_demo(config), replay_opts, "experiment replay");
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

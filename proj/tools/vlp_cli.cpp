// vlp: simulate, track, bench and report from the command line.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "vlp/commands.hpp"

namespace {

namespace fs = std::filesystem;

int fail(const std::string& kind, const std::string& message, const std::string& key = {}) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  if (!key.empty()) j["key"] = key;
  std::cerr << j.dump() << std::endl;
  return 1;
}

void require_file(const fs::path& p, const char* what) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw vlp::Error(vlp::ErrorKind::Io, std::string(what) + " not found: " + p.string());
}

void require_dir(const fs::path& p, const char* what) {
  std::error_code ec;
  if (!fs::is_directory(p, ec)) throw vlp::Error(vlp::ErrorKind::Io, std::string(what) + " not found: " + p.string());
}

vlp::RunConfig load(const fs::path& config, std::optional<std::uint64_t> seed) {
  require_file(config, "config");
  vlp::RunConfig rc = vlp::load_run_config(config);
  if (seed) rc.scene.seed = *seed;
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visible-light positioning tracker: simulator, tracker and benchmarks"};
  app.require_subcommand(1);

  std::string config, out, frames, scenarios;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  auto* simulate = app.add_subcommand("simulate", "Render a scene to PGM frames with ground truth");
  simulate->add_option("--config", config, "Scene configuration (JSON)")->required();
  simulate->add_option("--out", out, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the configured seed");
  simulate->add_flag("--quiet", quiet, "Print nothing on success");

  auto* track = app.add_subcommand("track", "Track lamps through a frame directory and write fixes.jsonl");
  track->add_option("--config", config, "Scene/tracker configuration (JSON)")->required();
  track->add_option("--frames", frames, "Directory of frame_%06d.pgm files")->required();
  track->add_option("--out", out, "Output directory")->required();
  track->add_flag("--quiet", quiet, "Do not print the summary line");

  auto* bench = app.add_subcommand("bench", "Run occlusion and height sweeps against the full-frame baseline");
  bench->add_option("--config", config, "Base scene configuration (JSON)")->required();
  bench->add_option("--scenarios", scenarios, "Scenario specification (JSON)")->required();
  bench->add_option("--out", out, "Report directory")->required();
  bench->add_option("--seed", seed, "Override the configured seed");
  bench->add_flag("--quiet", quiet, "Print nothing on success");

  auto* report = app.add_subcommand("report", "Score fixes.jsonl against groundtruth.jsonl");
  report->add_option("--config", config, "Scene/tracker configuration (JSON)")->required();
  report->add_option("--frames", frames, "Simulator output directory holding groundtruth.jsonl")->required();
  report->add_option("--out", out, "Directory holding fixes.jsonl; the report goes to <out>/report")->required();
  report->add_flag("--quiet", quiet, "Print nothing on success");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (simulate->parsed()) {
      const auto rc = load(config, seed);
      const auto result = vlp::cmd_simulate(rc, out);
      if (!quiet) std::cout << nlohmann::json{{"frames", result.frames}, {"out", out}}.dump() << std::endl;
    } else if (track->parsed()) {
      const auto rc = load(config, std::nullopt);
      require_dir(frames, "frames directory");
      const auto result = vlp::cmd_track(rc, frames, out);
      if (!quiet) {
        std::cout << nlohmann::json{{"frames", result.frames}, {"mean_proc_ms", result.mean_proc_ms}}.dump()
                  << std::endl;
      }
    } else if (bench->parsed()) {
      const auto rc = load(config, seed);
      require_file(scenarios, "scenario file");
      const auto spec = vlp::load_scenarios(scenarios);
      const auto reports = vlp::cmd_bench(rc, spec, out);
      bool failed = false;
      for (const auto& r : reports) {
        for (const auto& s : r.scenarios) {
          if (s.failed) {
            failed = true;
            fail("scenario_failed", s.meta.name + ": " + s.message);
          } else if (s.skipped && !quiet) {
            std::cerr << nlohmann::json{{"warning", "scenario_skipped"}, {"scenario", s.meta.name},
                                        {"message", s.message}}.dump()
                      << std::endl;
          }
        }
      }
      if (failed) return 1;
      if (!quiet) std::cout << nlohmann::json{{"out", out}, {"comparison", (fs::path(out) / "comparison.csv").string()}}.dump() << std::endl;
    } else if (report->parsed()) {
      const auto rc = load(config, std::nullopt);
      require_dir(frames, "frames directory");
      const auto r = vlp::cmd_report(rc, frames, out);
      if (!quiet) {
        std::cout << nlohmann::json{{"frames", r.frames.size()},
                                    {"tracking_p90_cm", vlp::detail::finite_or_null(r.tracking.p90)},
                                    {"positioning_p90_cm", vlp::detail::finite_or_null(r.positioning.p90)}}
                         .dump()
                  << std::endl;
      }
    }
  } catch (const vlp::SchemaError& e) {
    return fail("schema", e.what(), e.key());
  } catch (const vlp::Error& e) {
    return fail(std::string(vlp::to_string(e.kind())), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}

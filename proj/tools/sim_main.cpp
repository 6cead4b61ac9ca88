// Command-line driver: parse a kernel, generate traces, simulate, and emit
// stats. Exit codes: 0 success, 1 input error, 2 simulation deadlock.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tilesim/dae.hpp"
#include "tilesim/ddg.hpp"
#include "tilesim/experiment.hpp"
#include "tilesim/inputs.hpp"

namespace {

using namespace tilesim;

struct CommonArgs {
  std::string kernel_path;
  std::string inputs_path;
  std::string config_path;
  std::vector<std::string> overrides;
  int tiles = 1;
};

KernelProgram read_kernel(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open kernel file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_kernel(ss.str());
}

SystemConfig make_config(const CommonArgs& args) {
  SystemConfig cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  for (const auto& o : args.overrides) apply_override(cfg, o);
  return cfg;
}

LoadedInputs make_inputs(const CommonArgs& args, const SystemConfig& cfg) {
  if (!args.inputs_path.empty()) return load_inputs(args.inputs_path, cfg.seed);
  LoadedInputs li;
  li.image.bytes.assign(1 << 16, 0);
  return li;
}

// Default inputs path: <kernel>.in next to <kernel>.k when present.
void default_inputs(CommonArgs& args) {
  if (!args.inputs_path.empty()) return;
  std::string p = args.kernel_path;
  if (auto dot = p.rfind(".k"); dot != std::string::npos && dot == p.size() - 2) {
    p = p.substr(0, dot) + ".in";
    if (std::ifstream(p).good()) args.inputs_path = p;
  }
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("kernel", args.kernel_path, "kernel file (.k)")->required();
  cmd->add_option("--tiles", args.tiles, "tile count (logical tiles under --dae)");
  cmd->add_option("--config", args.config_path, "system config file");
  cmd->add_option("--inputs", args.inputs_path,
                  "inputs spec (default: <kernel>.in if present)");
  cmd->add_option("--set", args.overrides, "config override section.key=value");
}

int run_cmd(const CommonArgs& args, bool dae, const std::string& branch,
            bool alias_spec, bool no_prefetch, const std::string& stats_path,
            const std::string& csv_path, const std::string& event_log_path,
            const std::string& dump_ddg_path, const std::string& models_path,
            bool trace_only, const std::string& trace_dir, bool binary_ctrl) {
  SystemConfig cfg = make_config(args);
  if (branch == "perfect") cfg.core.branch_mode = BranchMode::Perfect;
  else if (branch == "static") cfg.core.branch_mode = BranchMode::Static;
  else if (branch == "none" || branch.empty()) cfg.core.branch_mode = BranchMode::None;
  else throw ConfigError("--branch must be none|perfect|static");
  if (alias_spec) cfg.core.alias_speculation = true;
  if (no_prefetch) cfg.l1.prefetch.enable = false;

  KernelProgram kernel = read_kernel(args.kernel_path);
  LoadedInputs inputs = make_inputs(args, cfg);
  AccelLibrary models;
  if (!models_path.empty()) models = load_accel_models(models_path);

  if (!dump_ddg_path.empty()) {
    StaticDDG ddg = build_ddg(kernel);
    std::ofstream f(dump_ddg_path);
    f << dump_ddg(ddg);
  }

  if (trace_only) {
    std::filesystem::create_directories(trace_dir);
    auto traces = generate_spmd_traces(kernel, args.tiles, inputs.bindings, inputs.image);
    for (const auto& t : traces)
      write_trace_files(trace_dir, kernel.name, t, binary_ctrl);
    std::cout << "wrote " << traces.size() << " trace sets to " << trace_dir << "\n";
    return 0;
  }

  RunOptions opts;
  opts.tiles = args.tiles;
  opts.dae = dae;
  std::ofstream event_log;
  if (!event_log_path.empty()) {
    event_log.open(event_log_path);
    opts.event_log = &event_log;
  }

  SimStats stats = run_experiment(kernel, inputs.bindings, inputs.image, cfg, models, opts);

  std::ostringstream text;
  emit_stats_text(text, stats);
  if (!stats_path.empty()) std::ofstream(stats_path) << text.str();
  else std::cout << text.str();
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    emit_stats_csv(csv, stats);
  }
  return 0;
}

int verify_cmd(const CommonArgs& args) {
  SystemConfig cfg = make_config(args);
  KernelProgram kernel = read_kernel(args.kernel_path);
  LoadedInputs inputs = make_inputs(args, cfg);

  // Functional check 1: the SPMD expansion over T tiles must leave the same
  // memory image as a single-tile run partitioned the same way needs no
  // oracle; instead re-run deterministically twice and compare.
  MemImage img1 = inputs.image;
  generate_spmd_traces(kernel, args.tiles, inputs.bindings, img1);
  MemImage img2 = inputs.image;
  generate_spmd_traces(kernel, args.tiles, inputs.bindings, img2);
  if (img1.bytes != img2.bytes) {
    std::cout << "verify: FAIL (nondeterministic interpretation)\n";
    return 1;
  }

  // Functional check 2: the sliced pair must compute the same image.
  try {
    SliceCheck check = verify_slice_equivalence(kernel, inputs.bindings, inputs.image);
    if (!check.pass) {
      std::cout << "verify: FAIL (slice divergence: " << check.detail << ")\n";
      return 1;
    }
    std::cout << "verify: OK (deterministic; slice-equivalent)\n";
  } catch (const SliceError& e) {
    std::cout << "verify: OK (deterministic; kernel not sliceable: " << e.what()
              << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-driven timing simulator for heterogeneous tiled systems"};
  app.require_subcommand(1);

  CommonArgs run_args, trace_args, verify_args;
  bool dae = false, alias_spec = false, no_prefetch = false, binary_ctrl = false;
  std::string branch, stats_path, csv_path, event_log_path, dump_ddg_path, models_path;
  std::string trace_dir = ".";

  CLI::App* run = app.add_subcommand("run", "simulate a kernel end to end");
  add_common(run, run_args);
  run->add_flag("--dae", dae, "slice into access/execute pairs");
  run->add_option("--branch", branch, "branch mode: none|perfect|static");
  run->add_flag("--alias-spec", alias_spec, "perfect alias speculation");
  run->add_flag("--no-prefetch", no_prefetch, "disable the L1 prefetcher");
  run->add_option("--stats", stats_path, "write text stats here (default stdout)");
  run->add_option("--csv", csv_path, "write CSV stats here");
  run->add_option("--event-log", event_log_path, "write the event log here");
  run->add_option("--dump-ddg", dump_ddg_path, "write the static DDG here");
  run->add_option("--accel-models", models_path, "accelerator model file");

  CLI::App* trace = app.add_subcommand("trace", "generate trace files only");
  add_common(trace, trace_args);
  trace->add_option("--out-dir", trace_dir, "trace output directory");
  trace->add_flag("--binary-ctrl", binary_ctrl, "binary control-flow trace encoding");

  CLI::App* verify = app.add_subcommand("verify", "functional checks, no timing");
  add_common(verify, verify_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      default_inputs(run_args);
      return run_cmd(run_args, dae, branch, alias_spec, no_prefetch, stats_path,
                     csv_path, event_log_path, dump_ddg_path, models_path, false, "",
                     false);
    }
    if (trace->parsed()) {
      default_inputs(trace_args);
      return run_cmd(trace_args, false, "", false, false, "", "", "", "", "", true,
                     trace_dir, binary_ctrl);
    }
    default_inputs(verify_args);
    return verify_cmd(verify_args);
  } catch (const tilesim::SimDeadlock& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

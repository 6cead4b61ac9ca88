#include "tilesim/experiment.hpp"

#include "tilesim/dae.hpp"
#include "tilesim/ddg.hpp"

namespace tilesim {

SimStats run_experiment(const KernelProgram& kernel, const Bindings& params,
                        MemImage& image, const SystemConfig& config,
                        const AccelLibrary& accel, const RunOptions& opts) {
  if (opts.tiles < 1) throw ConfigError("tile count must be >= 1");
  Interleaver sim(config, accel);
  if (opts.event_log) sim.set_event_log(opts.event_log);

  if (opts.dae) {
    SlicePair pair = slice(kernel);
    StaticDDG access_ddg = build_ddg(pair.access);
    StaticDDG execute_ddg = build_ddg(pair.execute);

    std::vector<TileProgram> programs;
    int raw_tiles = opts.tiles * 2;
    for (int t = 0; t < raw_tiles; ++t)
      programs.push_back({t % 2 == 0 ? &pair.access : &pair.execute, t});
    auto traces = interpret_system(programs, raw_tiles, params, image);

    CoreConfig access_cfg = config.core;
    access_cfg.terminal_loads = true;
    for (int t = 0; t < raw_tiles; ++t) {
      if (t % 2 == 0)
        sim.add_core(access_ddg, traces[static_cast<size_t>(t)], access_cfg);
      else
        sim.add_core(execute_ddg, traces[static_cast<size_t>(t)]);
    }
    return sim.run();
  }

  StaticDDG ddg = build_ddg(kernel);
  auto traces = generate_spmd_traces(kernel, opts.tiles, params, image);
  for (int t = 0; t < opts.tiles; ++t)
    sim.add_core(ddg, traces[static_cast<size_t>(t)]);
  return sim.run();
}

}  // namespace tilesim

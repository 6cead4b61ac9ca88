#include <doctest.h>

#include "tilesim/config.hpp"

using namespace tilesim;

TEST_CASE("parse_config covers every section") {
  SystemConfig cfg = parse_config(R"(
# comment
[core]
issue_width = 2
window_size = 64
lsq_size = 32
live_dbb_limit = 4
freq_hz = 1000000000
branch = static
misprediction_latency = 7
alias_speculation = true
terminal_loads = on
fu.fdiv = 1
fu.fmul = 2

[l1]
size = 16384
assoc = 4
latency = 2
mshr = 8
prefetch = false

[l2]
size = 1048576
latency = 9

[dram]
min_latency = 150
epoch_length = 50
max_per_epoch = 4
access_energy = 1e-11

[msg]
capacity = 16
latency = 3

[mem]
freq_hz = 1500000000

[sim]
seed = 7

[latency]
fdiv = 12 2.5e-12
iadd = 1
)");
  CHECK(cfg.core.issue_width == 2);
  CHECK(cfg.core.window_size == 64);
  CHECK(cfg.core.lsq_size == 32);
  CHECK(cfg.core.live_dbb_limit == 4);
  CHECK(cfg.core.freq_hz == 1000000000);
  CHECK(cfg.core.branch_mode == BranchMode::Static);
  CHECK(cfg.core.misprediction_latency == 7);
  CHECK(cfg.core.alias_speculation);
  CHECK(cfg.core.terminal_loads);
  CHECK(cfg.core.fu_counts.at(Opclass::FDIV) == 1);
  CHECK(cfg.core.fu_counts.at(Opclass::FMUL) == 2);
  CHECK(cfg.l1.size == 16384);
  CHECK(cfg.l1.assoc == 4);
  CHECK(cfg.l1.latency == 2);
  CHECK(cfg.l1.mshr_entries == 8);
  CHECK_FALSE(cfg.l1.prefetch.enable);
  CHECK(cfg.l2.size == 1048576);
  CHECK(cfg.l2.latency == 9);
  CHECK(cfg.dram.min_latency == 150);
  CHECK(cfg.dram.epoch_length == 50);
  CHECK(cfg.dram.max_per_epoch == 4);
  CHECK(cfg.dram.access_energy == 1e-11);
  CHECK(cfg.msg.capacity == 16);
  CHECK(cfg.msg.latency == 3);
  CHECK(cfg.mem_freq_hz == 1500000000);
  CHECK(cfg.seed == 7);
  CHECK(cfg.latency.cost(Opclass::FDIV).latency == 12);
  CHECK(cfg.latency.cost(Opclass::FDIV).energy == 2.5e-12);
  CHECK(cfg.latency.cost(Opclass::IADD).latency == 1);
}

TEST_CASE("config errors name the offence") {
  CHECK_THROWS_AS(parse_config("[core]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("x = 1\n"), ConfigError);  // key outside a section
  CHECK_THROWS_AS(parse_config("[core]\nissue_width = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[core]\nfu.nope = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[l1]\nline_size = 48\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dram]\nmax_per_epoch = 0\n"), ConfigError);
}

TEST_CASE("apply_override reuses section.key paths") {
  SystemConfig cfg;
  apply_override(cfg, "core.issue_width=8");
  apply_override(cfg, "dram.max_per_epoch=2");
  apply_override(cfg, "l1.prefetch=off");
  CHECK(cfg.core.issue_width == 8);
  CHECK(cfg.dram.max_per_epoch == 2);
  CHECK_FALSE(cfg.l1.prefetch.enable);
  CHECK_THROWS_AS(apply_override(cfg, "no-equals"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "core.bogus=1"), ConfigError);
}

TEST_CASE("default latency table marks memory dynamic and is complete") {
  LatencyTable t = LatencyTable::defaults();
  CHECK(t.is_dynamic(Opclass::LOAD));
  CHECK(t.is_dynamic(Opclass::STORE));
  CHECK_FALSE(t.is_dynamic(Opclass::IADD));
  for (Opclass op : {Opclass::IADD, Opclass::IMUL, Opclass::IDIV, Opclass::FADD,
                     Opclass::FMUL, Opclass::FDIV, Opclass::CMP, Opclass::CAST,
                     Opclass::BRANCH, Opclass::COND_BRANCH, Opclass::RETURN,
                     Opclass::SEND, Opclass::RECV, Opclass::TILE_ID,
                     Opclass::NUM_TILES, Opclass::CONST, Opclass::MOVE})
    CHECK(t.cost(op).latency >= 1);
}

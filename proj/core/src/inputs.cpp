#include "tilesim/inputs.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

namespace tilesim {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw InputError(origin + ":" + std::to_string(line) + ": " + msg);
}

uint64_t double_bits(double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  return bits;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

}  // namespace

LoadedInputs build_inputs(const std::string& text, uint64_t seed,
                          const std::string& origin) {
  LoadedInputs out;
  std::map<std::string, uint64_t> buffer_base;
  uint64_t next_addr = 0;
  std::mt19937_64 rng(seed);

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;

    if (word == "memory") {
      uint64_t bytes;
      if (!(ls >> bytes)) fail(origin, lineno, "memory needs a byte count");
      out.image.bytes.assign(bytes, 0);
    } else if (word == "buffer") {
      if (out.image.bytes.empty()) fail(origin, lineno, "buffer before memory declaration");
      std::string name;
      if (!(ls >> name)) fail(origin, lineno, "buffer needs a name");
      if (buffer_base.count(name)) fail(origin, lineno, "duplicate buffer '" + name + "'");
      uint64_t count = 0;
      bool is_float = false;
      std::string init = "zeros";
      std::string kv;
      while (ls >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "count") count = std::stoull(val);
        else if (key == "elem") {
          if (val == "f64") is_float = true;
          else if (val == "u64") is_float = false;
          else fail(origin, lineno, "elem must be u64 or f64");
        } else if (key == "init") init = val;
        else fail(origin, lineno, "unknown buffer key '" + key + "'");
      }
      if (count == 0) fail(origin, lineno, "buffer needs count=<elems>");
      uint64_t base = (next_addr + 63) & ~uint64_t{63};
      next_addr = base + count * 8;
      if (next_addr > out.image.bytes.size())
        fail(origin, lineno, "buffer '" + name + "' does not fit in memory");
      buffer_base[name] = base;

      auto parts = split(init, ':');
      for (uint64_t i = 0; i < count; ++i) {
        uint64_t v = 0;
        if (parts[0] == "zeros") {
          v = 0;
        } else if (parts[0] == "iota") {
          v = is_float ? double_bits(static_cast<double>(i)) : i;
        } else if (parts[0] == "step") {
          if (parts.size() != 2) fail(origin, lineno, "step needs :<stride>");
          uint64_t k = std::stoull(parts[1]);
          v = is_float ? double_bits(static_cast<double>(i * k)) : i * k;
        } else if (parts[0] == "random") {
          if (is_float) {
            std::uniform_real_distribution<double> d(0.0, 1.0);
            v = double_bits(d(rng));
          } else {
            std::uniform_int_distribution<uint64_t> d(0, (1u << 20) - 1);
            v = d(rng);
          }
        } else if (parts[0] == "randint") {
          if (parts.size() != 3) fail(origin, lineno, "randint needs :lo:hi");
          std::uniform_int_distribution<uint64_t> d(std::stoull(parts[1]),
                                                    std::stoull(parts[2]));
          v = d(rng);
        } else if (parts[0] == "values") {
          if (parts.size() != 2) fail(origin, lineno, "values needs :v1,v2,...");
          auto vals = split(parts[1], ',');
          const std::string& lit = vals[i % vals.size()];
          v = is_float || lit.find('.') != std::string::npos
                  ? double_bits(std::stod(lit))
                  : std::stoull(lit, nullptr, 0);
        } else {
          fail(origin, lineno, "unknown init '" + parts[0] + "'");
        }
        out.image.store64(base + i * 8, v);
      }
    } else if (word == "param") {
      std::string name, eq, val;
      if (!(ls >> name >> eq >> val) || eq != "=")
        fail(origin, lineno, "expected param <name> = <value>");
      if (val[0] == '&') {
        auto it = buffer_base.find(val.substr(1));
        if (it == buffer_base.end())
          fail(origin, lineno, "unknown buffer '" + val.substr(1) + "'");
        out.bindings[name] = it->second;
      } else if (val.find('.') != std::string::npos) {
        out.bindings[name] = double_bits(std::stod(val));
      } else {
        out.bindings[name] = std::stoull(val, nullptr, 0);
      }
    } else {
      fail(origin, lineno, "unknown directive '" + word + "'");
    }
  }
  if (out.image.bytes.empty()) throw InputError(origin + ": no memory declaration");
  return out;
}

LoadedInputs load_inputs(const std::string& path, uint64_t seed) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open inputs file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return build_inputs(ss.str(), seed, path);
}

}  // namespace tilesim

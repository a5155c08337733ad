#pragma once

// Flat key-value experiment configs: one `key = value` per line, '#' comments,
// repeated keys accumulate (used for lists such as hom pairs).

#include <optional>
#include <string>
#include <vector>

#include "vvsim/errors.hpp"
#include "vvsim/modes.hpp"

namespace vvsim {

class ConfigFile {
  public:
    struct Entry {
        std::string key;
        std::string value;
        int line;
    };

    static ConfigFile parse(const std::string& text);
    static ConfigFile load(const std::string& path);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;  // last occurrence wins
    std::vector<std::string> get_all(const std::string& key) const;

    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;
    std::uint64_t require_seed(const std::string& key = "seed") const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::vector<Entry>& entries() const { return entries_; }

  private:
    std::vector<Entry> entries_;
};

// Resolves a preparation descriptor into a single-photon state:
//   - mode labels:     "R:+2", "L:-2", "H:0", "V:0"
//   - named states:    "phi+", "phi-"
//   - vv family:       "vv(theta=<deg>, psi=<deg>)"
//   - element chains:  "qwp(45) | hwp(0) | qplate(q=1, a0=0)" applied to |H,0>
SingleKet resolve_state(const std::string& descriptor, int oam_cutoff = kDefaultOamCutoff);

}  // namespace vvsim

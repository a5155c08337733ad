#include "vvsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vvsim/elements.hpp"

namespace vvsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected 'key = value'", line_no,
                             static_cast<int>(line.find_first_not_of(" \t") + 1));
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no, 1);
        cfg.entries_.push_back({key, value, line_no});
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

bool ConfigFile::has(const std::string& key) const {
    for (const auto& e : entries_) {
        if (e.key == key) return true;
    }
    return false;
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
    std::optional<std::string> found;
    for (const auto& e : entries_) {
        if (e.key == key) found = e.value;
    }
    return found;
}

std::vector<std::string> ConfigFile::get_all(const std::string& key) const {
    std::vector<std::string> values;
    for (const auto& e : entries_) {
        if (e.key == key) values.push_back(e.value);
    }
    return values;
}

std::string ConfigFile::require(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing config key '" + key + "'");
    return *v;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        size_t used = 0;
        const double value = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing");
        return value;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: '" + *v + "'");
    }
}

double ConfigFile::require_double(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing config key '" + key + "'");
    return get_double(key, 0.0);
}

std::uint64_t ConfigFile::require_seed(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("stochastic runs need an explicit '" + key + "'");
    try {
        size_t used = 0;
        const unsigned long long value = std::stoull(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing");
        return value;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a valid seed: '" + *v + "'");
    }
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-9) throw ConfigError("config key '" + key + "' must be an integer");
    return i;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("config key '" + key + "' must be a boolean");
}

SingleKet resolve_state(const std::string& descriptor, int oam_cutoff) {
    const std::string text = [&] {
        auto b = descriptor.find_first_not_of(" \t");
        auto e = descriptor.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : descriptor.substr(b, e - b + 1);
    }();
    if (text.empty()) throw ConfigError("empty state descriptor");

    if (text == "phi+") return prepare_vv(M_PI / 2.0, 0.0, oam_cutoff);
    if (text == "phi-") return prepare_vv(M_PI / 2.0, M_PI, oam_cutoff);

    if (text.rfind("vv(", 0) == 0 && text.back() == ')') {
        double theta_deg = 90.0, psi_deg = 0.0;
        const std::string args = text.substr(3, text.size() - 4);
        std::istringstream in(args);
        std::string part;
        while (std::getline(in, part, ',')) {
            const auto eq = part.find('=');
            if (eq == std::string::npos) throw ParseError("vv needs theta=<deg>, psi=<deg>");
            std::string key = part.substr(0, eq);
            key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
            const double value = std::stod(part.substr(eq + 1));
            if (key == "theta") {
                theta_deg = value;
            } else if (key == "psi") {
                psi_deg = value;
            } else {
                throw ParseError("unknown vv parameter '" + key + "'");
            }
        }
        const double d2r = M_PI / 180.0;
        return prepare_vv(theta_deg * d2r, psi_deg * d2r, oam_cutoff);
    }

    if (text.find('(') != std::string::npos) {
        const ParsedChain chain = parse_element_chain(text, oam_cutoff);
        if (chain.filter.has_value()) {
            throw ConfigError("preparation chains must not contain a pbs filter");
        }
        SingleKet state = parse_state_label("H:0", oam_cutoff);
        for (const auto& element : chain.elements) state = element.apply(state);
        return state;
    }

    return parse_state_label(text, oam_cutoff);
}

}  // namespace vvsim

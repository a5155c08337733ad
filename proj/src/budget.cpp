#include "vvsim/budget.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace vvsim {

namespace {

struct FieldRef {
    const char* name;
    double EfficiencyChain::* member;
};

constexpr FieldRef kFactors[] = {
    {"eta_fibered", &EfficiencyChain::eta_fibered},
    {"eta_connector", &EfficiencyChain::eta_connector},
    {"eta_bs", &EfficiencyChain::eta_bs},
    {"eta_pol", &EfficiencyChain::eta_pol},
    {"eta_qplate", &EfficiencyChain::eta_qplate},
    {"eta_coupling", &EfficiencyChain::eta_coupling},
    {"eta_det", &EfficiencyChain::eta_det},
    {"eta_setup", &EfficiencyChain::eta_setup},
};

}  // namespace

void EfficiencyChain::validate() const {
    for (const auto& f : kFactors) {
        const double v = this->*(f.member);
        if (!(v > 0.0) || v > 1.0) {
            throw ConfigError(std::string(f.name) + " must lie in (0, 1]");
        }
    }
    if (!(pump_rate_hz > 0.0)) throw ConfigError("pump_rate_hz must be positive");
    if (!(detected_rate_hz > 0.0)) throw ConfigError("detected_rate_hz must be positive");
    if (connectors_intra < 0 || connectors_inter < 0) {
        throw ConfigError("connector multiplicities must be nonnegative");
    }
}

double EfficiencyChain::eta_gen_intra() const {
    validate();
    return eta_fibered * std::pow(eta_connector, connectors_intra) * eta_pol * eta_qplate;
}

double EfficiencyChain::eta_gen_inter() const {
    validate();
    return eta_fibered * std::pow(eta_connector, connectors_inter) * eta_bs * eta_pol * eta_qplate;
}

double EfficiencyChain::eta_tomo() const {
    validate();
    return eta_qplate * eta_coupling * eta_det;
}

double EfficiencyChain::fibered_brightness() const {
    validate();
    return detected_rate_hz / (pump_rate_hz * eta_det);
}

double EfficiencyChain::first_lens_brightness() const {
    validate();
    return detected_rate_hz / (pump_rate_hz * eta_det * eta_setup);
}

double chain_product(const EfficiencyChain& chain, const std::map<std::string, int>& factor_powers) {
    chain.validate();
    double product = 1.0;
    for (const auto& [name, power] : factor_powers) {
        bool found = false;
        for (const auto& f : kFactors) {
            if (name == f.name) {
                product *= std::pow(chain.*(f.member), power);
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError("unknown efficiency factor '" + name + "'");
    }
    return product;
}

RateBudget rates(const EfficiencyChain& chain) {
    chain.validate();
    RateBudget r{};
    // The 1/2 is the second (bulk) beam splitter; the extra 1/4 in the inter
    // configuration is the fiber splitter acting on both photons.
    r.r_gen_intra_hz = chain.eta_gen_intra() * chain.pump_rate_hz / 2.0;
    r.r_intra_hz = chain.eta_tomo() * r.r_gen_intra_hz;
    r.r_gen_inter_hz =
        chain.eta_gen_inter() * chain.eta_gen_inter() * chain.pump_rate_hz / (4.0 * 2.0);
    r.r_inter_hz = chain.eta_tomo() * chain.eta_tomo() * r.r_gen_inter_hz;
    return r;
}

EfficiencyChain parse_chain_config(const std::string& text) {
    EfficiencyChain chain;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected key = value", line_no, 1);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value_text = trim(line.substr(eq + 1));
        double value = 0.0;
        try {
            size_t used = 0;
            value = std::stod(value_text, &used);
            if (used != value_text.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("bad numeric value '" + value_text + "'", line_no,
                             static_cast<int>(eq + 2));
        }

        bool known = false;
        for (const auto& f : kFactors) {
            if (key == f.name) {
                chain.*(f.member) = value;
                known = true;
                break;
            }
        }
        if (!known) {
            if (key == "connectors_intra") {
                chain.connectors_intra = static_cast<int>(value);
            } else if (key == "connectors_inter") {
                chain.connectors_inter = static_cast<int>(value);
            } else if (key == "pump_rate_hz") {
                chain.pump_rate_hz = value;
            } else if (key == "detected_rate_hz") {
                chain.detected_rate_hz = value;
            } else {
                throw ParseError("unknown budget key '" + key + "'", line_no, 1);
            }
        }
    }
    chain.validate();
    return chain;
}

double first_lens_brightness(double detected_rate_hz, double pump_rate_hz, double eta_det,
                             double eta_setup) {
    if (!(detected_rate_hz > 0.0) || !(pump_rate_hz > 0.0) || !(eta_det > 0.0) ||
        !(eta_setup > 0.0)) {
        throw ParameterError("brightness inputs must be positive");
    }
    return detected_rate_hz / (pump_rate_hz * eta_det * eta_setup);
}

}  // namespace vvsim

#pragma once

// Transmission budget of the platform: named efficiency factors, the derived
// generation/detection rates for the intra- and inter-particle configurations,
// and the source brightness figures.

#include <map>
#include <string>

#include "vvsim/errors.hpp"

namespace vvsim {

struct EfficiencyChain {
    // transmission factors, each in (0, 1]
    double eta_fibered = 0.133;
    double eta_connector = 0.80;
    double eta_bs = 0.75;
    double eta_pol = 0.83;
    double eta_qplate = 0.70;
    double eta_coupling = 0.45;
    double eta_det = 0.38;
    double eta_setup = 0.52;

    // factor multiplicities
    int connectors_intra = 2;
    int connectors_inter = 3;

    double pump_rate_hz = 79e6;      // R_exc
    double detected_rate_hz = 4e6;   // single-photon rate at the source output

    void validate() const;

    // Generation-stage efficiency of one arm, without / with the fiber splitter.
    double eta_gen_intra() const;
    double eta_gen_inter() const;
    // Analysis/tomography stage: q-plate, fiber coupling, detector.
    double eta_tomo() const;

    double fibered_brightness() const;     // detected / (pump * eta_det)
    double first_lens_brightness() const;  // detected / (pump * eta_det * eta_setup)
};

// Generic product of named factors raised to multiplicities. Unknown factor
// names raise ConfigError.
double chain_product(const EfficiencyChain& chain,
                     const std::map<std::string, int>& factor_powers);

struct RateBudget {
    double r_gen_intra_hz;  // generated, intra arm (after the second BS)
    double r_intra_hz;      // detected, intra
    double r_gen_inter_hz;  // generated coincidences, inter
    double r_inter_hz;      // detected coincidences, inter
};

// R_gen_intra = eta_gen_intra * R_exc / 2
// R_intra     = eta_tomo * R_gen_intra
// R_gen_inter = eta_gen_inter^2 * R_exc / 8
// R_inter     = eta_tomo^2 * R_gen_inter
RateBudget rates(const EfficiencyChain& chain);

// Key-value text ("eta_qplate = 0.70", "connectors_intra = 2", ...) applied on
// top of the defaults above.
EfficiencyChain parse_chain_config(const std::string& text);

double first_lens_brightness(double detected_rate_hz, double pump_rate_hz, double eta_det,
                             double eta_setup);

}  // namespace vvsim

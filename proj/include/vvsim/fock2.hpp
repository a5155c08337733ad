#pragma once

// Bosonic two-photon interference on the physical beam splitter.
//
// The splitter acts on creation operators as (ports a,b in, c,d out):
//     a^+_X -> (c^+_X - d^+_{mirror X}) / sqrt(2)
//     b^+_X -> (c^+_{mirror X} + d^+_X) / sqrt(2)
// where `mirror` flips both circular polarization and OAM sign: every
// reflection at the semi-reflective surface inverts helicity.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vvsim/modes.hpp"

namespace vvsim {

// Reflection bookkeeping for a single basis mode label.
inline Mode mirrored(const Mode& m) { return Mode{flipped(m.pol), -m.oam}; }

enum class Port : std::uint8_t { a = 0, b = 1, c = 2, d = 3 };

struct PortMode {
    Port port;
    Mode mode;

    friend auto operator<=>(const PortMode&, const PortMode&) = default;
};

// Two-photon amplitude map over unordered port-mode pairs, bosonic
// normalization: the doubly occupied basis vector is (x^+)^2 |0> / sqrt(2).
class TwoPhotonState {
  public:
    // Key is stored with first <= second; exchange symmetry is structural.
    struct Term {
        PortMode first;
        PortMode second;
        Complex amp;
    };

    void add_product(const PortMode& x, const PortMode& y, const Complex& coeff);
    void finalize();  // sort, merge, prune

    const std::vector<Term>& terms() const { return terms_; }
    Complex amplitude(const PortMode& x, const PortMode& y) const;
    double norm_squared() const;

  private:
    std::vector<Term> terms_;
    bool finalized_ = false;
};

// Expands a^+_psi b^+_phi |0,0> through the splitter; output is normalized for
// normalized inputs (checked to 1e-12).
TwoPhotonState bs_scatter(const SingleKet& input_a, const SingleKet& input_b);

struct PatternProbabilities {
    double p_cc;
    double p_dd;
    double p_cd;
};
PatternProbabilities pattern_probabilities(const TwoPhotonState& state);

// Scalar internal-mode overlap of the interfering photons, optionally with a
// Gaussian temporal profile M(tau) = M exp(-(tau/tau_c)^2).
struct IndistinguishabilityModel {
    double overlap = 1.0;  // M in [0,1]
    std::optional<double> delay_ns;
    double coherence_ns = 100.0;

    double effective() const;
};

// V = 1 - 2 p_cd(M) with p_cd(M) = M p_cd^ind + (1-M)/2.
double hom_visibility(const SingleKet& input_a, const SingleKet& input_b,
                      const IndistinguishabilityModel& model);

// Single-photon scattering matrix over (port, mode) labels, with an
// independent permanent-based amplitude rule. Used as the second route of the
// two-route interference check.
struct PortScattering {
    std::vector<PortMode> inputs;
    std::vector<PortMode> outputs;
    Eigen::MatrixXcd matrix;  // outputs x inputs

    int input_index(const PortMode& pm) const;
    int output_index(const PortMode& pm) const;
    Complex entry(const PortMode& out, const PortMode& in) const;
};

PortScattering bs_port_scattering(int oam_cutoff = kDefaultOamCutoff);

// Two-photon transition amplitude = permanent of the 2x2 submatrix divided by
// sqrt(input multiplicities! * output multiplicities!).
Complex permanent_amplitude(const PortScattering& scattering,
                            const std::pair<PortMode, PortMode>& in,
                            const std::pair<PortMode, PortMode>& out);

// The normalized two-photon basis state x^+_{ket_x} y^+_{ket_y} |0>.
TwoPhotonState two_photon_pattern(Port port_x, const SingleKet& ket_x, Port port_y,
                                  const SingleKet& ket_y);

// <pattern|state> over the shared unordered pair basis.
Complex two_photon_overlap(const TwoPhotonState& pattern, const TwoPhotonState& state);

// --- correlation histograms -------------------------------------------------

struct HistogramParams {
    double rate_hz;             // detected singles rate, split over two detectors
    double rep_period_ns = 12.5;
    double duration_s;
    int side_peaks_each_side = 6;
    double g2 = 0.0;            // multi-photon accidental fraction, in [0, 1)
};

struct Histogram {
    double rep_period_ns;
    std::vector<double> delays_ns;     // k * rep_period for k in [-K, K]
    std::vector<long long> counts;
    int central_index;
};

// Coincidence histogram of a HOM experiment. Peak means:
//   side peaks:  N = (rate/2)^2 * rep_period * duration
//   central:     N * ((1 - V)/2 + g2)
// so the quoted estimator V = 1 - 2 C0/<C> recovers the raw visibility
// V_raw = V - 2 g2 (distinguishable photons give half the side-peak counts).
Histogram simulate_histogram(const SingleKet& input_a, const SingleKet& input_b,
                             const IndistinguishabilityModel& model, const HistogramParams& params,
                             std::uint64_t rng_seed);
Histogram simulate_histogram_with_visibility(double visibility, const HistogramParams& params,
                                             std::uint64_t rng_seed);

// Hanbury Brown-Twiss histogram of the bare source: central peak mean = g2 * N.
Histogram simulate_hbt_histogram(const HistogramParams& params, std::uint64_t rng_seed);

struct VisibilityEstimate {
    double v;
    double v_std;
    double c0;
    double side_mean;
};
struct G2Estimate {
    double g2;
    double g2_std;
    double c0;
    double side_mean;
};

// V = 1 - 2 C0 / <C>, errors by Poisson propagation. Needs >= 3 side peaks on
// each side of the central one.
VisibilityEstimate estimate_visibility(const Histogram& histogram);
// g2 = C0 / <C> on an HBT histogram.
G2Estimate estimate_g2(const Histogram& histogram);

}  // namespace vvsim

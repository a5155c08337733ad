#pragma once

// Single-photon unitaries for the optical elements of the platform: waveplates,
// q-plates, mirror reflection, polarizing-splitter projection, and the
// vector-vortex preparation pipeline built from them.
//
// Phase conventions (all tests depend on these):
//   - waveplate matrices are written in the linear basis and conjugated into
//     the circular canonical basis; hwp(0) is real,
//   - hwp(theta) in the linear basis is [[cos2t, sin2t], [sin2t, -cos2t]],
//   - qwp(theta) = Rot(theta) diag(1, i) Rot(-theta) in the linear basis,
//   - qplate(q, a0): |R,m> -> e^{+i 2q a0} |L, m-2q>,
//                    |L,m> -> e^{-i 2q a0} |R, m+2q>,
//   - mirror(): |R,m> <-> |L,-m> with unit coefficients, which makes |H> -> |H>
//     and |V> -> -|V>.

#include <optional>
#include <string>
#include <vector>

#include "vvsim/modes.hpp"

namespace vvsim {

// Sparse single-photon operator over the truncated mode space. Columns may be
// missing where the physical image leaves the truncation (q-plate boundary);
// applying the operator to amplitude on such a mode raises TruncationError.
class ElementUnitary {
  public:
    struct Entry {
        Mode out;
        Complex amp;
    };
    struct Column {
        Mode in;
        std::vector<Entry> entries;
    };

    ElementUnitary(std::string name, std::vector<Column> columns, int oam_cutoff);

    const std::string& name() const { return name_; }
    int oam_cutoff() const { return oam_cutoff_; }

    SingleKet apply(const SingleKet& state) const;

    // this(other(x)): `other` acts first in beam order.
    ElementUnitary after(const ElementUnitary& other) const;

    // Max deviation of U^dagger U from identity over the columns present.
    double unitarity_defect() const;

    // True when the column for `in` exists (its image stays inside truncation).
    bool has_column(const Mode& in) const;
    Complex entry(const Mode& out, const Mode& in) const;

  private:
    std::string name_;
    std::vector<Column> columns_;  // sorted by input mode
    int oam_cutoff_;
};

ElementUnitary qplate(double q, double alpha0, int oam_cutoff = kDefaultOamCutoff);
ElementUnitary hwp(double theta, int oam_cutoff = kDefaultOamCutoff);
ElementUnitary qwp(double theta, int oam_cutoff = kDefaultOamCutoff);
ElementUnitary mirror(int oam_cutoff = kDefaultOamCutoff);
ElementUnitary identity_element(int oam_cutoff = kDefaultOamCutoff);

// cos(theta/2)|L,-2> + e^{i psi} sin(theta/2)|R,+2>
SingleKet prepare_vv(double theta, double psi, int oam_cutoff = kDefaultOamCutoff);

// The physical preparation pipeline: |H,0> -> qwp -> hwp -> qplate(1, 0).
SingleKet prepare_from_waveplates(double qwp_angle, double hwp_angle,
                                  int oam_cutoff = kDefaultOamCutoff);

enum class LinearFilter { H, V };

// Ordered element chain (beam order) ending in a polarization filter.
struct ProjectorChain {
    std::vector<ElementUnitary> elements;
    LinearFilter filter = LinearFilter::H;
    bool fiber_coupled = false;  // final SMF keeps only m = 0

    // Unnormalized amplitudes surviving the chain, the polarization filter and
    // (optionally) fiber coupling, indexed by the remaining OAM value.
    std::vector<std::pair<int, Complex>> filtered_terms(const SingleKet& state) const;
    double probability(const SingleKet& state) const;
};

// Analysis stage of the measurement setup: optional q-plate followed by QWP,
// HWP and a PBS filter. with_qplate=true analyzes the OAM content (q-plate
// converts it to polarization first), false analyzes polarization directly.
ProjectorChain analysis_projector(double pol_qwp, double pol_hwp, LinearFilter filter,
                                  bool with_qplate, int oam_cutoff = kDefaultOamCutoff);

// Waveplate settings (degrees) that project onto each canonical polarization
// state when followed by an H filter. Used to assemble tomography bases.
struct WaveplateSetting {
    double qwp_deg;
    double hwp_deg;
};
WaveplateSetting analysis_setting_for(char pol_state);  // 'H','V','D','A','R','L'

// Element-chain grammar: "qwp(<deg>) | hwp(<deg>) | qplate(q=<val>, a0=<deg>) | pbs(<H|V>)",
// composed left-to-right in beam order. A pbs is only legal as the last element.
struct ParsedChain {
    std::vector<ElementUnitary> elements;
    std::optional<LinearFilter> filter;
};
ParsedChain parse_element_chain(const std::string& text, int oam_cutoff = kDefaultOamCutoff);

}  // namespace vvsim

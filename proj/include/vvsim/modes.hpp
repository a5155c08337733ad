#pragma once

// Hybrid single-photon mode space: circular polarization x truncated integer OAM,
// plus the sparse state-vector algebra everything else is built on.
//
// Conventions fixed here and used throughout:
//   - circular basis {R, L} is canonical storage,
//   - |H> = (|R> + |L>)/sqrt(2),  |V> = (|R> - |L>)/(i sqrt(2)),
//   - modes order as R before L, then ascending OAM.

#include <compare>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "vvsim/errors.hpp"

namespace vvsim {

using Complex = std::complex<double>;

inline constexpr int kDefaultOamCutoff = 4;  // |m| <= 4 keeps one q=1 q-plate pass in range
inline constexpr double kAmplitudePrune = 1e-15;
inline constexpr double kNormTolerance = 1e-12;

enum class Pol : std::uint8_t { R = 0, L = 1 };

inline Pol flipped(Pol p) { return p == Pol::R ? Pol::L : Pol::R; }

struct Mode {
    Pol pol;
    int oam;

    friend auto operator<=>(const Mode&, const Mode&) = default;
};

inline Mode mode_r(int m) { return Mode{Pol::R, m}; }
inline Mode mode_l(int m) { return Mode{Pol::L, m}; }

// Canonical text form, e.g. "R:+2", "L:-2".
std::string mode_label(const Mode& mode);

// Normalized sparse amplitude vector over Modes. Immutable after construction.
class SingleKet {
  public:
    using Term = std::pair<Mode, Complex>;

    // Normalizes, prunes amplitudes below kAmplitudePrune, and records the
    // pre-normalization norm. Throws ZeroVectorError / TruncationError.
    static SingleKet from_amplitudes(std::vector<Term> terms, int oam_cutoff = kDefaultOamCutoff);

    const std::vector<Term>& terms() const { return terms_; }
    int oam_cutoff() const { return oam_cutoff_; }
    double prenorm() const { return prenorm_; }

    Complex amplitude(const Mode& mode) const;
    double norm() const;

    // Identical term list (used by determinism tests).
    bool identical_to(const SingleKet& other) const;

    std::string to_string() const;

  private:
    SingleKet(std::vector<Term> terms, int oam_cutoff, double prenorm)
        : terms_(std::move(terms)), oam_cutoff_(oam_cutoff), prenorm_(prenorm) {}

    std::vector<Term> terms_;  // sorted by Mode, deterministic
    int oam_cutoff_;
    double prenorm_;
};

SingleKet ket(std::initializer_list<SingleKet::Term> terms, int oam_cutoff = kDefaultOamCutoff);
SingleKet ket(std::vector<SingleKet::Term> terms, int oam_cutoff = kDefaultOamCutoff);

// Conjugate-symmetric sesquilinear product <a|b> (conjugation on `a`).
Complex inner(const SingleKet& a, const SingleKet& b);

// Relabeling of two physical modes as a logical qubit.
struct LogicalQubitMap {
    Mode basis0;
    Mode basis1;

    LogicalQubitMap(Mode b0, Mode b1) : basis0(b0), basis1(b1) {
        if (b0 == b1) throw ParameterError("logical qubit basis states must differ");
    }

    // |0> = |L,-2>, |1> = |R,+2>: the hybrid vector-vortex qubit.
    static LogicalQubitMap hybrid();
};

struct LogicalProjection {
    Complex amp0;
    Complex amp1;
    double leakage;  // probability weight outside span{basis0, basis1}
};

// Renormalized projection of `state` onto the logical span; throws
// DegenerateProjectionError when the projected weight vanishes.
LogicalProjection to_logical(const SingleKet& state, const LogicalQubitMap& map);

// Parses the mode-label grammar "R:+2" | "L:-2" | "H:0" | "V:0" into a ket;
// linear labels expand per the fixed circular convention.
SingleKet parse_state_label(const std::string& label, int oam_cutoff = kDefaultOamCutoff);

}  // namespace vvsim

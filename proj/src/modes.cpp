#include "vvsim/modes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vvsim {

std::string mode_label(const Mode& mode) {
    std::ostringstream out;
    out << (mode.pol == Pol::R ? 'R' : 'L') << ':' << (mode.oam >= 0 ? "+" : "") << mode.oam;
    return out.str();
}

SingleKet SingleKet::from_amplitudes(std::vector<Term> terms, int oam_cutoff) {
    if (oam_cutoff < 2) throw ParameterError("oam cutoff must be at least 2");
    if (terms.empty()) throw ZeroVectorError("ket built from an empty amplitude list");

    for (const auto& [mode, amp] : terms) {
        if (std::abs(mode.oam) > oam_cutoff) {
            throw TruncationError("mode " + mode_label(mode) + " outside |m| <= " +
                                  std::to_string(oam_cutoff));
        }
    }

    // Merge duplicates into canonical order.
    std::sort(terms.begin(), terms.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (const auto& term : terms) {
        if (!merged.empty() && merged.back().first == term.first) {
            merged.back().second += term.second;
        } else {
            merged.push_back(term);
        }
    }

    double norm_sq = 0.0;
    for (const auto& [mode, amp] : merged) norm_sq += std::norm(amp);
    const double prenorm = std::sqrt(norm_sq);
    if (!(prenorm > 0.0) || !std::isfinite(prenorm)) {
        throw ZeroVectorError("ket amplitudes are all zero");
    }

    // Normalizing an already-normalized vector must be a no-op bit for bit.
    const bool rescale = std::abs(prenorm - 1.0) > kNormTolerance;

    std::vector<Term> kept;
    kept.reserve(merged.size());
    for (auto& [mode, amp] : merged) {
        const Complex scaled = rescale ? amp / prenorm : amp;
        if (std::abs(scaled) >= kAmplitudePrune) kept.emplace_back(mode, scaled);
    }
    if (kept.empty()) throw ZeroVectorError("ket amplitudes are all zero after pruning");

    // Pruning can leave the norm fractionally below one; renormalize the survivors.
    double kept_sq = 0.0;
    for (const auto& [mode, amp] : kept) kept_sq += std::norm(amp);
    const double kept_norm = std::sqrt(kept_sq);
    if (std::abs(kept_norm - 1.0) > kNormTolerance) {
        for (auto& [mode, amp] : kept) amp /= kept_norm;
    }

    return SingleKet(std::move(kept), oam_cutoff, prenorm);
}

Complex SingleKet::amplitude(const Mode& mode) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), mode,
                               [](const Term& t, const Mode& m) { return t.first < m; });
    if (it != terms_.end() && it->first == mode) return it->second;
    return Complex(0.0, 0.0);
}

double SingleKet::norm() const {
    double s = 0.0;
    for (const auto& [mode, amp] : terms_) s += std::norm(amp);
    return std::sqrt(s);
}

bool SingleKet::identical_to(const SingleKet& other) const {
    return oam_cutoff_ == other.oam_cutoff_ && terms_ == other.terms_;
}

std::string SingleKet::to_string() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [mode, amp] : terms_) {
        if (!first) out << " + ";
        out << "(" << amp.real() << (amp.imag() < 0 ? "-" : "+") << std::abs(amp.imag()) << "i)"
            << "|" << mode_label(mode) << ">";
        first = false;
    }
    return out.str();
}

SingleKet ket(std::initializer_list<SingleKet::Term> terms, int oam_cutoff) {
    return SingleKet::from_amplitudes(std::vector<SingleKet::Term>(terms), oam_cutoff);
}

SingleKet ket(std::vector<SingleKet::Term> terms, int oam_cutoff) {
    return SingleKet::from_amplitudes(std::move(terms), oam_cutoff);
}

Complex inner(const SingleKet& a, const SingleKet& b) {
    if (a.oam_cutoff() != b.oam_cutoff()) {
        throw DimensionError("inner product across different OAM truncations");
    }
    // Both term lists are sorted; merge walk.
    Complex acc(0.0, 0.0);
    auto ia = a.terms().begin();
    auto ib = b.terms().begin();
    while (ia != a.terms().end() && ib != b.terms().end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            acc += std::conj(ia->second) * ib->second;
            ++ia;
            ++ib;
        }
    }
    return acc;
}

LogicalQubitMap LogicalQubitMap::hybrid() { return LogicalQubitMap(mode_l(-2), mode_r(2)); }

LogicalProjection to_logical(const SingleKet& state, const LogicalQubitMap& map) {
    const Complex a0 = state.amplitude(map.basis0);
    const Complex a1 = state.amplitude(map.basis1);
    const double weight = std::norm(a0) + std::norm(a1);
    if (weight < 1e-24) {
        throw DegenerateProjectionError("state has no weight on the logical span");
    }
    const double scale = std::sqrt(weight);
    return LogicalProjection{a0 / scale, a1 / scale, std::max(0.0, 1.0 - weight)};
}

SingleKet parse_state_label(const std::string& label, int oam_cutoff) {
    const auto colon = label.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= label.size()) {
        throw ParseError("mode label must look like R:+2, L:-2, H:0 or V:0: '" + label + "'");
    }
    const std::string pol = label.substr(0, colon);
    int m = 0;
    try {
        size_t used = 0;
        m = std::stoi(label.substr(colon + 1), &used);
        if (used != label.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ParseError("bad OAM value in mode label '" + label + "'");
    }

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (pol == "R") return ket({{mode_r(m), 1.0}}, oam_cutoff);
    if (pol == "L") return ket({{mode_l(m), 1.0}}, oam_cutoff);
    if (pol == "H") {
        return ket({{mode_r(m), inv_sqrt2}, {mode_l(m), inv_sqrt2}}, oam_cutoff);
    }
    if (pol == "V") {
        // |V> = (|R> - |L>)/(i sqrt(2))
        const Complex c = Complex(0.0, -1.0) * inv_sqrt2;
        return ket({{mode_r(m), c}, {mode_l(m), -c}}, oam_cutoff);
    }
    throw ParseError("unknown polarization letter in mode label '" + label + "'");
}

}  // namespace vvsim

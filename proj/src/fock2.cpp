#include "vvsim/fock2.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vvsim {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

void TwoPhotonState::add_product(const PortMode& x, const PortMode& y, const Complex& coeff) {
    PortMode lo = x, hi = y;
    if (hi < lo) std::swap(lo, hi);
    // x^+ y^+ |0> = |x,y> when distinct, sqrt(2) |2_x> when equal.
    const Complex amp = (lo == hi) ? coeff * kSqrt2 : coeff;
    terms_.push_back({lo, hi, amp});
    finalized_ = false;
}

void TwoPhotonState::finalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& s, const Term& t) {
        if (s.first != t.first) return s.first < t.first;
        return s.second < t.second;
    });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const auto& term : terms_) {
        if (!merged.empty() && merged.back().first == term.first &&
            merged.back().second == term.second) {
            merged.back().amp += term.amp;
        } else {
            merged.push_back(term);
        }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Term& t) { return std::abs(t.amp) < kAmplitudePrune; }),
                 merged.end());
    terms_ = std::move(merged);
    finalized_ = true;
}

Complex TwoPhotonState::amplitude(const PortMode& x, const PortMode& y) const {
    PortMode lo = x, hi = y;
    if (hi < lo) std::swap(lo, hi);
    for (const auto& term : terms_) {
        if (term.first == lo && term.second == hi) return term.amp;
    }
    return Complex(0, 0);
}

double TwoPhotonState::norm_squared() const {
    double s = 0.0;
    for (const auto& term : terms_) s += std::norm(term.amp);
    return s;
}

TwoPhotonState bs_scatter(const SingleKet& input_a, const SingleKet& input_b) {
    if (input_a.oam_cutoff() != input_b.oam_cutoff()) {
        throw DimensionError("bs_scatter inputs use different OAM truncations");
    }

    TwoPhotonState out;
    for (const auto& [ma, aa] : input_a.terms()) {
        const Mode ma_ref = mirrored(ma);
        for (const auto& [mb, ab] : input_b.terms()) {
            const Mode mb_ref = mirrored(mb);
            const Complex coeff = aa * ab * 0.5;
            // (c_X - d_MX)(c_MY + d_Y), X = ma, Y = mb
            out.add_product({Port::c, ma}, {Port::c, mb_ref}, coeff);
            out.add_product({Port::c, ma}, {Port::d, mb}, coeff);
            out.add_product({Port::d, ma_ref}, {Port::c, mb_ref}, -coeff);
            out.add_product({Port::d, ma_ref}, {Port::d, mb}, -coeff);
        }
    }
    out.finalize();

    const double n2 = out.norm_squared();
    if (std::abs(n2 - 1.0) > kNormTolerance) {
        throw Error("beam-splitter output norm deviates from 1 by " + std::to_string(n2 - 1.0));
    }
    return out;
}

PatternProbabilities pattern_probabilities(const TwoPhotonState& state) {
    PatternProbabilities p{0.0, 0.0, 0.0};
    for (const auto& term : state.terms()) {
        const double w = std::norm(term.amp);
        const bool first_c = term.first.port == Port::c;
        const bool second_c = term.second.port == Port::c;
        if (first_c && second_c) {
            p.p_cc += w;
        } else if (!first_c && !second_c) {
            p.p_dd += w;
        } else {
            p.p_cd += w;
        }
    }
    return p;
}

double IndistinguishabilityModel::effective() const {
    if (overlap < 0.0 || overlap > 1.0) throw ParameterError("overlap must lie in [0, 1]");
    if (!delay_ns.has_value()) return overlap;
    if (coherence_ns <= 0.0) throw ParameterError("coherence width must be positive");
    const double x = *delay_ns / coherence_ns;
    return overlap * std::exp(-x * x);
}

double hom_visibility(const SingleKet& input_a, const SingleKet& input_b,
                      const IndistinguishabilityModel& model) {
    const double p_ind = pattern_probabilities(bs_scatter(input_a, input_b)).p_cd;
    const double m = model.effective();
    const double p = m * p_ind + (1.0 - m) * 0.5;
    return 1.0 - 2.0 * p;
}

int PortScattering::input_index(const PortMode& pm) const {
    for (size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i] == pm) return static_cast<int>(i);
    }
    throw DimensionError("port-mode not in scattering input basis");
}

int PortScattering::output_index(const PortMode& pm) const {
    for (size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i] == pm) return static_cast<int>(i);
    }
    throw DimensionError("port-mode not in scattering output basis");
}

Complex PortScattering::entry(const PortMode& out, const PortMode& in) const {
    return matrix(output_index(out), input_index(in));
}

PortScattering bs_port_scattering(int oam_cutoff) {
    PortScattering s;
    for (Port p : {Port::a, Port::b}) {
        for (int pol = 0; pol < 2; ++pol) {
            for (int m = -oam_cutoff; m <= oam_cutoff; ++m) {
                s.inputs.push_back({p, Mode{pol == 0 ? Pol::R : Pol::L, m}});
            }
        }
    }
    for (Port p : {Port::c, Port::d}) {
        for (int pol = 0; pol < 2; ++pol) {
            for (int m = -oam_cutoff; m <= oam_cutoff; ++m) {
                s.outputs.push_back({p, Mode{pol == 0 ? Pol::R : Pol::L, m}});
            }
        }
    }
    s.matrix = Eigen::MatrixXcd::Zero(static_cast<int>(s.outputs.size()),
                                      static_cast<int>(s.inputs.size()));
    const double inv_sqrt2 = 1.0 / kSqrt2;
    for (size_t j = 0; j < s.inputs.size(); ++j) {
        const PortMode in = s.inputs[j];
        if (in.port == Port::a) {
            s.matrix(s.output_index({Port::c, in.mode}), j) = inv_sqrt2;
            s.matrix(s.output_index({Port::d, mirrored(in.mode)}), j) = -inv_sqrt2;
        } else {
            s.matrix(s.output_index({Port::c, mirrored(in.mode)}), j) = inv_sqrt2;
            s.matrix(s.output_index({Port::d, in.mode}), j) = inv_sqrt2;
        }
    }
    return s;
}

Complex permanent_amplitude(const PortScattering& scattering,
                            const std::pair<PortMode, PortMode>& in,
                            const std::pair<PortMode, PortMode>& out) {
    const Complex u11 = scattering.entry(out.first, in.first);
    const Complex u12 = scattering.entry(out.first, in.second);
    const Complex u21 = scattering.entry(out.second, in.first);
    const Complex u22 = scattering.entry(out.second, in.second);
    const Complex permanent = u11 * u22 + u12 * u21;
    double denom = 1.0;
    if (in.first == in.second) denom *= kSqrt2;
    if (out.first == out.second) denom *= kSqrt2;
    return permanent / denom;
}

TwoPhotonState two_photon_pattern(Port port_x, const SingleKet& ket_x, Port port_y,
                                  const SingleKet& ket_y) {
    TwoPhotonState pattern;
    for (const auto& [mx, ax] : ket_x.terms()) {
        for (const auto& [my, ay] : ket_y.terms()) {
            pattern.add_product({port_x, mx}, {port_y, my}, ax * ay);
        }
    }
    pattern.finalize();
    const double n = std::sqrt(pattern.norm_squared());
    if (n < 1e-15) throw ZeroVectorError("two-photon pattern has zero norm");
    TwoPhotonState normalized;
    for (const auto& t : pattern.terms()) {
        normalized.add_product(t.first, t.second,
                               (t.first == t.second) ? t.amp / (n * kSqrt2) : t.amp / n);
    }
    normalized.finalize();
    return normalized;
}

Complex two_photon_overlap(const TwoPhotonState& pattern, const TwoPhotonState& state) {
    Complex acc(0, 0);
    for (const auto& t : pattern.terms()) {
        acc += std::conj(t.amp) * state.amplitude(t.first, t.second);
    }
    return acc;
}

namespace {

Histogram sample_histogram(double side_mean, double central_mean, const HistogramParams& params,
                           std::uint64_t rng_seed) {
    if (params.duration_s <= 0.0) throw ParameterError("histogram duration must be positive");
    if (params.rate_hz <= 0.0) throw ParameterError("histogram rate must be positive");
    if (params.rep_period_ns <= 0.0) throw ParameterError("repetition period must be positive");
    if (params.g2 < 0.0 || params.g2 >= 1.0) throw ParameterError("g2 must lie in [0, 1)");
    if (params.side_peaks_each_side < 3) {
        throw ParameterError("need at least 3 side peaks on each side");
    }

    std::mt19937_64 rng(rng_seed);
    Histogram h;
    h.rep_period_ns = params.rep_period_ns;
    const int k_max = params.side_peaks_each_side;
    h.central_index = k_max;
    for (int k = -k_max; k <= k_max; ++k) {
        h.delays_ns.push_back(k * params.rep_period_ns);
        const double mean = (k == 0) ? central_mean : side_mean;
        std::poisson_distribution<long long> poisson(mean);
        h.counts.push_back(mean > 0.0 ? poisson(rng) : 0);
    }
    return h;
}

double side_peak_mean(const HistogramParams& params) {
    const double per_detector = params.rate_hz / 2.0;
    return per_detector * per_detector * (params.rep_period_ns * 1e-9) * params.duration_s;
}

}  // namespace

Histogram simulate_histogram_with_visibility(double visibility, const HistogramParams& params,
                                             std::uint64_t rng_seed) {
    const double side = side_peak_mean(params);
    const double central = side * ((1.0 - visibility) / 2.0 + params.g2);
    return sample_histogram(side, central, params, rng_seed);
}

Histogram simulate_histogram(const SingleKet& input_a, const SingleKet& input_b,
                             const IndistinguishabilityModel& model, const HistogramParams& params,
                             std::uint64_t rng_seed) {
    return simulate_histogram_with_visibility(hom_visibility(input_a, input_b, model), params,
                                              rng_seed);
}

Histogram simulate_hbt_histogram(const HistogramParams& params, std::uint64_t rng_seed) {
    const double side = side_peak_mean(params);
    return sample_histogram(side, side * params.g2, params, rng_seed);
}

namespace {

struct PeakSummary {
    double c0;
    double side_mean;
    double side_count;  // number of side peaks
};

PeakSummary summarize(const Histogram& histogram) {
    const int n = static_cast<int>(histogram.counts.size());
    if (histogram.central_index < 3 || n - histogram.central_index - 1 < 3) {
        throw EstimationError("histogram needs at least 3 side peaks on each side");
    }
    double side_sum = 0.0;
    int side_n = 0;
    for (int i = 0; i < n; ++i) {
        if (i == histogram.central_index) continue;
        side_sum += static_cast<double>(histogram.counts[i]);
        ++side_n;
    }
    if (side_sum <= 0.0) throw EstimationError("all side peaks are empty");
    return {static_cast<double>(histogram.counts[histogram.central_index]), side_sum / side_n,
            static_cast<double>(side_n)};
}

}  // namespace

VisibilityEstimate estimate_visibility(const Histogram& histogram) {
    const PeakSummary s = summarize(histogram);
    const double v = 1.0 - 2.0 * s.c0 / s.side_mean;
    // Poisson: Var(C0) = C0, Var(side mean) = side_mean / K.
    const double var = 4.0 * s.c0 / (s.side_mean * s.side_mean) +
                       4.0 * s.c0 * s.c0 / (std::pow(s.side_mean, 3) * s.side_count);
    return {v, std::sqrt(var), s.c0, s.side_mean};
}

G2Estimate estimate_g2(const Histogram& histogram) {
    const PeakSummary s = summarize(histogram);
    const double g2 = s.c0 / s.side_mean;
    const double var = s.c0 / (s.side_mean * s.side_mean) +
                       s.c0 * s.c0 / (std::pow(s.side_mean, 3) * s.side_count);
    return {g2, std::sqrt(var), s.c0, s.side_mean};
}

}  // namespace vvsim

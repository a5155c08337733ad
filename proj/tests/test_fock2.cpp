#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include <Eigen/Dense>

#include "test_helpers.hpp"
#include "vvsim/elements.hpp"
#include "vvsim/fock2.hpp"

using namespace vvsim;
using test_helpers::approx;
using test_helpers::approx_c;

namespace {

const double kPi = 3.14159265358979323846;
const double kRoot2 = std::sqrt(2.0);

SingleKet r2() { return parse_state_label("R:+2"); }
SingleKet l2() { return parse_state_label("L:-2"); }
SingleKet phi_plus() { return prepare_vv(kPi / 2, 0.0); }
SingleKet phi_minus() { return prepare_vv(kPi / 2, kPi); }

const IndistinguishabilityModel kIdeal{1.0, std::nullopt, 100.0};

// Independent two-photon expansion through an arbitrary port scattering:
// (sum_k U[k,i1] k+)(sum_l U[l,i2] l+)|0>, collected over unordered pairs.
std::map<std::pair<PortMode, PortMode>, Complex> expand_pair(const PortScattering& s,
                                                             const PortMode& i1,
                                                             const PortMode& i2) {
    std::map<std::pair<PortMode, PortMode>, Complex> amps;
    const double input_norm = (i1 == i2) ? kRoot2 : 1.0;
    for (size_t k = 0; k < s.outputs.size(); ++k) {
        for (size_t l = 0; l < s.outputs.size(); ++l) {
            const Complex coeff =
                s.matrix(k, s.input_index(i1)) * s.matrix(l, s.input_index(i2)) / input_norm;
            if (std::abs(coeff) < 1e-16) continue;
            PortMode lo = s.outputs[k], hi = s.outputs[l];
            if (hi < lo) std::swap(lo, hi);
            amps[{lo, hi}] += (lo == hi) ? coeff * kRoot2 : coeff;
        }
    }
    return amps;
}

}  // namespace

TEST_CASE("splitter output for equal circular inputs keeps all four terms") {
    const TwoPhotonState out = bs_scatter(l2(), l2());
    const PortMode cl{Port::c, mode_l(-2)}, cr{Port::c, mode_r(2)};
    const PortMode dl{Port::d, mode_l(-2)}, dr{Port::d, mode_r(2)};
    CHECK(approx_c(out.amplitude(cl, cr), 0.5));
    CHECK(approx_c(out.amplitude(cl, dl), 0.5));
    CHECK(approx_c(out.amplitude(cr, dr), -0.5));
    CHECK(approx_c(out.amplitude(dr, dl), -0.5));
    CHECK(out.terms().size() == 4);
}

TEST_CASE("splitter output for opposite circular inputs fully bunches") {
    const TwoPhotonState out = bs_scatter(l2(), r2());
    const PortMode cl{Port::c, mode_l(-2)}, dr{Port::d, mode_r(2)};
    CHECK(approx_c(out.amplitude(cl, cl), 1.0 / kRoot2));
    CHECK(approx_c(out.amplitude(dr, dr), -1.0 / kRoot2));
    CHECK(pattern_probabilities(out).p_cd == 0.0);
}

TEST_CASE("equal vector-vortex inputs cancel all coincidence terms") {
    const TwoPhotonState out = bs_scatter(phi_plus(), phi_plus());
    const PatternProbabilities p = pattern_probabilities(out);
    CHECK(p.p_cd == 0.0);
    CHECK(approx(p.p_cc + p.p_dd, 1.0));
    const PortMode cl{Port::c, mode_l(-2)}, cr{Port::c, mode_r(2)};
    CHECK(approx_c(out.amplitude(cl, cl), kRoot2 / 4.0));
    CHECK(approx_c(out.amplitude(cl, cr), 0.5));
}

TEST_CASE("pattern probabilities add to one and split as expected") {
    const PatternProbabilities p_hv = pattern_probabilities(bs_scatter(phi_plus(), phi_minus()));
    CHECK(approx(p_hv.p_cd, 0.5));
    CHECK(approx(p_hv.p_cc + p_hv.p_dd + p_hv.p_cd, 1.0));

    const PatternProbabilities p_mixed = pattern_probabilities(bs_scatter(l2(), phi_plus()));
    CHECK(approx(p_mixed.p_cc + p_mixed.p_dd, 0.75));
    CHECK(approx(p_mixed.p_cd, 0.25));
}

TEST_CASE("interference visibilities for the five canonical preparations") {
    CHECK(approx(hom_visibility(r2(), r2(), kIdeal), 0.0));
    CHECK(approx(hom_visibility(r2(), l2(), kIdeal), 1.0));
    CHECK(approx(hom_visibility(phi_plus(), phi_minus(), kIdeal), 0.0));
    CHECK(approx(hom_visibility(phi_plus(), phi_plus(), kIdeal), 1.0));
    CHECK(approx(hom_visibility(phi_plus(), r2(), kIdeal), 0.5));
}

TEST_CASE("partial distinguishability scales the visibility linearly") {
    IndistinguishabilityModel m;
    m.overlap = 0.955;
    CHECK(approx(hom_visibility(r2(), l2(), m), 0.955));

    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const SingleKet a = test_helpers::random_ket(rng, test_helpers::safe_support());
        const SingleKet b = test_helpers::random_ket(rng, test_helpers::safe_support());
        IndistinguishabilityModel zero;
        zero.overlap = 0.0;
        CHECK(approx(hom_visibility(a, b, zero), 0.0));

        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double m1 = u(rng), m2 = u(rng);
        IndistinguishabilityModel ma, mb;
        ma.overlap = m1;
        mb.overlap = m2;
        const double v1 = hom_visibility(a, b, ma);
        const double v2 = hom_visibility(a, b, mb);
        CHECK(v1 >= -1.0 - 1e-12);
        CHECK(v1 <= 1.0 + 1e-12);
        if (m1 > 1e-9) {
            // affine in the overlap with V(0) = 0
            CHECK(approx(v1 / m1, m2 > 1e-9 ? v2 / m2 : v1 / m1, 1e-9));
        }
    }
}

TEST_CASE("temporal delay suppresses the effective overlap") {
    IndistinguishabilityModel m;
    m.overlap = 0.9;
    m.delay_ns = 2.0;
    m.coherence_ns = 2.0;
    CHECK(approx(m.effective(), 0.9 * std::exp(-1.0)));
    m.delay_ns.reset();
    CHECK(approx(m.effective(), 0.9));
    m.overlap = 1.5;
    CHECK_THROWS_AS(m.effective(), ParameterError);
}

TEST_CASE("coincidence probability is invariant under mirrored port swap") {
    std::mt19937_64 rng(32);
    const ElementUnitary m = mirror();
    for (int i = 0; i < 100; ++i) {
        const SingleKet a = test_helpers::random_ket(rng, test_helpers::safe_support());
        const SingleKet b = test_helpers::random_ket(rng, test_helpers::safe_support());
        const double p1 = pattern_probabilities(bs_scatter(a, b)).p_cd;
        const double p2 = pattern_probabilities(bs_scatter(m.apply(b), m.apply(a))).p_cd;
        CHECK(approx(p1, p2, 1e-12));
    }
}

TEST_CASE("splitter output is normalized for random inputs") {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 200; ++i) {
        const SingleKet a = test_helpers::random_ket(rng, test_helpers::safe_support());
        const SingleKet b = test_helpers::random_ket(rng, test_helpers::safe_support());
        CHECK(approx(bs_scatter(a, b).norm_squared(), 1.0));
    }
}

TEST_CASE("permanent amplitude for the identity scattering") {
    PortScattering s;
    s.inputs = {{Port::a, mode_r(0)}, {Port::b, mode_l(1)}};
    s.outputs = {{Port::c, mode_r(0)}, {Port::d, mode_l(1)}};
    s.matrix = Eigen::MatrixXcd::Identity(2, 2);
    const Complex amp = permanent_amplitude(s, {s.inputs[0], s.inputs[1]},
                                            {s.outputs[0], s.outputs[1]});
    CHECK(approx_c(amp, 1.0));
}

TEST_CASE("permanent amplitude matches the splitter coincidence term") {
    const PortScattering s = bs_port_scattering();
    const Complex amp = permanent_amplitude(
        s, {{Port::a, mode_l(-2)}, {Port::b, mode_l(-2)}},
        {{Port::c, mode_l(-2)}, {Port::d, mode_l(-2)}});
    CHECK(approx_c(amp, 0.5));
}

TEST_CASE("permanent oracle equals the operator expansion for a random 6-mode unitary") {
    std::mt19937_64 rng(34);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(6, 6);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    }
    const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();

    PortScattering s;
    for (int m = 0; m < 3; ++m) s.inputs.push_back({Port::a, mode_r(m)});
    for (int m = 0; m < 3; ++m) s.inputs.push_back({Port::b, mode_r(m)});
    for (int m = 0; m < 3; ++m) s.outputs.push_back({Port::c, mode_r(m)});
    for (int m = 0; m < 3; ++m) s.outputs.push_back({Port::d, mode_r(m)});
    s.matrix = q;

    for (size_t i1 = 0; i1 < s.inputs.size(); ++i1) {
        for (size_t i2 = i1; i2 < s.inputs.size(); ++i2) {
            const auto expansion = expand_pair(s, s.inputs[i1], s.inputs[i2]);
            double total = 0.0;
            for (size_t o1 = 0; o1 < s.outputs.size(); ++o1) {
                for (size_t o2 = o1; o2 < s.outputs.size(); ++o2) {
                    const Complex oracle = permanent_amplitude(
                        s, {s.inputs[i1], s.inputs[i2]}, {s.outputs[o1], s.outputs[o2]});
                    const auto it = expansion.find({s.outputs[o1], s.outputs[o2]});
                    const Complex expanded = it == expansion.end() ? Complex(0, 0) : it->second;
                    CHECK(approx_c(oracle, expanded, 1e-10));
                    total += std::norm(oracle);
                }
            }
            CHECK(approx(total, 1.0, 1e-10));  // unitarity of the two-photon map
        }
    }
}

TEST_CASE("oracle equivalence on random preparations through the physical splitter") {
    std::mt19937_64 rng(35);
    const PortScattering s = bs_port_scattering();
    int checked_states = 0;
    while (checked_states < 100) {
        const SingleKet a = test_helpers::random_ket(rng, test_helpers::safe_support());
        const SingleKet b = test_helpers::random_ket(rng, test_helpers::safe_support());
        const TwoPhotonState out = bs_scatter(a, b);
        ++checked_states;

        for (const auto& term : out.terms()) {
            Complex oracle(0, 0);
            for (const auto& [ma, aa] : a.terms()) {
                for (const auto& [mb, ab] : b.terms()) {
                    oracle += aa * ab *
                              permanent_amplitude(s, {{Port::a, ma}, {Port::b, mb}},
                                                  {term.first, term.second});
                }
            }
            CHECK(approx_c(term.amp, oracle, 1e-10));
        }
    }
}

TEST_CASE("histogram of a perfect dip has an empty central peak") {
    HistogramParams params;
    params.rate_hz = 1e6;
    params.duration_s = 1.0;
    const Histogram h = simulate_histogram(r2(), l2(), kIdeal, params, 7);
    CHECK(h.counts[h.central_index] == 0);
    CHECK(h.counts[0] > 0);
}

TEST_CASE("distinguishable photons give half the side-peak level") {
    HistogramParams params;
    params.rate_hz = 4e6;
    params.duration_s = 10.0;
    IndistinguishabilityModel m;
    m.overlap = 0.0;
    const Histogram h = simulate_histogram(r2(), l2(), m, params, 8);
    const VisibilityEstimate est = estimate_visibility(h);
    CHECK(std::abs(est.v) <= 4.0 * est.v_std);
    CHECK(approx(est.c0 / est.side_mean, 0.5, 0.01));
}

TEST_CASE("histogram peaks sit at multiples of the repetition period") {
    HistogramParams params;
    params.rate_hz = 1e6;
    params.duration_s = 1.0;
    const Histogram h = simulate_histogram(r2(), l2(), kIdeal, params, 9);
    CHECK(h.rep_period_ns == 12.5);
    CHECK(approx(h.delays_ns[h.central_index], 0.0));
    CHECK(approx(h.delays_ns[h.central_index + 1], 12.5));
    CHECK(approx(h.delays_ns[h.central_index - 2], -25.0));
    CHECK(static_cast<int>(h.counts.size()) == 2 * params.side_peaks_each_side + 1);
}

TEST_CASE("histogram simulation is reproducible for a fixed seed") {
    HistogramParams params;
    params.rate_hz = 2e6;
    params.duration_s = 5.0;
    params.g2 = 0.01;
    IndistinguishabilityModel m;
    m.overlap = 0.93;
    const Histogram h1 = simulate_histogram(r2(), l2(), m, params, 1234);
    const Histogram h2 = simulate_histogram(r2(), l2(), m, params, 1234);
    CHECK(h1.counts == h2.counts);
    const Histogram h3 = simulate_histogram(r2(), l2(), m, params, 1235);
    CHECK(h1.counts != h3.counts);
}

TEST_CASE("histogram rejects bad parameters") {
    HistogramParams params;
    params.rate_hz = 1e6;
    params.duration_s = -1.0;
    CHECK_THROWS_AS(simulate_histogram(r2(), l2(), kIdeal, params, 1), ParameterError);
    params.duration_s = 1.0;
    params.rate_hz = 0.0;
    CHECK_THROWS_AS(simulate_histogram(r2(), l2(), kIdeal, params, 1), ParameterError);
    params.rate_hz = 1e6;
    params.g2 = 1.0;
    CHECK_THROWS_AS(simulate_histogram(r2(), l2(), kIdeal, params, 1), ParameterError);
    params.g2 = 0.0;
    params.side_peaks_each_side = 2;
    CHECK_THROWS_AS(simulate_histogram(r2(), l2(), kIdeal, params, 1), ParameterError);
}

TEST_CASE("visibility estimator matches its defining ratios") {
    Histogram h;
    h.rep_period_ns = 12.5;
    h.central_index = 3;
    for (int k = -3; k <= 3; ++k) {
        h.delays_ns.push_back(k * 12.5);
        h.counts.push_back(k == 0 ? 0 : 1000);
    }
    CHECK(approx(estimate_visibility(h).v, 1.0));
    h.counts[3] = 500;
    CHECK(approx(estimate_visibility(h).v, 0.0));
    CHECK(approx(estimate_g2(h).g2, 0.5));
}

TEST_CASE("estimators reject histograms without enough side peaks") {
    Histogram h;
    h.rep_period_ns = 12.5;
    h.central_index = 1;
    h.delays_ns = {-12.5, 0.0, 12.5};
    h.counts = {100, 0, 100};
    CHECK_THROWS_AS(estimate_visibility(h), EstimationError);

    Histogram empty;
    empty.rep_period_ns = 12.5;
    empty.central_index = 3;
    for (int k = -3; k <= 3; ++k) {
        empty.delays_ns.push_back(k * 12.5);
        empty.counts.push_back(0);
    }
    CHECK_THROWS_AS(estimate_visibility(empty), EstimationError);
}

TEST_CASE("seeded round trip recovers the true visibility within three sigma") {
    HistogramParams params;
    params.rate_hz = 4e6;
    params.duration_s = 60.0;
    IndistinguishabilityModel m;
    m.overlap = 0.93;
    const Histogram h = simulate_histogram(r2(), l2(), m, params, 4242);
    const VisibilityEstimate est = estimate_visibility(h);
    CHECK(std::abs(est.v - 0.93) <= 3.0 * est.v_std);
}

TEST_CASE("hbt histogram recovers the multiphoton fraction") {
    HistogramParams params;
    params.rate_hz = 4e6;
    params.duration_s = 60.0;
    params.g2 = 0.0126;
    const Histogram h = simulate_hbt_histogram(params, 777);
    const G2Estimate est = estimate_g2(h);
    CHECK(std::abs(est.g2 - 0.0126) <= 3.0 * est.g2_std);
}

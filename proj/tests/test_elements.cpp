#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "test_helpers.hpp"
#include "vvsim/elements.hpp"

using namespace vvsim;
using test_helpers::approx;
using test_helpers::approx_c;

namespace {
const double kPi = 3.14159265358979323846;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// OAM-only helicity flip, used to probe the q-plate conjugation identities.
ElementUnitary oam_flip(int cutoff = kDefaultOamCutoff) {
    std::vector<ElementUnitary::Column> columns;
    for (int m = -cutoff; m <= cutoff; ++m) {
        columns.push_back({mode_r(m), {{mode_r(-m), 1.0}}});
        columns.push_back({mode_l(m), {{mode_l(-m), 1.0}}});
    }
    return ElementUnitary("oam_flip", std::move(columns), cutoff);
}
}

TEST_CASE("q-plate shifts OAM conditioned on handedness") {
    const ElementUnitary q = qplate(1.0, 0.0);
    const SingleKet out_r = q.apply(ket({{mode_r(0), 1.0}}));
    CHECK(approx_c(out_r.amplitude(mode_l(-2)), 1.0));

    const SingleKet out_l = q.apply(ket({{mode_l(0), 1.0}}));
    CHECK(approx_c(out_l.amplitude(mode_r(2)), 1.0));
}

TEST_CASE("q-plate on horizontal input yields the balanced vector-vortex state") {
    const SingleKet out = qplate(1.0, 0.0).apply(parse_state_label("H:0"));
    CHECK(approx_c(out.amplitude(mode_l(-2)), kInvSqrt2));
    CHECK(approx_c(out.amplitude(mode_r(2)), kInvSqrt2));
}

TEST_CASE("q-plate axis angle sets opposite phases on the two branches") {
    const double a0 = 0.3;
    const ElementUnitary q = qplate(1.0, a0);
    const Complex expect = std::exp(Complex(0, 2.0 * a0));
    CHECK(approx_c(q.apply(ket({{mode_r(0), 1.0}})).amplitude(mode_l(-2)), expect));
    CHECK(approx_c(q.apply(ket({{mode_l(0), 1.0}})).amplitude(mode_r(2)), std::conj(expect)));
}

TEST_CASE("q-plate charge must be half-integer") {
    CHECK_THROWS_AS(qplate(0.3, 0.0), ParameterError);
    CHECK_NOTHROW(qplate(0.5, 0.0));
    CHECK_NOTHROW(qplate(-1.5, 0.0));
}

TEST_CASE("q-plate raises truncation error at the boundary") {
    const ElementUnitary q = qplate(1.0, 0.0);
    CHECK_THROWS_AS(q.apply(ket({{mode_r(-4), 1.0}})), TruncationError);
    CHECK_THROWS_AS(q.apply(ket({{mode_l(4), 1.0}})), TruncationError);
    CHECK_NOTHROW(q.apply(ket({{mode_r(4), 1.0}})));
}

TEST_CASE("half-wave plate at 0 and 22.5 degrees") {
    const SingleKet h = parse_state_label("H:0");
    const SingleKet out0 = hwp(0.0).apply(h);
    CHECK(approx(std::norm(inner(h, out0)), 1.0));  // eigenstate up to global phase

    const SingleKet out = hwp(kPi / 8).apply(h);
    const SingleKet v = parse_state_label("V:0");
    CHECK(approx(std::norm(inner(h, out)), 0.5));
    CHECK(approx(std::norm(inner(v, out)), 0.5));
    // hwp(pi/8) is real in the linear basis: (|H> + |V>)/sqrt(2) exactly
    CHECK(approx_c(inner(h, out), kInvSqrt2));
    CHECK(approx_c(inner(v, out), kInvSqrt2));
}

TEST_CASE("quarter-wave plate at 45 degrees turns H circular") {
    const SingleKet out = qwp(kPi / 4).apply(parse_state_label("H:0"));
    const double p_r = std::norm(out.amplitude(mode_r(0)));
    const double p_l = std::norm(out.amplitude(mode_l(0)));
    CHECK(approx(p_r + p_l, 1.0));
    CHECK(approx(std::abs(p_r - p_l), 1.0));  // fully circular
    // Equal linear components with a quarter-wave relative phase.
    const Complex ch = inner(parse_state_label("H:0"), out);
    const Complex cv = inner(parse_state_label("V:0"), out);
    CHECK(approx(std::norm(ch), 0.5));
    CHECK(approx(std::norm(cv), 0.5));
    CHECK(approx(std::abs(std::arg(cv / ch)), kPi / 2));
}

TEST_CASE("waveplates act on polarization only") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    for (int i = 0; i < 50; ++i) {
        const SingleKet in = test_helpers::random_ket(rng, {mode_r(3), mode_l(3)});
        const SingleKet out = hwp(angle(rng)).apply(in);
        for (const auto& [mode, amp] : out.terms()) CHECK(mode.oam == 3);
    }
}

TEST_CASE("every element preserves the norm on its valid subspace") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    for (int i = 0; i < 300; ++i) {
        const SingleKet in = test_helpers::random_ket(rng, test_helpers::safe_support());
        const double a = angle(rng);
        CHECK(approx(hwp(a).apply(in).norm(), 1.0));
        CHECK(approx(qwp(a).apply(in).norm(), 1.0));
        CHECK(approx(mirror().apply(in).norm(), 1.0));
        CHECK(approx(qplate(1.0, a).apply(in).norm(), 1.0));
    }
    CHECK(hwp(0.7).unitarity_defect() <= 1e-12);
    CHECK(qwp(1.3).unitarity_defect() <= 1e-12);
    CHECK(mirror().unitarity_defect() <= 1e-12);
}

TEST_CASE("mirror flips helicity of polarization and OAM") {
    const ElementUnitary m = mirror();
    CHECK(approx_c(m.apply(ket({{mode_r(2), 1.0}})).amplitude(mode_l(-2)), 1.0));

    const SingleKet h = parse_state_label("H:0");
    CHECK(approx_c(inner(h, m.apply(h)), 1.0));  // +1 eigenstate
    const SingleKet v = parse_state_label("V:0");
    CHECK(approx_c(inner(v, m.apply(v)), -1.0));  // -1 eigenstate
}

TEST_CASE("mirror is an involution") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        const SingleKet in = test_helpers::random_ket(rng, test_helpers::safe_support());
        const SingleKet back = mirror().apply(mirror().apply(in));
        for (const auto& [mode, amp] : in.terms()) {
            CHECK(approx_c(back.amplitude(mode), amp));
        }
    }
}

TEST_CASE("mirror conjugation flips the q-plate axis angle") {
    // mirror . qplate(q, a0) . mirror = qplate(q, -a0)
    const double a0 = 0.42;
    const ElementUnitary lhs = mirror().after(qplate(1.0, a0).after(mirror()));
    const ElementUnitary rhs = qplate(1.0, -a0);
    for (int m = -2; m <= 2; ++m) {
        for (const Mode in : {mode_r(m), mode_l(m)}) {
            const SingleKet x = lhs.apply(ket({{in, 1.0}}));
            const SingleKet y = rhs.apply(ket({{in, 1.0}}));
            CHECK(approx(std::norm(inner(x, y)), 1.0));
            CHECK(approx_c(inner(y, x), 1.0));  // equal including phase
        }
    }
}

TEST_CASE("OAM-flip conjugation flips the q-plate shift sign") {
    // oam_flip . qplate(q, a0) . oam_flip = qplate(-q, -a0)
    const double a0 = 0.37;
    const ElementUnitary lhs = oam_flip().after(qplate(1.0, a0).after(oam_flip()));
    const ElementUnitary rhs = qplate(-1.0, -a0);
    for (int m = -2; m <= 2; ++m) {
        for (const Mode in : {mode_r(m), mode_l(m)}) {
            const SingleKet x = lhs.apply(ket({{in, 1.0}}));
            const SingleKet y = rhs.apply(ket({{in, 1.0}}));
            CHECK(approx_c(inner(y, x), 1.0));
        }
    }
}

TEST_CASE("vector-vortex preparation hits the requested superposition") {
    const SingleKet phi_plus = prepare_vv(kPi / 2, 0.0);
    CHECK(approx_c(phi_plus.amplitude(mode_l(-2)), kInvSqrt2));
    CHECK(approx_c(phi_plus.amplitude(mode_r(2)), kInvSqrt2));

    const SingleKet pole = prepare_vv(0.0, 0.0);
    CHECK(approx_c(pole.amplitude(mode_l(-2)), 1.0));
    CHECK(pole.terms().size() == 1);

    const SingleKet phi_minus = prepare_vv(kPi / 2, kPi);
    CHECK(approx_c(phi_minus.amplitude(mode_l(-2)), kInvSqrt2));
    CHECK(approx_c(phi_minus.amplitude(mode_r(2)), -kInvSqrt2));
}

TEST_CASE("vector-vortex probabilities follow the half-angle law exactly") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> theta_dist(0.01, kPi - 0.01);
    std::uniform_real_distribution<double> psi_dist(0.0, 2 * kPi);
    for (int i = 0; i < 200; ++i) {
        const double theta = theta_dist(rng);
        const SingleKet s = prepare_vv(theta, psi_dist(rng));
        const double c = std::cos(theta / 2), sn = std::sin(theta / 2);
        CHECK(approx(std::norm(s.amplitude(mode_l(-2))), c * c, 1e-14));
        CHECK(approx(std::norm(s.amplitude(mode_r(2))), sn * sn, 1e-14));
    }
}

TEST_CASE("waveplate preparation: circular pump gives a single logical mode") {
    // qwp(45), hwp(0) maps |H,0> to |R,0> ahead of the q-plate
    const SingleKet out = prepare_from_waveplates(kPi / 4, 0.0);
    CHECK(approx(std::norm(out.amplitude(mode_l(-2))), 1.0));
}

TEST_CASE("waveplate preparation: idle waveplates give the balanced state") {
    const SingleKet out = prepare_from_waveplates(0.0, 0.0);
    CHECK(approx_c(out.amplitude(mode_l(-2)), kInvSqrt2));
    CHECK(approx_c(out.amplitude(mode_r(2)), kInvSqrt2));
}

TEST_CASE("waveplate preparation matches the 2x2 matrix-product oracle") {
    // Independent route: multiply the retarder matrices in the linear basis,
    // change into the circular basis, read off the branch probabilities.
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    for (int i = 0; i < 100; ++i) {
        const double qa = angle(rng), ha = angle(rng);

        Eigen::Matrix2cd rot, ret, hm;
        rot << std::cos(qa), -std::sin(qa), std::sin(qa), std::cos(qa);
        ret << 1.0, 0.0, 0.0, Complex(0, 1);
        const Eigen::Matrix2cd qm = rot * ret * rot.transpose();
        hm << std::cos(2 * ha), std::sin(2 * ha), std::sin(2 * ha), -std::cos(2 * ha);

        const Eigen::Vector2cd lin = hm * qm * Eigen::Vector2cd(1.0, 0.0);
        Eigen::Matrix2cd to_circular;  // rows: <R|, <L|; columns: |H>, |V>
        to_circular << kInvSqrt2, Complex(0, -kInvSqrt2), kInvSqrt2, Complex(0, kInvSqrt2);
        const Eigen::Vector2cd circ = to_circular * lin;

        const SingleKet out = prepare_from_waveplates(qa, ha);
        // |R> component converts to |L,-2>, |L> to |R,+2>
        CHECK(approx(std::norm(out.amplitude(mode_l(-2))), std::norm(circ(0)), 1e-12));
        CHECK(approx(std::norm(out.amplitude(mode_r(2))), std::norm(circ(1)), 1e-12));
    }
}

TEST_CASE("analysis chain with q-plate projects a logical basis state") {
    const ProjectorChain chain =
        analysis_projector(kPi / 4, 0.0, LinearFilter::H, true);
    CHECK(approx(chain.probability(ket({{mode_l(-2), 1.0}})), 1.0));
    CHECK(approx(chain.probability(ket({{mode_r(2), 1.0}})), 0.0));
    CHECK(approx(chain.probability(prepare_vv(kPi / 2, 0.0)), 0.5));
}

TEST_CASE("analysis chain without q-plate is a polarization projector") {
    const ProjectorChain chain = analysis_projector(0.0, 0.0, LinearFilter::H, false);
    CHECK(approx(chain.probability(parse_state_label("H:0")), 1.0));
    CHECK(approx(chain.probability(parse_state_label("V:0")), 0.0));
    CHECK(approx(chain.probability(parse_state_label("H:2")), 1.0));  // OAM untouched
}

TEST_CASE("analysis settings table projects each canonical state") {
    auto pol_state = [](char s) -> SingleKet {
        const Complex half(0.5, 0), ih(0, 0.5);
        switch (s) {
            case 'H': return parse_state_label("H:0");
            case 'V': return parse_state_label("V:0");
            case 'R': return parse_state_label("R:0");
            case 'L': return parse_state_label("L:0");
            case 'D': return ket({{mode_r(0), half - ih}, {mode_l(0), half + ih}});
            default: return ket({{mode_r(0), half + ih}, {mode_l(0), half - ih}});  // 'A'
        }
    };
    for (char s : {'H', 'V', 'D', 'A', 'R', 'L'}) {
        const WaveplateSetting w = analysis_setting_for(s);
        const ProjectorChain chain = analysis_projector(w.qwp_deg * kPi / 180,
                                                        w.hwp_deg * kPi / 180, LinearFilter::H,
                                                        false);
        CHECK(approx(chain.probability(pol_state(s)), 1.0, 1e-12));
        // and it rejects the orthogonal partner
        const char partner = (s == 'H')   ? 'V'
                             : (s == 'V') ? 'H'
                             : (s == 'D') ? 'A'
                             : (s == 'A') ? 'D'
                             : (s == 'R') ? 'L'
                                          : 'R';
        CHECK(approx(chain.probability(pol_state(partner)), 0.0, 1e-12));
    }
}

TEST_CASE("element chain grammar parses and composes in beam order") {
    const ParsedChain chain = parse_element_chain("qwp(45) | hwp(0) | qplate(q=1, a0=0) | pbs(H)");
    CHECK(chain.elements.size() == 3);
    REQUIRE(chain.filter.has_value());
    CHECK(*chain.filter == LinearFilter::H);

    SingleKet state = parse_state_label("H:0");
    for (const auto& e : chain.elements) state = e.apply(state);
    CHECK(approx(std::norm(state.amplitude(mode_l(-2))), 1.0));
}

TEST_CASE("element chain grammar rejects malformed input") {
    CHECK_THROWS_AS(parse_element_chain("pbs(H) | qwp(0)"), ParseError);
    CHECK_THROWS_AS(parse_element_chain("spiral(1)"), ParseError);
    CHECK_THROWS_AS(parse_element_chain("qwp(abc)"), ParseError);
    CHECK_THROWS_AS(parse_element_chain("qwp(45) |"), ParseError);
    CHECK_THROWS_AS(parse_element_chain("qplate(w=1)"), ParseError);
    CHECK_THROWS_AS(parse_element_chain("pbs(Q)"), ParseError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_helpers.hpp"
#include "vvsim/modes.hpp"

using namespace vvsim;
using test_helpers::approx;
using test_helpers::approx_c;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("ket from a single basis element") {
    const SingleKet k = ket({{mode_r(2), 1.0}});
    CHECK(k.terms().size() == 1);
    CHECK(approx_c(k.amplitude(mode_r(2)), 1.0));
    CHECK(approx(k.norm(), 1.0));
}

TEST_CASE("ket normalizes the equal superposition") {
    const SingleKet k = ket({{mode_l(-2), 1.0}, {mode_r(2), 1.0}});
    CHECK(approx_c(k.amplitude(mode_l(-2)), kInvSqrt2));
    CHECK(approx_c(k.amplitude(mode_r(2)), kInvSqrt2));
    CHECK(approx(k.prenorm(), std::sqrt(2.0)));
}

TEST_CASE("out-of-truncation mode is rejected") {
    CHECK_THROWS_AS(ket({{mode_r(5), 1.0}}), TruncationError);
    CHECK_THROWS_AS(ket({{mode_l(-7), 1.0}}, 6), TruncationError);
    CHECK_NOTHROW(ket({{mode_r(5), 1.0}}, 6));
}

TEST_CASE("all-zero amplitudes are rejected") {
    CHECK_THROWS_AS(ket({{mode_r(0), 0.0}}), ZeroVectorError);
    CHECK_THROWS_AS(ket(std::vector<SingleKet::Term>{}), ZeroVectorError);
    // opposite amplitudes on the same mode cancel
    CHECK_THROWS_AS(ket({{mode_r(0), 1.0}, {mode_r(0), -1.0}}), ZeroVectorError);
}

TEST_CASE("tiny amplitudes are pruned") {
    const SingleKet k = ket({{mode_r(0), 1.0}, {mode_l(0), 1e-16}});
    CHECK(k.terms().size() == 1);
    for (const auto& [mode, amp] : k.terms()) CHECK(std::abs(amp) >= kAmplitudePrune);
}

TEST_CASE("term order is canonical: R before L, ascending OAM") {
    const SingleKet k =
        ket({{mode_l(2), 0.5}, {mode_r(-1), 0.5}, {mode_l(-3), 0.5}, {mode_r(3), 0.5}});
    const auto& t = k.terms();
    REQUIRE(t.size() == 4);
    CHECK(t[0].first == mode_r(-1));
    CHECK(t[1].first == mode_r(3));
    CHECK(t[2].first == mode_l(-3));
    CHECK(t[3].first == mode_l(2));
}

TEST_CASE("normalize is idempotent") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const SingleKet k = test_helpers::random_ket(rng, test_helpers::safe_support());
        const SingleKet again = SingleKet::from_amplitudes(k.terms());
        CHECK(k.identical_to(again));
    }
}

TEST_CASE("inner product on basis states") {
    const SingleKet r2 = ket({{mode_r(2), 1.0}});
    const SingleKet l2 = ket({{mode_l(-2), 1.0}});
    CHECK(approx_c(inner(r2, r2), 1.0));
    CHECK(approx_c(inner(r2, l2), 0.0));

    const SingleKet phi_plus = ket({{mode_l(-2), 1.0}, {mode_r(2), 1.0}});
    CHECK(approx_c(inner(phi_plus, r2), kInvSqrt2));
}

TEST_CASE("inner product is conjugate symmetric") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 1000; ++i) {
        const SingleKet a = test_helpers::random_ket(rng, test_helpers::safe_support());
        const SingleKet b = test_helpers::random_ket(rng, test_helpers::safe_support());
        CHECK(approx_c(inner(a, b), std::conj(inner(b, a))));
        CHECK(std::abs(inner(a, b)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("inner product across truncations is rejected") {
    const SingleKet a = ket({{mode_r(0), 1.0}}, 4);
    const SingleKet b = ket({{mode_r(0), 1.0}}, 6);
    CHECK_THROWS_AS(inner(a, b), DimensionError);
}

TEST_CASE("logical projection of the maximally entangled state") {
    const SingleKet phi_plus = ket({{mode_l(-2), 1.0}, {mode_r(2), 1.0}});
    const LogicalProjection p = to_logical(phi_plus, LogicalQubitMap::hybrid());
    CHECK(approx_c(p.amp0, kInvSqrt2));
    CHECK(approx_c(p.amp1, kInvSqrt2));
    CHECK(approx(p.leakage, 0.0));
}

TEST_CASE("logical projection of a basis state") {
    const LogicalProjection p =
        to_logical(ket({{mode_l(-2), 1.0}}), LogicalQubitMap::hybrid());
    CHECK(approx_c(p.amp0, 1.0));
    CHECK(approx_c(p.amp1, 0.0));
    CHECK(approx(p.leakage, 0.0));
}

TEST_CASE("logical projection reports leakage outside the span") {
    const SingleKet k = ket({{mode_l(-2), 1.0}, {mode_l(0), 1.0}});
    const LogicalProjection p = to_logical(k, LogicalQubitMap::hybrid());
    CHECK(approx_c(p.amp0, 1.0));
    CHECK(approx_c(p.amp1, 0.0));
    CHECK(approx(p.leakage, 0.5));
}

TEST_CASE("full leakage raises a degenerate projection error") {
    const SingleKet k = ket({{mode_r(0), 1.0}});
    CHECK_THROWS_AS(to_logical(k, LogicalQubitMap::hybrid()), DegenerateProjectionError);
}

TEST_CASE("leakage and projected weight sum to one") {
    std::mt19937_64 rng(13);
    const LogicalQubitMap map = LogicalQubitMap::hybrid();
    for (int i = 0; i < 500; ++i) {
        const SingleKet k = test_helpers::random_ket(rng, test_helpers::safe_support());
        double weight = std::norm(k.amplitude(map.basis0)) + std::norm(k.amplitude(map.basis1));
        if (weight < 1e-12) continue;
        const LogicalProjection p = to_logical(k, map);
        CHECK(approx(p.leakage + weight, 1.0));
        CHECK(approx(std::norm(p.amp0) + std::norm(p.amp1), 1.0));
    }
}

TEST_CASE("logical qubit map rejects identical basis states") {
    CHECK_THROWS_AS(LogicalQubitMap(mode_r(2), mode_r(2)), ParameterError);
}

TEST_CASE("mode labels round-trip") {
    CHECK(mode_label(mode_r(2)) == "R:+2");
    CHECK(mode_label(mode_l(-2)) == "L:-2");
    CHECK(mode_label(mode_r(0)) == "R:+0");

    const SingleKet r = parse_state_label("R:+2");
    CHECK(approx_c(r.amplitude(mode_r(2)), 1.0));
    const SingleKet l = parse_state_label("L:-2");
    CHECK(approx_c(l.amplitude(mode_l(-2)), 1.0));
}

TEST_CASE("linear labels expand with the fixed circular convention") {
    const SingleKet h = parse_state_label("H:0");
    CHECK(approx_c(h.amplitude(mode_r(0)), kInvSqrt2));
    CHECK(approx_c(h.amplitude(mode_l(0)), kInvSqrt2));

    const SingleKet v = parse_state_label("V:0");
    CHECK(approx_c(v.amplitude(mode_r(0)), Complex(0, -kInvSqrt2)));
    CHECK(approx_c(v.amplitude(mode_l(0)), Complex(0, kInvSqrt2)));
    CHECK(approx_c(inner(h, v), 0.0));
}

TEST_CASE("bad labels raise parse errors") {
    CHECK_THROWS_AS(parse_state_label("R"), ParseError);
    CHECK_THROWS_AS(parse_state_label("X:0"), ParseError);
    CHECK_THROWS_AS(parse_state_label("R:zz"), ParseError);
    CHECK_THROWS_AS(parse_state_label("R:+2extra"), ParseError);
}

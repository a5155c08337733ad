#include "vvsim/elements.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <Eigen/Dense>

namespace vvsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Change of basis from circular coordinates to linear ones:
// columns are |R>, |L> expressed in (H, V).
Eigen::Matrix2cd circular_to_linear() {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd a;
    a << Complex(s, 0), Complex(s, 0), Complex(0, s), Complex(0, -s);
    return a;
}

// Builds the OAM-diagonal element from a 2x2 polarization matrix given in the
// linear basis.
ElementUnitary pol_element(const std::string& name, const Eigen::Matrix2cd& linear_matrix,
                           int oam_cutoff) {
    const Eigen::Matrix2cd a = circular_to_linear();
    const Eigen::Matrix2cd circ = a.adjoint() * linear_matrix * a;  // indices: 0 = R, 1 = L

    std::vector<ElementUnitary::Column> columns;
    for (int m = -oam_cutoff; m <= oam_cutoff; ++m) {
        for (int in = 0; in < 2; ++in) {
            const Mode in_mode{in == 0 ? Pol::R : Pol::L, m};
            std::vector<ElementUnitary::Entry> entries;
            for (int out = 0; out < 2; ++out) {
                const Complex amp = circ(out, in);
                if (std::abs(amp) < kAmplitudePrune) continue;
                entries.push_back({Mode{out == 0 ? Pol::R : Pol::L, m}, amp});
            }
            columns.push_back({in_mode, std::move(entries)});
        }
    }
    return ElementUnitary(name, std::move(columns), oam_cutoff);
}

}  // namespace

ElementUnitary::ElementUnitary(std::string name, std::vector<Column> columns, int oam_cutoff)
    : name_(std::move(name)), columns_(std::move(columns)), oam_cutoff_(oam_cutoff) {
    std::sort(columns_.begin(), columns_.end(),
              [](const Column& x, const Column& y) { return x.in < y.in; });
}

bool ElementUnitary::has_column(const Mode& in) const {
    auto it = std::lower_bound(columns_.begin(), columns_.end(), in,
                               [](const Column& c, const Mode& m) { return c.in < m; });
    return it != columns_.end() && it->in == in;
}

Complex ElementUnitary::entry(const Mode& out, const Mode& in) const {
    auto it = std::lower_bound(columns_.begin(), columns_.end(), in,
                               [](const Column& c, const Mode& m) { return c.in < m; });
    if (it == columns_.end() || !(it->in == in)) return Complex(0, 0);
    for (const auto& e : it->entries) {
        if (e.out == out) return e.amp;
    }
    return Complex(0, 0);
}

SingleKet ElementUnitary::apply(const SingleKet& state) const {
    if (state.oam_cutoff() != oam_cutoff_) {
        throw DimensionError("element and state use different OAM truncations");
    }
    std::map<Mode, Complex> out;
    for (const auto& [mode, amp] : state.terms()) {
        auto it = std::lower_bound(columns_.begin(), columns_.end(), mode,
                                   [](const Column& c, const Mode& m) { return c.in < m; });
        if (it == columns_.end() || !(it->in == mode)) {
            throw TruncationError(name_ + " maps " + mode_label(mode) +
                                  " outside the truncated mode space");
        }
        for (const auto& e : it->entries) out[e.out] += amp * e.amp;
    }
    std::vector<SingleKet::Term> terms(out.begin(), out.end());
    return SingleKet::from_amplitudes(std::move(terms), oam_cutoff_);
}

ElementUnitary ElementUnitary::after(const ElementUnitary& other) const {
    if (other.oam_cutoff_ != oam_cutoff_) {
        throw DimensionError("composing elements over different truncations");
    }
    std::vector<Column> columns;
    for (const auto& col : other.columns_) {
        std::map<Mode, Complex> acc;
        bool in_range = true;
        for (const auto& e : col.entries) {
            auto it = std::lower_bound(columns_.begin(), columns_.end(), e.out,
                                       [](const Column& c, const Mode& m) { return c.in < m; });
            if (it == columns_.end() || !(it->in == e.out)) {
                in_range = false;  // image leaves truncation; drop the whole column
                break;
            }
            for (const auto& e2 : it->entries) acc[e2.out] += e.amp * e2.amp;
        }
        if (!in_range) continue;
        std::vector<Entry> entries;
        for (const auto& [m, amp] : acc) {
            if (std::abs(amp) >= kAmplitudePrune) entries.push_back({m, amp});
        }
        columns.push_back({col.in, std::move(entries)});
    }
    return ElementUnitary(name_ + "*" + other.name_, std::move(columns), oam_cutoff_);
}

double ElementUnitary::unitarity_defect() const {
    double worst = 0.0;
    for (const auto& ci : columns_) {
        for (const auto& cj : columns_) {
            Complex dot(0, 0);
            for (const auto& ei : ci.entries) {
                for (const auto& ej : cj.entries) {
                    if (ei.out == ej.out) dot += std::conj(ei.amp) * ej.amp;
                }
            }
            const Complex expect = (ci.in == cj.in) ? Complex(1, 0) : Complex(0, 0);
            worst = std::max(worst, std::abs(dot - expect));
        }
    }
    return worst;
}

ElementUnitary qplate(double q, double alpha0, int oam_cutoff) {
    const double two_q = 2.0 * q;
    const double rounded = std::round(two_q);
    if (std::abs(two_q - rounded) > 1e-9) {
        throw ParameterError("q-plate charge must be a half-integer");
    }
    const int shift = static_cast<int>(rounded);
    const Complex phase_r = std::exp(Complex(0, 1) * (two_q * alpha0));

    std::vector<ElementUnitary::Column> columns;
    for (int m = -oam_cutoff; m <= oam_cutoff; ++m) {
        // |R,m> -> e^{+i 2q a0} |L, m-2q>
        if (std::abs(m - shift) <= oam_cutoff) {
            columns.push_back({mode_r(m), {{mode_l(m - shift), phase_r}}});
        }
        // |L,m> -> e^{-i 2q a0} |R, m+2q>
        if (std::abs(m + shift) <= oam_cutoff) {
            columns.push_back({mode_l(m), {{mode_r(m + shift), std::conj(phase_r)}}});
        }
    }
    return ElementUnitary("qplate", std::move(columns), oam_cutoff);
}

ElementUnitary hwp(double theta, int oam_cutoff) {
    const double c = std::cos(2.0 * theta);
    const double s = std::sin(2.0 * theta);
    Eigen::Matrix2cd linear;
    linear << c, s, s, -c;
    return pol_element("hwp", linear, oam_cutoff);
}

ElementUnitary qwp(double theta, int oam_cutoff) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2cd rot, ret;
    rot << c, -s, s, c;
    ret << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 1);
    const Eigen::Matrix2cd linear = rot * ret * rot.transpose();
    return pol_element("qwp", linear, oam_cutoff);
}

ElementUnitary mirror(int oam_cutoff) {
    std::vector<ElementUnitary::Column> columns;
    for (int m = -oam_cutoff; m <= oam_cutoff; ++m) {
        columns.push_back({mode_r(m), {{mode_l(-m), Complex(1, 0)}}});
        columns.push_back({mode_l(m), {{mode_r(-m), Complex(1, 0)}}});
    }
    return ElementUnitary("mirror", std::move(columns), oam_cutoff);
}

ElementUnitary identity_element(int oam_cutoff) {
    std::vector<ElementUnitary::Column> columns;
    for (int m = -oam_cutoff; m <= oam_cutoff; ++m) {
        columns.push_back({mode_r(m), {{mode_r(m), Complex(1, 0)}}});
        columns.push_back({mode_l(m), {{mode_l(m), Complex(1, 0)}}});
    }
    return ElementUnitary("id", std::move(columns), oam_cutoff);
}

SingleKet prepare_vv(double theta, double psi, int oam_cutoff) {
    if (theta < -1e-12 || theta > kPi + 1e-12) {
        throw ParameterError("vv preparation needs theta in [0, pi]");
    }
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    std::vector<SingleKet::Term> terms;
    if (std::abs(c) >= kAmplitudePrune) terms.emplace_back(mode_l(-2), Complex(c, 0));
    if (std::abs(s) >= kAmplitudePrune) {
        terms.emplace_back(mode_r(2), std::exp(Complex(0, 1) * psi) * s);
    }
    return SingleKet::from_amplitudes(std::move(terms), oam_cutoff);
}

SingleKet prepare_from_waveplates(double qwp_angle, double hwp_angle, int oam_cutoff) {
    const SingleKet input = parse_state_label("H:0", oam_cutoff);
    return qplate(1.0, 0.0, oam_cutoff).apply(hwp(hwp_angle, oam_cutoff).apply(
        qwp(qwp_angle, oam_cutoff).apply(input)));
}

std::vector<std::pair<int, Complex>> ProjectorChain::filtered_terms(const SingleKet& state) const {
    SingleKet current = state;
    for (const auto& element : elements) current = element.apply(current);

    // Project onto the filter polarization, keeping the OAM structure.
    // <H|R> = <H|L> = 1/sqrt(2); with |V> = (|R> - |L>)/(i sqrt(2)),
    // <V|R> = +i/sqrt(2) and <V|L> = -i/sqrt(2).
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::map<int, Complex> by_oam;
    for (const auto& [mode, amp] : current.terms()) {
        Complex bra;
        if (filter == LinearFilter::H) {
            bra = Complex(inv_sqrt2, 0);
        } else {
            bra = (mode.pol == Pol::R) ? Complex(0, inv_sqrt2) : Complex(0, -inv_sqrt2);
        }
        by_oam[mode.oam] += bra * amp;
    }

    std::vector<std::pair<int, Complex>> detected;
    for (const auto& [m, amp] : by_oam) {
        if (fiber_coupled && m != 0) continue;
        if (std::abs(amp) < kAmplitudePrune) continue;
        detected.emplace_back(m, amp);
    }
    return detected;
}

double ProjectorChain::probability(const SingleKet& state) const {
    double p = 0.0;
    for (const auto& [m, amp] : filtered_terms(state)) p += std::norm(amp);
    return p;
}

ProjectorChain analysis_projector(double pol_qwp, double pol_hwp, LinearFilter filter,
                                  bool with_qplate, int oam_cutoff) {
    ProjectorChain chain;
    if (with_qplate) chain.elements.push_back(qplate(1.0, 0.0, oam_cutoff));
    chain.elements.push_back(qwp(pol_qwp, oam_cutoff));
    chain.elements.push_back(hwp(pol_hwp, oam_cutoff));
    chain.filter = filter;
    chain.fiber_coupled = with_qplate;
    return chain;
}

WaveplateSetting analysis_setting_for(char pol_state) {
    switch (pol_state) {
        case 'H': return {0.0, 0.0};
        case 'V': return {0.0, 45.0};
        case 'D': return {45.0, 22.5};
        case 'A': return {45.0, -22.5};
        case 'R': return {45.0, 0.0};
        case 'L': return {45.0, 45.0};
        default: throw ParameterError("unknown polarization analysis state");
    }
}

namespace {

struct ChainLexer {
    const std::string& text;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    void advance(size_t n) {
        for (size_t i = 0; i < n && pos < text.size(); ++i, ++pos) {
            if (text[pos] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    }
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) advance(1);
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
};

}  // namespace

ParsedChain parse_element_chain(const std::string& text, int oam_cutoff) {
    ParsedChain result;
    ChainLexer lex{text};

    bool expect_element = true;
    while (!lex.eof()) {
        if (!expect_element) {
            if (text[lex.pos] != '|') {
                throw ParseError("expected '|' between elements", lex.line, lex.col);
            }
            lex.advance(1);
            expect_element = true;
            continue;
        }
        if (result.filter.has_value()) {
            throw ParseError("pbs must be the last element of a chain", lex.line, lex.col);
        }

        // read identifier
        size_t start = lex.pos;
        while (lex.pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[lex.pos])) || text[lex.pos] == '_')) {
            lex.advance(1);
        }
        const std::string word = text.substr(start, lex.pos - start);
        lex.skip_ws();
        if (lex.pos >= text.size() || text[lex.pos] != '(') {
            throw ParseError("expected '(' after element name '" + word + "'", lex.line, lex.col);
        }
        lex.advance(1);
        size_t arg_start = lex.pos;
        int depth = 1;
        while (lex.pos < text.size() && depth > 0) {
            if (text[lex.pos] == '(') ++depth;
            if (text[lex.pos] == ')') --depth;
            if (depth > 0) lex.advance(1);
        }
        if (depth != 0) throw ParseError("unterminated element argument list", lex.line, lex.col);
        std::string args = text.substr(arg_start, lex.pos - arg_start);
        lex.advance(1);  // closing paren

        auto parse_double = [&](const std::string& s) {
            try {
                size_t used = 0;
                double v = std::stod(s, &used);
                while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
                if (used != s.size()) throw std::invalid_argument("trailing");
                return v;
            } catch (const std::exception&) {
                throw ParseError("bad numeric argument '" + s + "'", lex.line, lex.col);
            }
        };

        const double deg_to_rad = kPi / 180.0;
        if (word == "qwp") {
            result.elements.push_back(qwp(parse_double(args) * deg_to_rad, oam_cutoff));
        } else if (word == "hwp") {
            result.elements.push_back(hwp(parse_double(args) * deg_to_rad, oam_cutoff));
        } else if (word == "qplate") {
            double q = 1.0, a0 = 0.0;
            size_t at = 0;
            while (at < args.size()) {
                size_t comma = args.find(',', at);
                std::string kv = args.substr(at, comma == std::string::npos ? comma : comma - at);
                at = comma == std::string::npos ? args.size() : comma + 1;
                size_t eq = kv.find('=');
                if (eq == std::string::npos) {
                    throw ParseError("qplate needs q=<val>, a0=<deg>", lex.line, lex.col);
                }
                std::string key = kv.substr(0, eq);
                key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
                const double value = parse_double(kv.substr(eq + 1));
                if (key == "q") {
                    q = value;
                } else if (key == "a0") {
                    a0 = value * deg_to_rad;
                } else {
                    throw ParseError("unknown qplate parameter '" + key + "'", lex.line, lex.col);
                }
            }
            result.elements.push_back(qplate(q, a0, oam_cutoff));
        } else if (word == "pbs") {
            std::string arg = args;
            arg.erase(std::remove_if(arg.begin(), arg.end(), ::isspace), arg.end());
            if (arg == "H") {
                result.filter = LinearFilter::H;
            } else if (arg == "V") {
                result.filter = LinearFilter::V;
            } else {
                throw ParseError("pbs filter must be H or V", lex.line, lex.col);
            }
        } else {
            throw ParseError("unknown element '" + word + "'", lex.line, lex.col);
        }
        expect_element = false;
    }
    if (expect_element && !result.elements.empty()) {
        throw ParseError("dangling '|' at end of chain");
    }
    return result;
}

}  // namespace vvsim

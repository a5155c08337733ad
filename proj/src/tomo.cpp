#include "vvsim/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "vvsim/elements.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vvsim {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct OutcomeSpec {
    char pauli;    // 'X', 'Y', 'Z'
    int sign;      // +1 / -1
    char target;   // canonical polarization state to project onto
};

// Polarization analysis targets per logical qubit kind. The hybrid qubit
// |0> = |L,-2>, |1> = |R,+2> converts through the q-plate to R/L at m = 0;
// the intra polarization qubit uses |0> = |L>, |1> = |R> directly.
const OutcomeSpec kHybridOutcomes[6] = {
    {'X', +1, 'H'}, {'X', -1, 'V'}, {'Y', +1, 'D'},
    {'Y', -1, 'A'}, {'Z', +1, 'R'}, {'Z', -1, 'L'},
};
const OutcomeSpec kPolOutcomes[6] = {
    {'X', +1, 'H'}, {'X', -1, 'V'}, {'Y', +1, 'A'},
    {'Y', -1, 'D'}, {'Z', +1, 'L'}, {'Z', -1, 'R'},
};

// Single-beam analysis amplitude of `state` through [qwp, hwp, PBS(H)] with an
// optional leading q-plate and final fiber coupling.
Complex chain_amplitude(const ProjectorChain& chain, const SingleKet& state, double scale) {
    Complex total(0, 0);
    for (const auto& [m, amp] : chain.filtered_terms(state)) {
        if (m == 0) total += amp;  // fiber coupling keeps the fundamental mode
    }
    return scale * total;
}

// Effective detection amplitudes e_k over the hybrid logical basis for one
// output beam: e_k = <SMF,H| hwp qwp qplate |b_k>.
Eigen::Vector2cd hybrid_bra(char target, int oam_cutoff) {
    const WaveplateSetting w = analysis_setting_for(target);
    const ProjectorChain chain = analysis_projector(w.qwp_deg * kDegToRad, w.hwp_deg * kDegToRad,
                                                    LinearFilter::H, true, oam_cutoff);
    const LogicalQubitMap map = LogicalQubitMap::hybrid();
    Eigen::Vector2cd e;
    e(0) = chain_amplitude(chain, ket({{map.basis0, 1.0}}, oam_cutoff), 1.0);
    e(1) = chain_amplitude(chain, ket({{map.basis1, 1.0}}, oam_cutoff), 1.0);
    return e;
}

Eigen::Matrix2cd rank_one(const Eigen::Vector2cd& e) { return e.conjugate() * e.transpose(); }

Eigen::Matrix4cd kron4(const Eigen::Matrix2cd& x, const Eigen::Matrix2cd& y) {
    Eigen::Matrix4cd z;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) z.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
    }
    return z;
}

// Intra cascade: polarization stage [qwp,hwp,PBS(H)] followed by the OAM stage
// [qplate,qwp,hwp,PBS(H),SMF]; returns the effective detection amplitude for
// one physical basis state.
Complex intra_amplitude(const Mode& basis_mode, char pol_target, char oam_target,
                        int oam_cutoff) {
    const WaveplateSetting wp = analysis_setting_for(pol_target);
    ProjectorChain stage1;
    stage1.elements.push_back(qwp(wp.qwp_deg * kDegToRad, oam_cutoff));
    stage1.elements.push_back(hwp(wp.hwp_deg * kDegToRad, oam_cutoff));
    stage1.filter = LinearFilter::H;
    stage1.fiber_coupled = false;

    const auto stage1_terms = stage1.filtered_terms(ket({{basis_mode, 1.0}}, oam_cutoff));
    if (stage1_terms.empty()) return Complex(0, 0);

    // Photon continues H-polarized with the surviving OAM amplitudes.
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<SingleKet::Term> continue_terms;
    for (const auto& [m, amp] : stage1_terms) {
        continue_terms.emplace_back(mode_r(m), amp * inv_sqrt2);
        continue_terms.emplace_back(mode_l(m), amp * inv_sqrt2);
    }
    double norm_sq = 0.0;
    for (const auto& [mode, amp] : continue_terms) norm_sq += std::norm(amp);
    if (norm_sq < 1e-28) return Complex(0, 0);
    const SingleKet survivor = SingleKet::from_amplitudes(std::move(continue_terms), oam_cutoff);

    const WaveplateSetting wo = analysis_setting_for(oam_target);
    const ProjectorChain stage2 = analysis_projector(
        wo.qwp_deg * kDegToRad, wo.hwp_deg * kDegToRad, LinearFilter::H, true, oam_cutoff);
    return chain_amplitude(stage2, survivor, survivor.prenorm());
}

std::string setting_label(const OutcomeSpec& q1, const OutcomeSpec& q2) {
    std::string label;
    label += q1.pauli;
    label += q2.pauli;
    label += ':';
    label += (q1.sign > 0 ? '+' : '-');
    label += (q2.sign > 0 ? '+' : '-');
    return label;
}

}  // namespace

MeasurementSet build_measurements(Scheme scheme, int oam_cutoff) {
    MeasurementSet set;
    set.scheme = scheme;

    const char paulis[3] = {'X', 'Y', 'Z'};
    const OutcomeSpec* q1_table = (scheme == Scheme::inter) ? kHybridOutcomes : kPolOutcomes;
    const OutcomeSpec* q2_table = kHybridOutcomes;  // OAM stage converts like the hybrid qubit

    int basis_index = 0;
    for (char p1 : paulis) {
        for (char p2 : paulis) {
            std::vector<MeasurementSetting> group;
            Eigen::Matrix4cd group_sum = Eigen::Matrix4cd::Zero();
            for (int o1 = 0; o1 < 6; ++o1) {
                if (q1_table[o1].pauli != p1) continue;
                for (int o2 = 0; o2 < 6; ++o2) {
                    if (q2_table[o2].pauli != p2) continue;

                    Eigen::Matrix4cd projector;
                    if (scheme == Scheme::inter) {
                        const Eigen::Vector2cd ec = hybrid_bra(q1_table[o1].target, oam_cutoff);
                        const Eigen::Vector2cd ed = hybrid_bra(q2_table[o2].target, oam_cutoff);
                        projector = kron4(rank_one(ec), rank_one(ed));
                    } else {
                        Eigen::Vector4cd e;
                        int k = 0;
                        for (Pol pol : {Pol::L, Pol::R}) {
                            for (int m : {-2, 2}) {
                                e(k++) = intra_amplitude(Mode{pol, m}, q1_table[o1].target,
                                                         q2_table[o2].target, oam_cutoff);
                            }
                        }
                        projector = e.conjugate() * e.transpose();
                    }
                    group.push_back({setting_label(q1_table[o1], q2_table[o2]), basis_index,
                                     projector});
                    group_sum += projector;
                }
            }

            // Strip the uniform conversion loss so each basis resolves the
            // identity on the logical span.
            const double scale = group_sum.trace().real() / 4.0;
            if (scale < 1e-12 ||
                (group_sum / scale - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
                throw CompletenessError("analysis basis does not resolve the identity");
            }
            for (auto& s : group) {
                s.projector /= scale;
                set.settings.push_back(std::move(s));
            }
            ++basis_index;
        }
    }
    return set;
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, const MeasurementSet& set,
                                         const CountSimulationParams& params,
                                         std::uint64_t rng_seed) {
    if (params.mean_total <= 0.0) throw ParameterError("mean_total must be positive");
    if (params.time_s <= 0.0) throw ParameterError("acquisition time must be positive");
    if (rho.dim() != 4) throw DimensionError("tomography expects a two-qubit state");

    std::mt19937_64 rng(rng_seed);
    std::vector<CountRecord> records;
    records.reserve(set.settings.size());
    for (const auto& s : set.settings) {
        const double p = std::max(0.0, (rho.matrix() * s.projector).trace().real());
        const double mean = params.mean_total * p + params.background_rate * params.time_s;
        double counts = mean;
        if (!params.exact) {
            std::poisson_distribution<long long> poisson(mean);
            counts = mean > 0.0 ? static_cast<double>(poisson(rng)) : 0.0;
        }
        records.push_back({s.label, counts, params.time_s, params.background_rate, params.exact,
                           "raw"});
    }
    return records;
}

std::vector<CountRecord> subtract_background(const std::vector<CountRecord>& records,
                                             BackgroundMode mode) {
    std::vector<CountRecord> out = records;
    for (auto& r : out) {
        r.counts = std::max(0.0, r.counts - r.background * r.time_s);
        r.provenance = (mode == BackgroundMode::dark) ? "dark-subtracted" : "accidental-subtracted";
    }
    return out;
}

namespace {

// Per-basis-group frequencies matched to the settings of `set` in order.
std::vector<double> frequencies(const std::vector<CountRecord>& records,
                                const MeasurementSet& set) {
    if (records.size() != set.settings.size()) {
        throw DimensionError("count records do not match the measurement set");
    }
    std::map<int, double> group_totals;
    for (size_t i = 0; i < records.size(); ++i) {
        group_totals[set.settings[i].basis_index] += records[i].counts;
    }
    std::vector<double> f(records.size(), 0.0);
    for (size_t i = 0; i < records.size(); ++i) {
        const double total = group_totals[set.settings[i].basis_index];
        f[i] = total > 0.0 ? records[i].counts / total : 0.0;
    }
    return f;
}

// Orthonormal Hermitian operator basis sigma_i (x) sigma_j / 2 (sigma_0 = I).
Eigen::Matrix2cd pauli_ext(int i) {
    Eigen::Matrix2cd m;
    switch (i) {
        case 0: m = Eigen::Matrix2cd::Identity(); break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0); break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

Eigen::Matrix4cd hermitian_basis(int k) {
    Eigen::Matrix4cd b;
    const Eigen::Matrix2cd x = pauli_ext(k / 4);
    const Eigen::Matrix2cd y = pauli_ext(k % 4);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) b.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
    }
    return b / 2.0;
}

}  // namespace

LinearInversionResult linear_inversion(const std::vector<CountRecord>& records,
                                       const MeasurementSet& set) {
    const std::vector<double> f = frequencies(records, set);
    const int n = static_cast<int>(set.settings.size());

    Eigen::MatrixXd design(n, 16);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 16; ++k) {
            design(i, k) = (set.settings[i].projector * hermitian_basis(k)).trace().real();
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 16) throw CompletenessError("measurement set is not informationally complete");

    const Eigen::VectorXd theta = qr.solve(Eigen::Map<const Eigen::VectorXd>(f.data(), n));
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 16; ++k) rho += theta(k) * hermitian_basis(k);
    rho = (rho + rho.adjoint().eval()) / 2.0;
    const double trace = rho.trace().real();
    if (std::abs(trace) > 1e-12) rho /= trace;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
    return {rho, es.eigenvalues().minCoeff()};
}

MleResult mle_reconstruct(const std::vector<CountRecord>& records, const MeasurementSet& set,
                          double tol, int max_iter) {
    if (records.size() != set.settings.size()) {
        throw DimensionError("count records do not match the measurement set");
    }
    const int n = static_cast<int>(set.settings.size());
    const double n_bases = static_cast<double>(set.n_bases());

    double total = 0.0;
    for (const auto& r : records) {
        if (r.counts < 0.0) throw ParameterError("negative counts");
        total += r.counts;
    }
    if (total <= 0.0) {
        return MleResult{DensityMatrix::maximally_mixed(4), false, 0, 0.0, {}};
    }

    // POVM elements E_i = P_i / n_bases resolve the identity.
    std::vector<Eigen::Matrix4cd> povm(n);
    for (int i = 0; i < n; ++i) povm[i] = set.settings[i].projector / n_bases;

    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Identity() / 4.0;
    auto log_likelihood = [&](const Eigen::Matrix4cd& state) {
        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
            if (records[i].counts <= 0.0) continue;
            const double p = std::max(1e-18, (state * povm[i]).trace().real());
            ll += records[i].counts * std::log(p);
        }
        return ll;
    };

    double ll = log_likelihood(rho);
    MleResult result{DensityMatrix::maximally_mixed(4), false, 0, ll, {ll}};

    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::Matrix4cd r_op = Eigen::Matrix4cd::Zero();
        for (int i = 0; i < n; ++i) {
            if (records[i].counts <= 0.0) continue;
            const double p = std::max(1e-18, (rho * povm[i]).trace().real());
            r_op += (records[i].counts / (total * p)) * povm[i];
        }

        double epsilon = 0.5;
        Eigen::Matrix4cd candidate;
        double ll_new = ll;
        bool stepped = false;
        for (int halvings = 0; halvings < 64; ++halvings) {
            const Eigen::Matrix4cd grow =
                Eigen::Matrix4cd::Identity() + epsilon * r_op;
            candidate = grow * rho * grow.adjoint();
            candidate /= candidate.trace().real();
            candidate = (candidate + candidate.adjoint().eval()) / 2.0;
            ll_new = log_likelihood(candidate);
            if (ll_new >= ll) {
                stepped = true;
                break;
            }
            epsilon /= 2.0;
        }
        if (!stepped) {  // no monotone step available at any dilution: stationary point
            result.converged = true;
            break;
        }

        rho = candidate;
        result.iterations = iter + 1;
        result.log_likelihood_trace.push_back(ll_new);
        const double gain = ll_new - ll;
        ll = ll_new;
        if (gain < tol) {
            result.converged = true;
            break;
        }
    }

    result.log_likelihood = ll;
    // Numerical cleanup: the iteration preserves positivity up to roundoff.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    Eigen::Vector4d vals = es.eigenvalues().cwiseMax(0.0);
    vals /= vals.sum();
    const Eigen::Matrix4cd cleaned =
        es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
    result.rho = DensityMatrix(cleaned);
    return result;
}

namespace {

Eigen::MatrixXcd matrix_sqrt(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& target) {
    if (rho.dim() != target.dim()) throw DimensionError("fidelity dimension mismatch");
    const Eigen::MatrixXcd sr = matrix_sqrt(rho.matrix());
    const Eigen::MatrixXcd inner = sr * target.matrix() * sr;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inner, Eigen::EigenvaluesOnly);
    double tr = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        tr += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
    }
    return std::min(1.0, tr * tr);
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

MonteCarloErrors monte_carlo_errors(const std::vector<CountRecord>& records,
                                    const MeasurementSet& set, const DensityMatrix& target,
                                    int n_samples, std::uint64_t rng_seed, Exec exec) {
    if (n_samples < 2) throw ParameterError("need at least 2 Monte-Carlo samples");

    std::vector<double> f_values(n_samples, std::nan(""));
    std::vector<double> s_values(n_samples, std::nan(""));

    auto run_sample = [&](int s) {
        std::mt19937_64 rng(mix_seed(rng_seed, static_cast<std::uint64_t>(s)));
        std::vector<CountRecord> resampled = records;
        for (auto& r : resampled) {
            if (r.exact) continue;  // exact-probability records are kept as-is
            std::poisson_distribution<long long> poisson(std::max(0.0, r.counts));
            r.counts = r.counts > 0.0 ? static_cast<double>(poisson(rng)) : 0.0;
        }
        try {
            const MleResult mle = mle_reconstruct(resampled, set);
            f_values[s] = fidelity(mle.rho, target);
            s_values[s] = chsh_optimal(mle.rho).s_max;
        } catch (const std::exception&) {
            // skipped; counted below
        }
    };

    if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (int s = 0; s < n_samples; ++s) run_sample(s);
#else
        for (int s = 0; s < n_samples; ++s) run_sample(s);
#endif
    } else {
        for (int s = 0; s < n_samples; ++s) run_sample(s);
    }

    double f_sum = 0.0, s_sum = 0.0;
    int ok = 0;
    for (int s = 0; s < n_samples; ++s) {
        if (std::isnan(f_values[s])) continue;
        f_sum += f_values[s];
        s_sum += s_values[s];
        ++ok;
    }
    if (ok < 2) throw EstimationError("too few successful Monte-Carlo reconstructions");
    const double f_mean = f_sum / ok;
    const double s_mean = s_sum / ok;
    double f_var = 0.0, s_var = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        if (std::isnan(f_values[s])) continue;
        f_var += (f_values[s] - f_mean) * (f_values[s] - f_mean);
        s_var += (s_values[s] - s_mean) * (s_values[s] - s_mean);
    }
    f_var /= (ok - 1);
    s_var /= (ok - 1);

    return MonteCarloErrors{f_mean, std::sqrt(f_var), s_mean, std::sqrt(s_var), n_samples,
                            n_samples - ok};
}

Eigen::Vector4cd intra_logical_vector(const SingleKet& state, double* leakage) {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    int k = 0;
    double weight = 0.0;
    for (Pol pol : {Pol::L, Pol::R}) {
        for (int m : {-2, 2}) {
            v(k) = state.amplitude(Mode{pol, m});
            weight += std::norm(v(k));
            ++k;
        }
    }
    if (weight < 1e-24) {
        throw DegenerateProjectionError("state has no weight on the intra logical span");
    }
    if (leakage != nullptr) *leakage = std::max(0.0, 1.0 - weight);
    return v / std::sqrt(weight);
}

}  // namespace vvsim

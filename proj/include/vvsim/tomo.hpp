#pragma once

// Quantum state tomography on the logical two-qubit spaces:
//   intra — polarization (x) OAM of one photon, analyzed by cascaded
//           polarization and q-plate-converted OAM stages on one beam,
//   inter — one hybrid qubit per beam-splitter output, one OAM analysis
//           stage per port.
//
// 36 settings (eigenstates of the 3 Pauli bases per qubit), Poissonian count
// simulation with a uniform background floor, linear inversion and diluted
// RrhoR maximum-likelihood reconstruction, Uhlmann fidelity, and Monte-Carlo
// error bars (serial reference + OpenMP kernel).

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vvsim/gate.hpp"
#include "vvsim/modes.hpp"

namespace vvsim {

enum class Scheme { intra, inter };

struct MeasurementSetting {
    std::string label;        // e.g. "XY:+-"
    int basis_index;          // 0..8, row-major over (basis_1, basis_2)
    Eigen::Matrix4cd projector;  // effective operator on the logical space
};

struct MeasurementSet {
    Scheme scheme;
    std::vector<MeasurementSetting> settings;  // 36 = 9 bases x 4 outcomes
    int n_bases() const { return 9; }
};

// Builds the settings from the physical analysis chains (waveplates, q-plates,
// PBS filters, fiber coupling); the uniform q-plate conversion factor of the
// intra cascade is normalized away so each basis group sums to the identity.
MeasurementSet build_measurements(Scheme scheme, int oam_cutoff = kDefaultOamCutoff);

struct CountRecord {
    std::string setting;
    double counts;       // integer-valued when sampled; expected value in exact mode
    double time_s;
    double background;   // background rate estimate (Hz)
    bool exact = false;
    std::string provenance = "raw";
};

struct CountSimulationParams {
    double mean_total = 1e5;       // expected signal counts per basis group
    double background_rate = 0.0;  // Hz, uniform Poisson floor per setting
    double time_s = 1.0;           // acquisition time per setting
    bool exact = false;            // emit expected values instead of sampling
};

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, const MeasurementSet& set,
                                         const CountSimulationParams& params,
                                         std::uint64_t rng_seed);

enum class BackgroundMode { dark, accidental };

// counts' = max(0, counts - background * time); provenance records the mode.
std::vector<CountRecord> subtract_background(const std::vector<CountRecord>& records,
                                             BackgroundMode mode);

struct LinearInversionResult {
    Eigen::Matrix4cd rho;    // Hermitian, unit trace; possibly non-PSD
    double min_eigenvalue;
};

// Least-squares solution of Tr(rho P_i) = f_i over the Hermitian operator
// space. Throws CompletenessError on a rank-deficient design matrix.
LinearInversionResult linear_inversion(const std::vector<CountRecord>& records,
                                       const MeasurementSet& set);

struct MleResult {
    DensityMatrix rho;
    bool converged;
    int iterations;
    double log_likelihood;
    std::vector<double> log_likelihood_trace;  // one entry per accepted iteration
};

// Diluted RrhoR iteration (dilution 0.5, halved whenever a step would lower
// the log-likelihood); stops when the log-likelihood gain drops below tol.
MleResult mle_reconstruct(const std::vector<CountRecord>& records, const MeasurementSet& set,
                          double tol = 1e-10, int max_iter = 10000);

// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2;
// equals <psi|rho|psi> for pure targets.
double fidelity(const DensityMatrix& rho, const DensityMatrix& target);

struct MonteCarloErrors {
    double f_mean;
    double f_std;
    double s_mean;
    double s_std;
    int n_samples;
    int failures;  // reconstructions that errored and were skipped
};

enum class Exec { serial, parallel };

// Poisson-resamples the records n_samples times (per-sample derived seeds),
// re-reconstructs with MLE and recomputes fidelity to `target` and the
// Horodecki CHSH optimum. Results are identical for both execution policies.
MonteCarloErrors monte_carlo_errors(const std::vector<CountRecord>& records,
                                    const MeasurementSet& set, const DensityMatrix& target,
                                    int n_samples, std::uint64_t rng_seed,
                                    Exec exec = Exec::parallel);

// Logical 4-vector of a single-photon state in the intra scheme basis
// {|L,-2>, |L,+2>, |R,-2>, |R,+2>} (polarization qubit first).
Eigen::Vector4cd intra_logical_vector(const SingleKet& state, double* leakage = nullptr);

}  // namespace vvsim

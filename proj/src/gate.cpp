#include "vvsim/gate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace vvsim {

namespace {

Eigen::Matrix2cd pauli(int i) {
    Eigen::Matrix2cd m;
    switch (i) {
        case 0: m << 0, 1, 1, 0; break;
        case 1: m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0); break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

Eigen::Matrix2cd bloch_dot_sigma(const Eigen::Vector3d& n) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 3; ++i) m += n(i) * pauli(i);
    return m;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& x, const Eigen::Matrix2cd& y) {
    Eigen::Matrix4cd z;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) z.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
    }
    return z;
}

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2) {
        throw DimensionError("density matrix must be square, dim >= 2");
    }
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) throw ParameterError("density matrix is not Hermitian");
    matrix_ = (matrix_ + matrix_.adjoint()) / 2.0;  // exact symmetrization
    const double trace_err = std::abs(matrix_.trace() - Complex(1.0, 0.0));
    if (trace_err > 1e-10) throw ParameterError("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw ParameterError("density matrix has a negative eigenvalue");
    }
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
    const double n = psi.norm();
    if (n < 1e-15) throw ZeroVectorError("pure state from a zero vector");
    const Eigen::VectorXcd u = psi / n;
    return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Eigen::Vector4cd triplet_ket() {
    Eigen::Vector4cd t = Eigen::Vector4cd::Zero();
    t(1) = 1.0 / std::sqrt(2.0);
    t(2) = 1.0 / std::sqrt(2.0);
    return t;
}

namespace {

// Port-d reflection with the triplet-fixing phase convention.
SingleKet::Term reflect_relabel(const Mode& m, const Complex& amp) {
    if (m.pol == Pol::L) return {Mode{Pol::R, -m.oam}, amp};
    return {Mode{Pol::L, -m.oam}, -amp};
}

}  // namespace

GateResult entangling_gate(const SingleKet& input_a, const SingleKet& input_b,
                           const LogicalQubitMap& map, bool relabel_d) {
    const TwoPhotonState scattered = bs_scatter(input_a, input_b);

    double p_cd = 0.0;
    Eigen::Vector4cd logical = Eigen::Vector4cd::Zero();
    double logical_weight = 0.0;

    for (const auto& term : scattered.terms()) {
        const bool first_c = term.first.port == Port::c;
        const bool second_c = term.second.port == Port::c;
        if (first_c == second_c) continue;  // bunched
        const PortMode& on_c = first_c ? term.first : term.second;
        const PortMode& on_d = first_c ? term.second : term.first;
        p_cd += std::norm(term.amp);

        Mode mode_c = on_c.mode;
        Mode mode_d = on_d.mode;
        Complex amp = term.amp;
        if (relabel_d) {
            auto [relabeled, amp_d] = reflect_relabel(mode_d, amp);
            mode_d = relabeled;
            amp = amp_d;
        }

        int ic = -1, id = -1;
        if (mode_c == map.basis0) ic = 0;
        if (mode_c == map.basis1) ic = 1;
        if (mode_d == map.basis0) id = 0;
        if (mode_d == map.basis1) id = 1;
        if (ic >= 0 && id >= 0) {
            logical(2 * ic + id) += amp;
            logical_weight += std::norm(amp);
        }
    }

    if (p_cd < 1e-15) {
        throw PostSelectionEmptyError("coincidence post-selection has zero probability");
    }
    const double leakage = std::max(0.0, (p_cd - logical_weight) / p_cd);
    if (logical_weight < 1e-24) {
        throw DegenerateProjectionError("post-selected state has no weight on the logical span");
    }

    return GateResult{DensityMatrix::pure(logical), p_cd, leakage};
}

DensityMatrix werner(const DensityMatrix& rho, double v) {
    if (v < 0.0 || v > 1.0) throw ParameterError("werner mixing weight must lie in [0, 1]");
    const int d = rho.dim();
    return DensityMatrix(v * rho.matrix() +
                         (1.0 - v) * Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
}

ChshSetting::ChshSetting(Eigen::Vector3d a_, Eigen::Vector3d ap_, Eigen::Vector3d b_,
                         Eigen::Vector3d bp_)
    : a(std::move(a_)), a_prime(std::move(ap_)), b(std::move(b_)), b_prime(std::move(bp_)) {
    for (Eigen::Vector3d* v : {&a, &a_prime, &b, &b_prime}) {
        const double n = v->norm();
        if (n < 1e-12) throw ParameterError("CHSH directions must be nonzero");
        *v /= n;
    }
}

double correlation(const DensityMatrix& rho, const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
    if (rho.dim() != 4) throw DimensionError("CHSH needs a two-qubit state");
    const Eigen::Matrix4cd op = kron2(bloch_dot_sigma(x), bloch_dot_sigma(y));
    return (rho.matrix() * op).trace().real();
}

double chsh_value(const DensityMatrix& rho, const ChshSetting& s) {
    return correlation(rho, s.a, s.b) - correlation(rho, s.a, s.b_prime) +
           correlation(rho, s.a_prime, s.b) + correlation(rho, s.a_prime, s.b_prime);
}

ChshOptimum chsh_optimal(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("CHSH needs a two-qubit state");
    Eigen::Matrix3d t;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            t(i, j) = (rho.matrix() * kron2(pauli(i), pauli(j))).trace().real();
        }
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double t1 = svd.singularValues()(0);
    const double t2 = svd.singularValues()(1);
    const double s_max = 2.0 * std::sqrt(t1 * t1 + t2 * t2);

    // Bob measures along the two principal right-singular directions mixed by
    // theta, Alice along the matching left-singular directions.
    const Eigen::Vector3d e1 = svd.matrixV().col(0);
    const Eigen::Vector3d e2 = svd.matrixV().col(1);
    const Eigen::Vector3d u1 = svd.matrixU().col(0);
    const Eigen::Vector3d u2 = svd.matrixU().col(1);
    const double theta = std::atan2(t2, t1);

    const ChshSetting setting(u2, u1, std::cos(theta) * e1 + std::sin(theta) * e2,
                              std::cos(theta) * e1 - std::sin(theta) * e2);
    return ChshOptimum{s_max, setting};
}

double concurrence(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("concurrence needs a two-qubit state");
    const Eigen::Matrix4cd yy = kron2(pauli(1), pauli(1));
    const Eigen::Matrix4cd r = rho.matrix() * yy * rho.matrix().conjugate() * yy;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r, false);
    std::array<double, 4> lambda{};
    for (int i = 0; i < 4; ++i) {
        lambda[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<double>());
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

double fidelity_to_pure(const DensityMatrix& rho, const Eigen::VectorXcd& psi) {
    if (psi.size() != rho.dim()) throw DimensionError("fidelity dimension mismatch");
    return (psi.adjoint() * rho.matrix() * psi)(0).real();
}

}  // namespace vvsim

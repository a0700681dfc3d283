#pragma once

// Equation of motion for one ensemble member:
//
//   d rho/dt = -i [H, rho] + R(rho)
//
// H is the rotating-wave Hamiltonian in rad/us. R is phenomenological
// relaxation: population transfer k_ij = 2*pi*1e-3*Gamma_ij from |i> to |j>
// with matching feeding of |j>, and coherence decay lambda_ij = pi*1e-3*gamma_ij.

#include "qmem/model.hpp"

#include <Eigen/Dense>
#include <complex>

namespace qmem {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Angular rates derived from a system and the dephasing widths in force.
struct RelaxationRates {
    int n = 0;
    RateTable k{};       // population transfer, 1/us
    RateTable lambda{};  // coherence decay, 1/us
    double max_rate() const;
};

RelaxationRates relaxation_rates(const LevelSystem& sys, const RateTable& gamma_khz);
RelaxationRates relaxation_rates(const LevelSystem& sys);

// Detuning convention: H22 = Dp - Dc (+ delta), H33 = Dp (+ delta),
// H44 = Dp - DA, all converted to rad/us. A positive D lowers the laser
// frequency relative to the atomic transition.
Matrix build_hamiltonian(const LevelSystem& sys, const PulseSegment& seg, double delta_khz);

// Throws std::invalid_argument when rho is not Hermitian to 1e-9.
Matrix apply_relaxation(const LevelSystem& sys, const Matrix& rho);
Matrix apply_relaxation(const RelaxationRates& rates, const Matrix& rho);

// Segment overrides replace the matching gamma entries before relaxation.
Matrix equation_of_motion(const LevelSystem& sys, const PulseSegment& seg, double delta_khz, const Matrix& rho);
Matrix equation_of_motion(const Matrix& H, const RelaxationRates& rates, const Matrix& rho);

// Liouvillian on row-major vec(rho): vec[a*n + b] = rho(a, b).
Matrix superoperator(const Matrix& H, const RelaxationRates& rates);

Vector vec(const Matrix& rho);
Matrix unvec(const Vector& v, int n);

double hermiticity_error(const Matrix& m);

}  // namespace qmem

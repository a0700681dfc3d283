#include "qmem/liouvillian.hpp"

#include "qmem/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmem {

double RelaxationRates::max_rate() const
{
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        double out = 0.0;
        for (int j = 0; j < n; ++j) {
            out += k[i][j];
            m = std::max(m, lambda[i][j]);
        }
        m = std::max(m, out);
    }
    return m;
}

RelaxationRates relaxation_rates(const LevelSystem& sys, const RateTable& gamma_khz)
{
    RelaxationRates r;
    r.n = sys.n_levels;
    for (int i = 0; i < r.n; ++i) {
        for (int j = 0; j < r.n; ++j) {
            if (i == j) continue;
            r.k[i][j] = to_angular(sys.big_gamma[i][j]);
            r.lambda[i][j] = to_decay_constant(gamma_khz[i][j]);
        }
    }
    return r;
}

RelaxationRates relaxation_rates(const LevelSystem& sys)
{
    return relaxation_rates(sys, sys.gamma);
}

Matrix build_hamiltonian(const LevelSystem& sys, const PulseSegment& seg, double delta_khz)
{
    const int n = sys.n_levels;
    Matrix H = Matrix::Zero(n, n);

    double det[kFieldCount] = {};
    for (int f = 0; f < kFieldCount; ++f) {
        const auto& d = seg.fields[f];
        if (!d) continue;
        const auto* tr = sys.transition(static_cast<Field>(f));
        if (!tr || tr->lower > n || tr->upper > n)
            throw std::invalid_argument("build_hamiltonian: field '" +
                                        std::string(field_name(static_cast<Field>(f))) +
                                        "' has no transition in this system");
        det[f] = d->det_khz;
        const double phase = d->phase_deg * std::numbers::pi / 180.0;
        const cplx coupling = 0.5 * to_angular(d->amp_khz) * std::polar(1.0, phase);
        H(tr->upper - 1, tr->lower - 1) += coupling;
        H(tr->lower - 1, tr->upper - 1) += std::conj(coupling);
    }

    const double dp = det[0], dc = det[1], da = det[2];
    H(1, 1) += to_angular(dp - dc);
    H(2, 2) += to_angular(dp);
    if (n == 4) H(3, 3) += to_angular(dp - da);
    const int target = sys.shift_target - 1;
    if (target < 0 || target >= n) throw std::invalid_argument("build_hamiltonian: bad shift target");
    if (!seg.frozen_shift) H(target, target) += to_angular(delta_khz);
    return H;
}

double hermiticity_error(const Matrix& m)
{
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix apply_relaxation(const RelaxationRates& rates, const Matrix& rho)
{
    const int n = rates.n;
    if (rho.rows() != n || rho.cols() != n)
        throw std::invalid_argument("apply_relaxation: dimension mismatch");
    if (hermiticity_error(rho) > 1e-9) throw std::invalid_argument("apply_relaxation: rho is not Hermitian");

    Matrix d = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            d(i, j) -= rates.lambda[i][j] * rho(i, j);
            const double flow = rates.k[i][j] * rho(i, i).real();
            d(j, j) += flow;
            d(i, i) -= flow;
        }
    }
    return d;
}

Matrix apply_relaxation(const LevelSystem& sys, const Matrix& rho)
{
    return apply_relaxation(relaxation_rates(sys), rho);
}

Matrix equation_of_motion(const Matrix& H, const RelaxationRates& rates, const Matrix& rho)
{
    const cplx i{0.0, 1.0};
    return -i * (H * rho - rho * H) + apply_relaxation(rates, rho);
}

Matrix equation_of_motion(const LevelSystem& sys, const PulseSegment& seg, double delta_khz, const Matrix& rho)
{
    RateTable g = sys.gamma;
    for (const auto& ov : seg.overrides) {
        g[ov.i - 1][ov.j - 1] = ov.gamma_khz;
        g[ov.j - 1][ov.i - 1] = ov.gamma_khz;
    }
    return equation_of_motion(build_hamiltonian(sys, seg, delta_khz), relaxation_rates(sys, g), rho);
}

Matrix superoperator(const Matrix& H, const RelaxationRates& rates)
{
    const int n = static_cast<int>(H.rows());
    const int n2 = n * n;
    const cplx i{0.0, 1.0};
    Matrix L = Matrix::Zero(n2, n2);
    // -i (H (x) I - I (x) H^T) for row-major vec.
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int row = a * n + b;
            for (int c = 0; c < n; ++c) {
                L(row, c * n + b) += -i * H(a, c);
                L(row, a * n + c) += i * H(c, b);
            }
        }
    }
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            L(a * n + b, a * n + b) -= rates.lambda[a][b];
            L(b * n + b, a * n + a) += rates.k[a][b];
            L(a * n + a, a * n + a) -= rates.k[a][b];
        }
    }
    return L;
}

Vector vec(const Matrix& rho)
{
    const int n = static_cast<int>(rho.rows());
    Vector v(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) v(a * n + b) = rho(a, b);
    return v;
}

Matrix unvec(const Vector& v, int n)
{
    Matrix m(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(a, b) = v(a * n + b);
    return m;
}

}  // namespace qmem

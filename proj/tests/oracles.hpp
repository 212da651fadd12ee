#pragma once

// Independent reference computations used as test oracles. Apart from plain
// data types, the only library call is the mismatch being differentiated.

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "helm/mp.hpp"
#include "helm/netmodel.hpp"
#include "helm/newton.hpp"
#include "helm/series.hpp"

namespace oracle {

using helm::mp::Complex;

/// Taylor coefficients 0..n of (1 - z/c)^alpha from the binomial recurrence.
std::vector<Complex> binomial_series(const helm::mp::Real& alpha, double c, int n);

/// Taylor coefficients 0..n of exp(z).
std::vector<Complex> exp_series(int n);

/// Taylor coefficients 0..n of num(z)/den(z) by long division (den[0] != 0).
std::vector<Complex> rational_taylor(const std::vector<Complex>& num, const std::vector<Complex>& den, int n);

/// Monic polynomial with the given roots, coefficients by ascending degree.
std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots);

/// Bus admittance matrix assembled element by element from the branch list,
/// indexed by bus id through `index`.
Eigen::MatrixXcd admittance(const helm::Network& net, std::map<int, int>& index);

/// Order-1 voltage coefficients (and PV reactive coefficients) of the
/// embedding, from a hand-assembled dense real system solved by Eigen.
struct OrderOne {
    std::map<int, std::complex<double>> v;
    std::map<int, double> q;
    int unknowns = 0;
};
OrderOne order_one(const helm::Network& net);

/// P and Q injections from S_i = V_i conj(sum_k Y_ik V_k), internal order.
std::vector<std::complex<double>> complex_powers(const helm::Network& net, const helm::newton::BusState& s);

/// Power mismatch from complex_powers, same layout as newton::mismatch.
Eigen::VectorXd mismatch(const helm::Network& net, const helm::newton::BusState& s);

/// Central-difference Jacobian of newton::mismatch with step h.
Eigen::MatrixXd fd_jacobian(const helm::Network& net, const helm::newton::BusState& s, double h);

/// Random state near the flat profile: angles in [-0.5, 0.5], PQ magnitudes
/// in [0.6, 1.2].
helm::newton::BusState random_state(const helm::Network& net, unsigned seed);

/// Largest relative residual (log10) of the embedded equations through the
/// series order, each coefficient compared with the largest term that
/// enters it.
double series_residual_log10(const helm::Network& net, const helm::series::VoltageSeries& s);

}  // namespace oracle

#pragma once

#include <span>
#include <vector>

#include "helm/mp.hpp"

namespace helm::pade {

struct RootStats {
    int iterations = 0;
    /// Largest last correction over all roots, relative to the root size.
    double max_relative_step = 0.0;
};

/// All roots of sum_k coeffs[k] z^k by Aberth-Ehrlich simultaneous
/// iteration in working precision. Starting points come from the Newton
/// polygon of the coefficient moduli, so roots spread over many scales
/// start on the right circles. The leading coefficient must be nonzero.
/// Throws RootFindingStalled if the iteration does not settle.
std::vector<mp::Complex> aberth_roots(std::span<const mp::Complex> coeffs, RootStats* stats = nullptr);

}  // namespace helm::pade

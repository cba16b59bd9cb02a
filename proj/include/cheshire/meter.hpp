#pragma once

#include <cstddef>

#include "cheshire/hilbert.hpp"

namespace cheshire {

/// Pointer readout. q is in grid units (q_k = k), p in units of the grid momentum
/// p_l = 2 pi l / (2N + 1).
struct MeterReadout {
    double mean_q = 0.0;
    double mean_p = 0.0;
    double var_q = 0.0;
    double var_p = 0.0;
    /// Squared norm of the (possibly unnormalized) meter vector.
    double success_probability = 0.0;
};

enum class Representation { q, p };

/// Normalized discrete Gaussian pointer, amplitudes proportional to exp(-q_k^2 / 4 Delta^2)
/// for k in {-N..N}.
class DiscreteGaussianMeter {
   public:
    /// Throws ValueError for N < 1 or Delta <= 0. Warns when Delta > N/5 or when the
    /// uncertainty product falls below 1/4.
    DiscreteGaussianMeter(std::size_t half_width, double delta);

    std::size_t half_width() const noexcept {
        return half_width_;
    }
    double delta() const noexcept {
        return delta_;
    }
    std::size_t size() const noexcept {
        return 2 * half_width_ + 1;
    }
    SpaceSignature signature() const;
    const CVector &amplitudes() const noexcept {
        return amplitudes_;
    }
    Ket ket() const;
    double q(std::size_t index) const {
        return static_cast<double>(index) - static_cast<double>(half_width_);
    }

   private:
    std::size_t half_width_;
    double delta_;
    CVector amplitudes_;
};

DiscreteGaussianMeter make_meter(std::size_t half_width, double delta);

/// Grid coordinate q_k = k or p_l = 2 pi l / (2N + 1) for storage index i of an odd-length vector.
double grid_q(std::size_t index, std::size_t size);
double grid_p(std::size_t index, std::size_t size);

/// Mean and variance on the chosen grid, success_probability = squared norm.
/// Throws AnnihilatedState for a zero vector.
MeterReadout moments(const CVector &amplitudes, Representation rep);

/// Both representations combined: q moments, p moments, squared norm.
MeterReadout readout(const CVector &amplitudes);

/// Continuous-meter prediction for the state exp(i g q A) exp(-q^2 / 4 Delta^2):
/// mean_p = g Re A, mean_q = -2 g Delta^2 Im A, var_q = Delta^2, var_p = 1 / (4 Delta^2).
MeterReadout continuous_reference(double delta, double g, cplx weak_value);

}  // namespace cheshire

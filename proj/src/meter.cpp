#include "cheshire/meter.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cheshire/basis.hpp"
#include "cheshire/errors.hpp"

namespace cheshire {

namespace {

struct Stats {
    double mean;
    double var;
};

Stats weighted_stats(const Eigen::VectorXd &prob, double (*coord)(std::size_t, std::size_t)) {
    auto n = static_cast<std::size_t>(prob.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean += prob(static_cast<Eigen::Index>(i)) * coord(i, n);
    }
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = coord(i, n) - mean;
        var += prob(static_cast<Eigen::Index>(i)) * d * d;
    }
    return {mean, var};
}

}  // namespace

DiscreteGaussianMeter::DiscreteGaussianMeter(std::size_t half_width, double delta)
    : half_width_(half_width), delta_(delta) {
    if (half_width < 1) {
        throw ValueError("meter half-width N must be at least 1");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ValueError("meter width Delta must be positive and finite");
    }
    if (delta > static_cast<double>(half_width) / 5.0) {
        std::ostringstream msg;
        msg << "meter Delta = " << delta << " exceeds N/5 = " << static_cast<double>(half_width) / 5.0
            << "; grid truncation is not negligible";
        warn(msg.str());
    }
    auto n = static_cast<Eigen::Index>(size());
    amplitudes_.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double qk = q(static_cast<std::size_t>(k));
        amplitudes_(k) = std::exp(-qk * qk / (4.0 * delta * delta));
    }
    amplitudes_ /= amplitudes_.norm();

    auto r = readout(amplitudes_);
    if (r.var_q * r.var_p < 0.25 * (1.0 - 1e-9)) {
        std::ostringstream msg;
        msg << "meter (N = " << half_width << ", Delta = " << delta << ") has var_q * var_p = " << r.var_q * r.var_p
            << " < 1/4; the momentum grid does not resolve the pointer";
        warn(msg.str());
    }
}

SpaceSignature DiscreteGaussianMeter::signature() const {
    return basis::meter(half_width_);
}

Ket DiscreteGaussianMeter::ket() const {
    return Ket(signature(), amplitudes_);
}

DiscreteGaussianMeter make_meter(std::size_t half_width, double delta) {
    return DiscreteGaussianMeter(half_width, delta);
}

double grid_q(std::size_t index, std::size_t size) {
    return static_cast<double>(index) - static_cast<double>(size / 2);
}

double grid_p(std::size_t index, std::size_t size) {
    return 2.0 * std::numbers::pi * grid_q(index, size) / static_cast<double>(size);
}

MeterReadout moments(const CVector &amplitudes, Representation rep) {
    if (amplitudes.size() % 2 == 0) {
        throw ValueError("meter vector must have odd length 2N+1");
    }
    double norm2 = amplitudes.squaredNorm();
    if (!(norm2 > 0.0)) {
        throw AnnihilatedState("meter vector is zero");
    }
    MeterReadout r;
    r.success_probability = norm2;
    if (rep == Representation::q) {
        auto s = weighted_stats(amplitudes.cwiseAbs2() / norm2, grid_q);
        r.mean_q = s.mean;
        r.var_q = s.var;
    } else {
        CVector p = dft_q_to_p(amplitudes);
        auto s = weighted_stats(p.cwiseAbs2() / p.squaredNorm(), grid_p);
        r.mean_p = s.mean;
        r.var_p = s.var;
    }
    return r;
}

MeterReadout readout(const CVector &amplitudes) {
    auto rq = moments(amplitudes, Representation::q);
    auto rp = moments(amplitudes, Representation::p);
    rq.mean_p = rp.mean_p;
    rq.var_p = rp.var_p;
    return rq;
}

MeterReadout continuous_reference(double delta, double g, cplx weak_value) {
    if (!(delta > 0.0)) {
        throw ValueError("Delta must be positive");
    }
    MeterReadout r;
    r.mean_p = g * weak_value.real();
    r.mean_q = -2.0 * g * delta * delta * weak_value.imag();
    r.var_q = delta * delta;
    r.var_p = 1.0 / (4.0 * delta * delta);
    r.success_probability = 1.0;
    return r;
}

}  // namespace cheshire

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cheshire/hilbert.hpp"
#include "cheshire/meter.hpp"

namespace cheshire {

/// Coupling variants. Kick generators are g times:
///   noiseless_kick           A x q              (A = spec.observable)
///   spin_orbit               sigma_z x q        static g' L_x x sigma_x
///   parallel_1               sigma_z x q        static g' L_x x sigma_z
///   parallel_2               sigma_z x q        static g' L_z x sigma_z
///   three_body               (sigma_z - L_x x sigma_x) x q
///   measure_sigma_zR         Pi_L sigma_z x I + Pi_R sigma_z x q
///   measure_sigma_zR_noisy   same kick, static spin-orbit noise
///   measure_sigma_zL_noisy   Pi_R sigma_z x I + Pi_L sigma_z x q, static spin-orbit noise
///   measure_LxSx_L           Pi_R LxSx x I + Pi_L LxSx x q, static spin-orbit noise
///   measure_LxSx_R           Pi_L LxSx x I + Pi_R LxSx x q, static spin-orbit noise
enum class Variant {
    noiseless_kick,
    spin_orbit,
    parallel_1,
    parallel_2,
    three_body,
    measure_sigma_zR,
    measure_sigma_zR_noisy,
    measure_sigma_zL_noisy,
    measure_LxSx_L,
    measure_LxSx_R,
};

/// consistent: kick unitary exp(+i kick). paper: exp(-i kick), the sign of the printed expansion.
enum class SignConvention { consistent, paper };

/// Static noise term. `variant_default` uses the variant's own term.
enum class Noise { variant_default, none, spin_orbit, parallel_1, parallel_2 };

std::string_view to_string(Variant v);
std::string_view to_string(SignConvention s);
std::string_view to_string(Noise n);
std::optional<Variant> parse_variant(std::string_view name);
std::optional<SignConvention> parse_sign(std::string_view name);
std::optional<Noise> parse_noise(std::string_view name);
std::span<const Variant> all_variants();

struct CouplingSpec {
    Variant variant = Variant::noiseless_kick;
    double g = 1e-3;
    double g_prime = 1e-3;
    double t = 1.0;
    double kick_time = 0.0;
    SignConvention sign = SignConvention::consistent;
    Noise noise = Noise::variant_default;
    /// Kicked observable for noiseless_kick.
    std::string observable = "sigma_z";

    /// Throws ValueError for negative couplings, non-positive t or kick_time outside [0, t].
    void validate() const;
    /// g/g' << t << sqrt(g)/g' with factor-of-ten margins on both sides.
    bool in_regime() const;
    Noise effective_noise() const;

    bool operator==(const CouplingSpec &) const = default;
};

/// System-side pieces of the coupling: kick = kick_const x I + kick_q x q, static x I.
struct SystemCoupling {
    Operator kick_const;
    Operator kick_q;
    Operator static_term;
};

SystemCoupling system_coupling(const CouplingSpec &spec, const SpaceSignature &system);

struct Hamiltonian {
    /// Delta-kick generator, exponentiated as exp(+-i kick).
    Operator kick;
    /// Time-independent part, exponentiated as exp(-i static dt).
    Operator static_term;
};

/// Full operators on `sig`, which must end with the meter factor.
Hamiltonian build_hamiltonian(const CouplingSpec &spec, const SpaceSignature &sig);

/// Per-meter-index system matrices. The joint evolution is block diagonal in q.
class MeterBlocks {
   public:
    MeterBlocks(SpaceSignature system, std::size_t half_width, std::vector<CMatrix> blocks);

    const SpaceSignature &system() const noexcept {
        return system_;
    }
    std::size_t half_width() const noexcept {
        return half_width_;
    }
    const std::vector<CMatrix> &blocks() const noexcept {
        return blocks_;
    }
    SpaceSignature joint_signature() const;

    /// Applies the block operator to a joint (system x meter) ket.
    Ket apply(const Ket &joint) const;
    /// Largest spectral norm over blocks of (this - other), which is the operator norm of the difference.
    double distance(const MeterBlocks &other) const;
    /// Dense joint matrix; for tests.
    Operator dense() const;

   private:
    SpaceSignature system_;
    std::size_t half_width_;
    std::vector<CMatrix> blocks_;
};

/// exp(-i S (t - tau)) exp(+-i K) exp(-i S tau), tau = kick_time.
MeterBlocks exact_blocks(const CouplingSpec &spec, const SpaceSignature &system, std::size_t half_width);

/// Second-order truncation with the g^2 term dropped:
///   1 + i s K - i S t + s (t - tau) S K + s tau K S - S^2 t^2 / 2,   s = +1 (consistent) or -1 (paper).
/// At s = -1, tau = 0 this is the printed expansion term by term.
MeterBlocks dyson2_blocks(const CouplingSpec &spec, const SpaceSignature &system, std::size_t half_width);

/// Joint state after exact evolution of pre_system x meter.
Ket evolve_exact(const CouplingSpec &spec, const Ket &pre_system, const DiscreteGaussianMeter &meter);
/// Joint state under the truncated expansion; warns when the spec is outside the regime.
Ket evolve_dyson2(const CouplingSpec &spec, const Ket &pre_system, const DiscreteGaussianMeter &meter);

/// <post_system| joint, an unnormalized meter ket. Throws AnnihilatedState when its norm is below 1e-14.
Ket post_select_meter(const Ket &joint, const Ket &post_system);

struct EffectiveWeakValueFit {
    cplx A_fit;
    cplx a_fit;
    /// Weighted RMS of the complex log-amplitude residual.
    double residual = 0.0;
    bool accepted = false;
    std::size_t points = 0;
};

inline constexpr double kFitResidualThreshold = 1e-2;
inline constexpr double kFitAmplitudeFloor = 1e-8;

/// Weighted least squares of log(final_k / reference_k) = a + i g q_k A over points with
/// |reference_k| > 1e-8, weights |reference_k|^2, phase unwrapped along q.
/// Throws ValueError for g <= 0, AnnihilatedState for a zero vector and IllConditionedFit
/// when the weight sits on fewer than two effective points.
EffectiveWeakValueFit fit_effective_weak_value(const CVector &final_meter, const DiscreteGaussianMeter &reference,
                                               double g, double residual_threshold = kFitResidualThreshold);

struct MeasurementOutcome {
    MeterReadout readout;
    EffectiveWeakValueFit fit;
    cplx overlap;
};

/// Pre-select, evolve exactly, post-select, read and fit.
MeasurementOutcome measure(const CouplingSpec &spec, const Ket &pre, const Ket &post,
                           const DiscreteGaussianMeter &meter);

enum class DisembodiedTarget { sigma_zR, sigma_zL, LxSx_L, LxSx_R };

std::string_view to_string(DisembodiedTarget t);
Variant variant_for(DisembodiedTarget t);

/// The interferometric disembodiment setup: disembody_in(theta), the matching measurement
/// coupling with static noise, disembody_f(alpha).
MeasurementOutcome disembodied_measurement(double theta, double alpha, DisembodiedTarget target, double g,
                                           double g_prime, double t, const DiscreteGaussianMeter &meter,
                                           Noise noise = Noise::variant_default,
                                           SignConvention sign = SignConvention::consistent);

/// max over meter blocks of ||U_exact - U_dyson2||_2.
double dyson_operator_error(const CouplingSpec &spec, const SpaceSignature &system, std::size_t half_width);
/// ||U_exact psi - U_dyson2 psi|| for a joint ket.
double dyson_state_error(const CouplingSpec &spec, const Ket &joint);

}  // namespace cheshire

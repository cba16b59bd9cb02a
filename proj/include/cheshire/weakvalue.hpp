#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cheshire/hilbert.hpp"
#include "cheshire/optics.hpp"

namespace cheshire {

/// Post-selection is declared degenerate when |<post|pre>| / (|pre||post|) is at or below this.
inline constexpr double kOverlapThreshold = 1e-10;

/// Named observables. Ids and their local factors:
///   Pi_L, Pi_R                      path
///   sigma_z, sigma_x                polarization
///   sigma_z_L, sigma_z_R,
///   sigma_x_L, sigma_x_R            path x polarization
///   L_x                             orbital
///   LxSx                            orbital x polarization
///   LxSx_L, LxSx_R                  path x orbital x polarization
///   A_prime    sigma_z + i g't L_x x (sigma_x sigma_z)
///   A_prime_1  sigma_z + i g't L_x x I
///   A_prime_2  sigma_z + i g't L_z x I   (L_z restricted to {v_a, v_b} is zero, so this is sigma_z)
///   A_prime_3  sigma_z - L_x x sigma_x
///   identity                        any signature
namespace catalog {

std::span<const std::string_view> ids();
bool contains(std::string_view id);
bool needs_gpt(std::string_view id);
/// Factors the observable acts on (empty for identity).
SpaceSignature local_signature(std::string_view id);
bool is_hermitian(std::string_view id);

/// The observable extended to `sig`. `gpt` is g't for the A_prime family.
/// Throws ValueError for unknown ids, SignatureError when `sig` lacks a factor.
Operator observable(std::string_view id, const SpaceSignature &sig, double gpt = 0.0);

}  // namespace catalog

struct WeakValueResult {
    cplx value;
    cplx overlap;
    std::string observable;
    std::string pre;
    std::string post;
    optics::StateParams params;
};

/// <post|A|pre> / <post|pre>. Throws DegeneratePostselection when the normalized overlap
/// is at or below `threshold`.
WeakValueResult weak_value(const Ket &pre, const Ket &post, const Operator &A, double threshold = kOverlapThreshold);

/// Evaluates a catalog observable between two named states.
WeakValueResult weak_value(optics::StateId pre, optics::StateId post, std::string_view observable,
                           const optics::StateParams &params = {}, double gpt = 0.0);

/// (Pi_L, Pi_R, sigma_z_L, sigma_z_R) for the basic Cheshire pre/post pair.
std::vector<WeakValueResult> cheshire_quartet();

/// Pi_L, Pi_R, sigma_z_L, sigma_z_R, sigma_x_L, sigma_x_R for amp_in(theta) and amp_f, one row per theta.
std::vector<std::vector<WeakValueResult>> cheshire_table(std::span<const double> thetas);

std::vector<std::string_view> cheshire_table_columns();

enum class NoisyVariant { spin_orbit, three_body };

struct EffectiveWeakValue {
    /// Closed form printed in the source: (g't + i) tan(alpha), or 1 + i tan(alpha).
    cplx paper;
    /// Direct ratio <chi_f|A'|chi_in> / <chi_f|chi_in>.
    cplx direct;
};

/// Effective weak value between noisy_in and noisy_f(alpha). Throws DegeneratePostselection near alpha = +-pi/2.
EffectiveWeakValue noisy_effective_weak_value(NoisyVariant variant, double alpha, double gpt);

/// sigma_z_L, sigma_z_R, LxSx_L, LxSx_R between disembody_in(theta) and disembody_f(alpha).
std::vector<WeakValueResult> disembodiment_table(double theta, double alpha);

}  // namespace cheshire

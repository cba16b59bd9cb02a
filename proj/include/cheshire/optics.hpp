#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cheshire/basis.hpp"
#include "cheshire/hilbert.hpp"

namespace cheshire::optics {

using basis::Arm;

enum class ComponentKind { pbs, hwp, phase_shifter, beam_splitter, l_splitter, l_prime_splitter, pol_rotator };

std::string_view to_string(ComponentKind kind);
/// Throws ValueError naming the valid kinds.
ComponentKind parse_component_kind(std::string_view name);

/// One optical element. Real parameters by key:
///   hwp            jones_phase (default 0)
///   phase_shifter  phi
///   beam_splitter  alpha  (transmission cos^2 alpha)
///   pol_rotator    angle  (|H> -> cos|H> + sin|V>)
/// `arm` restricts hwp and phase_shifter to one interferometer arm.
struct Component {
    ComponentKind kind;
    std::map<std::string, double> params;
    std::optional<Arm> arm;
};

Component pbs();
Component hwp(std::optional<Arm> arm, double jones_phase = 0.0);
Component phase_shifter(Arm arm, double phi);
Component beam_splitter(double alpha);
Component l_splitter();
Component l_prime_splitter();
Component pol_rotator(double angle);

/// Factors the component acts on.
SpaceSignature component_factors(const Component &c);

/// The component's matrix extended by identities to `sig`. Every kind is unitary
/// except the L'-splitter, which is the projector onto |v_a> (its transmitted port).
Operator component_unitary(const Component &c, const SpaceSignature &sig);

class Pipeline {
   public:
    explicit Pipeline(SpaceSignature signature);

    /// Appends a stage; throws SignatureError if its factors are not in the signature.
    Pipeline &then(Component c);

    const SpaceSignature &signature() const noexcept {
        return signature_;
    }
    const std::vector<Component> &stages() const noexcept {
        return stages_;
    }

    Ket run(const Ket &input) const;
    Operator transfer() const;

   private:
    SpaceSignature signature_;
    std::vector<Component> stages_;
};

/// PBS1 -> HWP1 (right arm, half-wave retarder phase e^{i pi/2}) -> pi phase shifter.
Pipeline preselection_pipeline();

/// (cos(theta/2)|L> - i sin(theta/2)|R>)|H>, obtained by running the preselection
/// pipeline on |L>(cos(theta/2)|H> + sin(theta/2)|V>). theta in (-pi, pi).
Ket prepare_preselected(double theta);

enum class StateId { cheshire_in, cheshire_f, amp_in, amp_f, noisy_in, noisy_f, disembody_in, disembody_f };

struct StateParams {
    std::optional<double> theta;
    std::optional<double> alpha;
};

std::string_view to_string(StateId id);
std::optional<StateId> parse_state_id(std::string_view name);
std::span<const StateId> all_states();
bool uses_theta(StateId id);
bool uses_alpha(StateId id);

/// Signature of the named state: path x pol, orbital x pol, or path x orbital x pol.
SpaceSignature state_signature(StateId id);

/// The named pre- or post-selected state. Angles are in radians.
Ket prepare_state(StateId id, const StateParams &params = {});

}  // namespace cheshire::optics

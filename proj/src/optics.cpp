#include "cheshire/optics.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "cheshire/errors.hpp"

namespace cheshire::optics {

namespace {

constexpr std::array kKindNames{
    std::pair{ComponentKind::pbs, std::string_view("PBS")},
    std::pair{ComponentKind::hwp, std::string_view("HWP")},
    std::pair{ComponentKind::phase_shifter, std::string_view("PhaseShifter")},
    std::pair{ComponentKind::beam_splitter, std::string_view("BS")},
    std::pair{ComponentKind::l_splitter, std::string_view("LSplitter")},
    std::pair{ComponentKind::l_prime_splitter, std::string_view("LPrimeSplitter")},
    std::pair{ComponentKind::pol_rotator, std::string_view("PolRotator")},
};

constexpr std::array kStates{
    std::pair{StateId::cheshire_in, std::string_view("cheshire_in")},
    std::pair{StateId::cheshire_f, std::string_view("cheshire_f")},
    std::pair{StateId::amp_in, std::string_view("amp_in")},
    std::pair{StateId::amp_f, std::string_view("amp_f")},
    std::pair{StateId::noisy_in, std::string_view("noisy_in")},
    std::pair{StateId::noisy_f, std::string_view("noisy_f")},
    std::pair{StateId::disembody_in, std::string_view("disembody_in")},
    std::pair{StateId::disembody_f, std::string_view("disembody_f")},
};

double param(const Component &c, const std::string &key, std::optional<double> fallback = std::nullopt) {
    auto it = c.params.find(key);
    if (it != c.params.end()) {
        return it->second;
    }
    if (fallback) {
        return *fallback;
    }
    throw ValueError(std::string(to_string(c.kind)) + " requires parameter '" + key + "'");
}

Arm other(Arm a) {
    return a == Arm::left ? Arm::right : Arm::left;
}

Operator on_path(const Eigen::Matrix2cd &m) {
    return Operator(basis::path(), CMatrix(m));
}

Operator on_orbital(const Eigen::Matrix2cd &m) {
    return Operator(basis::orbital(), CMatrix(m));
}

// Matrix on the component's own factors (component_factors order).
Operator local_matrix(const Component &c) {
    using namespace basis;
    switch (c.kind) {
        case ComponentKind::pbs: {
            // Transmit H (path unchanged), reflect V (L <-> R).
            auto ph = Operator::outer(horizontal(), horizontal());
            auto pv = Operator::outer(vertical(), vertical());
            Eigen::Matrix2cd swap;
            swap << 0.0, 1.0, 1.0, 0.0;
            return tensor(Operator::identity(path()), ph) + tensor(on_path(swap), pv);
        }
        case ComponentKind::hwp: {
            cplx jones = std::polar(1.0, param(c, "jones_phase", 0.0));
            Operator flip = swap_hv() * jones;
            if (!c.arm) {
                return flip;
            }
            return tensor(projector(other(*c.arm)), Operator::identity(polarization())) +
                   tensor(projector(*c.arm), flip);
        }
        case ComponentKind::phase_shifter: {
            if (!c.arm) {
                throw ValueError("PhaseShifter requires an arm");
            }
            return projector(other(*c.arm)) + projector(*c.arm) * std::polar(1.0, param(c, "phi"));
        }
        case ComponentKind::beam_splitter: {
            double a = param(c, "alpha");
            Eigen::Matrix2cd m;
            m << std::cos(a), kI * std::sin(a), kI * std::sin(a), std::cos(a);
            return on_path(m);
        }
        case ComponentKind::l_splitter: {
            // Reference input mode is v_a: v_a -> (v_a + i v_b)/sqrt2.
            Eigen::Matrix2cd m;
            m << 1.0, kI, kI, 1.0;
            return on_orbital(m / std::numbers::sqrt2);
        }
        case ComponentKind::l_prime_splitter:
            return Operator::outer(v_a(), v_a());
        case ComponentKind::pol_rotator: {
            double t = param(c, "angle");
            Eigen::Matrix2cd m;
            m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
            return polarization_from_hv(m);
        }
    }
    throw ValueError("unknown component kind");
}

}  // namespace

std::string_view to_string(ComponentKind kind) {
    for (auto [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

ComponentKind parse_component_kind(std::string_view name) {
    std::string valid;
    for (auto [k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
        valid += valid.empty() ? "" : ", ";
        valid += n;
    }
    throw ValueError("unknown component kind '" + std::string(name) + "' (valid: " + valid + ")");
}

Component pbs() {
    return {ComponentKind::pbs, {}, std::nullopt};
}

Component hwp(std::optional<Arm> arm, double jones_phase) {
    return {ComponentKind::hwp, {{"jones_phase", jones_phase}}, arm};
}

Component phase_shifter(Arm arm, double phi) {
    return {ComponentKind::phase_shifter, {{"phi", phi}}, arm};
}

Component beam_splitter(double alpha) {
    return {ComponentKind::beam_splitter, {{"alpha", alpha}}, std::nullopt};
}

Component l_splitter() {
    return {ComponentKind::l_splitter, {}, std::nullopt};
}

Component l_prime_splitter() {
    return {ComponentKind::l_prime_splitter, {}, std::nullopt};
}

Component pol_rotator(double angle) {
    return {ComponentKind::pol_rotator, {{"angle", angle}}, std::nullopt};
}

SpaceSignature component_factors(const Component &c) {
    switch (c.kind) {
        case ComponentKind::pbs:
            return basis::path().concat(basis::polarization());
        case ComponentKind::hwp:
            return c.arm ? basis::path().concat(basis::polarization()) : basis::polarization();
        case ComponentKind::phase_shifter:
        case ComponentKind::beam_splitter:
            return basis::path();
        case ComponentKind::l_splitter:
        case ComponentKind::l_prime_splitter:
            return basis::orbital();
        case ComponentKind::pol_rotator:
            return basis::polarization();
    }
    throw ValueError("unknown component kind");
}

Operator component_unitary(const Component &c, const SpaceSignature &sig) {
    auto needed = component_factors(c);
    for (const auto &f : needed.factors()) {
        if (!sig.contains(f.label)) {
            throw SignatureError(std::string(to_string(c.kind)) + " acts on '" + f.label + "', absent from " +
                                 sig.to_string());
        }
    }
    return extend(local_matrix(c), sig);
}

Pipeline::Pipeline(SpaceSignature signature) : signature_(std::move(signature)) {
}

Pipeline &Pipeline::then(Component c) {
    auto needed = component_factors(c);
    for (const auto &f : needed.factors()) {
        if (!signature_.contains(f.label)) {
            throw SignatureError("pipeline stage " + std::string(to_string(c.kind)) + " needs factor '" +
                                 f.label + "'");
        }
    }
    stages_.push_back(std::move(c));
    return *this;
}

Ket Pipeline::run(const Ket &input) const {
    Ket state = input;
    for (const auto &stage : stages_) {
        state = component_unitary(stage, signature_) * state;
    }
    return state;
}

Operator Pipeline::transfer() const {
    Operator total = Operator::identity(signature_);
    for (const auto &stage : stages_) {
        total = component_unitary(stage, signature_) * total;
    }
    return total;
}

Pipeline preselection_pipeline() {
    Pipeline p(basis::path().concat(basis::polarization()));
    p.then(pbs()).then(hwp(Arm::right, std::numbers::pi / 2)).then(phase_shifter(Arm::right, std::numbers::pi));
    return p;
}

Ket prepare_preselected(double theta) {
    if (!(theta > -std::numbers::pi && theta < std::numbers::pi)) {
        throw ValueError("theta must lie in (-pi, pi)");
    }
    Ket input = tensor(basis::arm(Arm::left), basis::linear_polarization(theta / 2));
    return preselection_pipeline().run(input);
}

std::string_view to_string(StateId id) {
    for (auto [s, name] : kStates) {
        if (s == id) {
            return name;
        }
    }
    return "?";
}

std::optional<StateId> parse_state_id(std::string_view name) {
    for (auto [s, n] : kStates) {
        if (n == name) {
            return s;
        }
    }
    return std::nullopt;
}

std::span<const StateId> all_states() {
    static const std::array ids{StateId::cheshire_in, StateId::cheshire_f, StateId::amp_in,
                                StateId::amp_f,       StateId::noisy_in,   StateId::noisy_f,
                                StateId::disembody_in, StateId::disembody_f};
    return ids;
}

bool uses_theta(StateId id) {
    return id == StateId::amp_in || id == StateId::disembody_in;
}

bool uses_alpha(StateId id) {
    return id == StateId::noisy_f || id == StateId::disembody_f;
}

SpaceSignature state_signature(StateId id) {
    switch (id) {
        case StateId::cheshire_in:
        case StateId::cheshire_f:
        case StateId::amp_in:
        case StateId::amp_f:
            return basis::path().concat(basis::polarization());
        case StateId::noisy_in:
        case StateId::noisy_f:
            return basis::orbital().concat(basis::polarization());
        case StateId::disembody_in:
        case StateId::disembody_f:
            return basis::path().concat(basis::orbital()).concat(basis::polarization());
    }
    throw ValueError("unknown state id");
}

Ket prepare_state(StateId id, const StateParams &params) {
    using namespace basis;
    auto need = [&](const std::optional<double> &v, const char *name) {
        if (!v) {
            throw ValueError(std::string(to_string(id)) + " requires parameter '" + name + "'");
        }
        return *v;
    };
    const double r2 = std::numbers::sqrt2;
    auto L = arm(Arm::left);
    auto R = arm(Arm::right);
    auto H = horizontal();
    auto V = vertical();
    switch (id) {
        case StateId::cheshire_in:
            return (tensor(L, H) * kI + tensor(R, H)) * (1.0 / r2);
        case StateId::cheshire_f:
        case StateId::amp_f:
            return (tensor(L, H) + tensor(R, V)) * (1.0 / r2);
        case StateId::amp_in:
            return prepare_preselected(need(params.theta, "theta"));
        case StateId::noisy_in: {
            Ket orbital_out = component_unitary(l_splitter(), orbital()) * v_a();
            return tensor(orbital_out, H);
        }
        case StateId::noisy_f: {
            double a = need(params.alpha, "alpha");
            return tensor(v_a(), H * std::cos(a) + V * std::sin(a));
        }
        case StateId::disembody_in: {
            Ket pre = prepare_preselected(need(params.theta, "theta"));
            Ket orbital_out = component_unitary(l_splitter(), orbital()) * v_a();
            return permute(tensor(pre, orbital_out), state_signature(id));
        }
        case StateId::disembody_f: {
            double a = need(params.alpha, "alpha");
            Ket lh = tensor(tensor(L, v_a()), H);
            Ket rv = tensor(tensor(R, v_a()), V);
            return lh * std::cos(a) + rv * std::sin(a);
        }
    }
    throw ValueError("unknown state id");
}

}  // namespace cheshire::optics

#include "cheshire/dynamics.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cheshire/basis.hpp"
#include "cheshire/errors.hpp"
#include "cheshire/optics.hpp"
#include "cheshire/weakvalue.hpp"

namespace cheshire {

namespace {

using basis::Arm;

constexpr std::array kVariantNames{
    std::pair{Variant::noiseless_kick, std::string_view("noiseless_kick")},
    std::pair{Variant::spin_orbit, std::string_view("spin_orbit")},
    std::pair{Variant::parallel_1, std::string_view("parallel_1")},
    std::pair{Variant::parallel_2, std::string_view("parallel_2")},
    std::pair{Variant::three_body, std::string_view("three_body")},
    std::pair{Variant::measure_sigma_zR, std::string_view("measure_sigma_zR")},
    std::pair{Variant::measure_sigma_zR_noisy, std::string_view("measure_sigma_zR_noisy")},
    std::pair{Variant::measure_sigma_zL_noisy, std::string_view("measure_sigma_zL_noisy")},
    std::pair{Variant::measure_LxSx_L, std::string_view("measure_LxSx_L")},
    std::pair{Variant::measure_LxSx_R, std::string_view("measure_LxSx_R")},
};

constexpr std::array kNoiseNames{
    std::pair{Noise::variant_default, std::string_view("default")},
    std::pair{Noise::none, std::string_view("none")},
    std::pair{Noise::spin_orbit, std::string_view("spin_orbit")},
    std::pair{Noise::parallel_1, std::string_view("parallel_1")},
    std::pair{Noise::parallel_2, std::string_view("parallel_2")},
};

template <typename Table, typename E>
std::string_view name_of(const Table &table, E value) {
    for (auto [v, n] : table) {
        if (v == value) {
            return n;
        }
    }
    return "?";
}

template <typename Table>
auto value_of(const Table &table, std::string_view name) -> std::optional<decltype(table[0].first)> {
    for (auto [v, n] : table) {
        if (n == name) {
            return v;
        }
    }
    return std::nullopt;
}

double sign_factor(SignConvention s) {
    return s == SignConvention::consistent ? 1.0 : -1.0;
}

Operator arm_op(Arm a, const Operator &op) {
    return tensor(basis::projector(a), op);
}

Operator lxsx() {
    return tensor(basis::l_x(), basis::sigma_x());
}

Operator noise_term(Noise n, const SpaceSignature &system) {
    switch (n) {
        case Noise::none:
        case Noise::variant_default:
            return Operator::zero(system);
        case Noise::spin_orbit:
            return extend(lxsx(), system);
        case Noise::parallel_1:
            return extend(tensor(basis::l_x(), basis::sigma_z()), system);
        case Noise::parallel_2:
            return extend(tensor(basis::l_z_restricted(), basis::sigma_z()), system);
    }
    return Operator::zero(system);
}

double spectral_norm(const CMatrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

std::vector<CMatrix> kick_blocks(const SystemCoupling &c, std::size_t half_width) {
    std::vector<CMatrix> out;
    out.reserve(2 * half_width + 1);
    for (std::size_t k = 0; k < 2 * half_width + 1; ++k) {
        double q = static_cast<double>(k) - static_cast<double>(half_width);
        out.push_back(c.kick_const.matrix() + q * c.kick_q.matrix());
    }
    return out;
}

}  // namespace

std::string_view to_string(Variant v) {
    return name_of(kVariantNames, v);
}

std::string_view to_string(SignConvention s) {
    return s == SignConvention::consistent ? "consistent" : "paper";
}

std::string_view to_string(Noise n) {
    return name_of(kNoiseNames, n);
}

std::optional<Variant> parse_variant(std::string_view name) {
    return value_of(kVariantNames, name);
}

std::optional<SignConvention> parse_sign(std::string_view name) {
    if (name == "consistent") return SignConvention::consistent;
    if (name == "paper") return SignConvention::paper;
    return std::nullopt;
}

std::optional<Noise> parse_noise(std::string_view name) {
    return value_of(kNoiseNames, name);
}

std::span<const Variant> all_variants() {
    static const auto ids = [] {
        std::array<Variant, kVariantNames.size()> a{};
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = kVariantNames[i].first;
        }
        return a;
    }();
    return ids;
}

void CouplingSpec::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(g) || g < 0.0) {
        throw ValueError("coupling g must be finite and non-negative");
    }
    if (!finite(g_prime) || g_prime < 0.0) {
        throw ValueError("coupling g_prime must be finite and non-negative");
    }
    if (!finite(t) || !(t > 0.0)) {
        throw ValueError("coupling duration t must be positive");
    }
    if (!finite(kick_time) || kick_time < 0.0 || kick_time > t) {
        throw ValueError("kick_time must lie in [0, t]");
    }
    if (!catalog::contains(observable)) {
        throw ValueError("unknown observable '" + observable + "'");
    }
}

bool CouplingSpec::in_regime() const {
    if (!(g > 0.0) || !(g_prime > 0.0)) {
        return false;
    }
    return t >= 10.0 * g / g_prime && 10.0 * t <= std::sqrt(g) / g_prime;
}

Noise CouplingSpec::effective_noise() const {
    if (noise != Noise::variant_default) {
        return noise;
    }
    switch (variant) {
        case Variant::spin_orbit:
        case Variant::measure_sigma_zR_noisy:
        case Variant::measure_sigma_zL_noisy:
        case Variant::measure_LxSx_L:
        case Variant::measure_LxSx_R:
            return Noise::spin_orbit;
        case Variant::parallel_1:
            return Noise::parallel_1;
        case Variant::parallel_2:
            return Noise::parallel_2;
        case Variant::noiseless_kick:
        case Variant::three_body:
        case Variant::measure_sigma_zR:
            return Noise::none;
    }
    return Noise::none;
}

SystemCoupling system_coupling(const CouplingSpec &spec, const SpaceSignature &system) {
    spec.validate();
    using namespace basis;
    Operator zero = Operator::zero(system);
    Operator k0 = zero;
    Operator k1 = zero;
    auto on = [&](const Operator &op) { return extend(op, system); };
    switch (spec.variant) {
        case Variant::noiseless_kick:
            k1 = catalog::observable(spec.observable, system, spec.g_prime * spec.t);
            break;
        case Variant::spin_orbit:
        case Variant::parallel_1:
        case Variant::parallel_2:
            k1 = on(sigma_z());
            break;
        case Variant::three_body:
            k1 = on(tensor(Operator::identity(orbital()), sigma_z()) - lxsx());
            break;
        case Variant::measure_sigma_zR:
        case Variant::measure_sigma_zR_noisy:
            k0 = on(arm_op(Arm::left, sigma_z()));
            k1 = on(arm_op(Arm::right, sigma_z()));
            break;
        case Variant::measure_sigma_zL_noisy:
            k0 = on(arm_op(Arm::right, sigma_z()));
            k1 = on(arm_op(Arm::left, sigma_z()));
            break;
        case Variant::measure_LxSx_L:
            k0 = on(arm_op(Arm::right, lxsx()));
            k1 = on(arm_op(Arm::left, lxsx()));
            break;
        case Variant::measure_LxSx_R:
            k0 = on(arm_op(Arm::left, lxsx()));
            k1 = on(arm_op(Arm::right, lxsx()));
            break;
    }
    Operator s = noise_term(spec.effective_noise(), system) * cplx(spec.g_prime);
    return {k0 * cplx(spec.g), k1 * cplx(spec.g), s};
}

Hamiltonian build_hamiltonian(const CouplingSpec &spec, const SpaceSignature &sig) {
    const auto &factors = sig.factors();
    if (factors.empty() || factors.back().label != labels::kMeter) {
        throw SignatureError("build_hamiltonian: signature must end with the meter factor, got " + sig.to_string());
    }
    std::size_t half_width = (factors.back().dim - 1) / 2;
    std::vector<Factor> sys(factors.begin(), factors.end() - 1);
    SpaceSignature system(sys);
    auto c = system_coupling(spec, system);
    auto meter_sig = basis::meter(half_width);
    Operator kick = tensor(c.kick_const, Operator::identity(meter_sig)) + tensor(c.kick_q, basis::position(half_width));
    Operator stat = tensor(c.static_term, Operator::identity(meter_sig));
    return {kick, stat};
}

MeterBlocks::MeterBlocks(SpaceSignature system, std::size_t half_width, std::vector<CMatrix> blocks)
    : system_(std::move(system)), half_width_(half_width), blocks_(std::move(blocks)) {
    if (blocks_.size() != 2 * half_width_ + 1) {
        throw ValueError("meter blocks: expected one block per grid point");
    }
}

SpaceSignature MeterBlocks::joint_signature() const {
    return system_.concat(basis::meter(half_width_));
}

Ket MeterBlocks::apply(const Ket &joint) const {
    if (!(joint.signature() == joint_signature())) {
        throw SignatureError("meter blocks: ket signature " + joint.signature().to_string() + " is not " +
                             joint_signature().to_string());
    }
    auto d = static_cast<Eigen::Index>(system_.dimension());
    auto m = static_cast<Eigen::Index>(blocks_.size());
    // Joint index is s * m + k; each block acts on the stride-m slice of one k.
    Eigen::Map<const CMatrix> in(joint.amplitudes().data(), m, d);
    CMatrix out(m, d);
    for (Eigen::Index k = 0; k < m; ++k) {
        out.row(k) = (blocks_[static_cast<std::size_t>(k)] * in.row(k).transpose()).transpose();
    }
    return Ket(joint.signature(), Eigen::Map<const CVector>(out.data(), m * d));
}

double MeterBlocks::distance(const MeterBlocks &other) const {
    if (!(system_ == other.system_) || blocks_.size() != other.blocks_.size()) {
        throw SignatureError("meter blocks: shapes differ");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        worst = std::max(worst, spectral_norm(blocks_[k] - other.blocks_[k]));
    }
    return worst;
}

Operator MeterBlocks::dense() const {
    auto d = static_cast<Eigen::Index>(system_.dimension());
    auto m = static_cast<Eigen::Index>(blocks_.size());
    CMatrix full = CMatrix::Zero(d * m, d * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto &b = blocks_[static_cast<std::size_t>(k)];
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                full(r * m + k, c * m + k) = b(r, c);
            }
        }
    }
    return Operator(joint_signature(), std::move(full));
}

MeterBlocks exact_blocks(const CouplingSpec &spec, const SpaceSignature &system, std::size_t half_width) {
    auto c = system_coupling(spec, system);
    double s = sign_factor(spec.sign);
    CMatrix before = mat_exp(c.static_term.matrix(), cplx(0.0, -spec.kick_time));
    CMatrix after = mat_exp(c.static_term.matrix(), cplx(0.0, -(spec.t - spec.kick_time)));
    auto blocks = kick_blocks(c, half_width);
    for (auto &b : blocks) {
        b = after * mat_exp(b, cplx(0.0, s)) * before;
    }
    return MeterBlocks(system, half_width, std::move(blocks));
}

MeterBlocks dyson2_blocks(const CouplingSpec &spec, const SpaceSignature &system, std::size_t half_width) {
    auto c = system_coupling(spec, system);
    double s = sign_factor(spec.sign);
    double t = spec.t;
    double tau = spec.kick_time;
    const CMatrix &S = c.static_term.matrix();
    auto d = static_cast<Eigen::Index>(system.dimension());
    CMatrix base = CMatrix::Identity(d, d) - kI * t * S - 0.5 * t * t * S * S;
    auto blocks = kick_blocks(c, half_width);
    for (auto &K : blocks) {
        K = base + kI * s * K + s * (t - tau) * S * K + s * tau * K * S;
    }
    return MeterBlocks(system, half_width, std::move(blocks));
}

Ket evolve_exact(const CouplingSpec &spec, const Ket &pre_system, const DiscreteGaussianMeter &meter) {
    auto blocks = exact_blocks(spec, pre_system.signature(), meter.half_width());
    return blocks.apply(tensor(pre_system, meter.ket()));
}

Ket evolve_dyson2(const CouplingSpec &spec, const Ket &pre_system, const DiscreteGaussianMeter &meter) {
    if (!spec.in_regime()) {
        std::ostringstream msg;
        msg << "Dyson truncation used outside g/g' << t << sqrt(g)/g' (g = " << spec.g << ", g' = " << spec.g_prime
            << ", t = " << spec.t << ")";
        warn(msg.str());
    }
    auto blocks = dyson2_blocks(spec, pre_system.signature(), meter.half_width());
    return blocks.apply(tensor(pre_system, meter.ket()));
}

Ket post_select_meter(const Ket &joint, const Ket &post_system) {
    Ket meter = partial_inner(post_system, joint);
    if (meter.norm() < 1e-14) {
        throw AnnihilatedState("post-selection annihilated the meter state");
    }
    return meter;
}

EffectiveWeakValueFit fit_effective_weak_value(const CVector &final_meter, const DiscreteGaussianMeter &reference,
                                               double g, double residual_threshold) {
    if (!(g > 0.0)) {
        throw ValueError("fit requires g > 0");
    }
    const CVector &ref = reference.amplitudes();
    if (final_meter.size() != ref.size()) {
        throw ValueError("fit: meter vector length differs from the reference grid");
    }
    if (!(final_meter.squaredNorm() > 0.0)) {
        throw AnnihilatedState("fit: meter vector is zero");
    }

    struct Point {
        double q, w, mag, phase;
    };
    std::vector<Point> pts;
    for (Eigen::Index k = 0; k < ref.size(); ++k) {
        double r = std::abs(ref(k));
        if (r <= kFitAmplitudeFloor || final_meter(k) == cplx(0.0)) {
            continue;
        }
        cplx z = final_meter(k) / ref(k);
        pts.push_back({reference.q(static_cast<std::size_t>(k)), r * r, std::log(std::abs(z)), std::arg(z)});
    }
    double sw = 0.0;
    double sw2 = 0.0;
    std::size_t heaviest = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        sw += pts[i].w;
        sw2 += pts[i].w * pts[i].w;
        if (pts[i].w > pts[heaviest].w) {
            heaviest = i;
        }
    }
    if (pts.size() < 2 || sw * sw / sw2 < 1.5) {
        throw IllConditionedFit("fit: weight concentrated on fewer than two grid points");
    }

    // Unwrap along q, then pin the heaviest point's phase to (-pi, pi].
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double jump = pts[i].phase - pts[i - 1].phase;
        pts[i].phase -= 2.0 * std::numbers::pi * std::round(jump / (2.0 * std::numbers::pi));
    }
    double shift = std::arg(std::polar(1.0, pts[heaviest].phase)) - pts[heaviest].phase;
    for (auto &p : pts) {
        p.phase += shift;
    }

    double mq = 0.0, mm = 0.0, mp = 0.0;
    for (const auto &p : pts) {
        mq += p.w * p.q;
        mm += p.w * p.mag;
        mp += p.w * p.phase;
    }
    mq /= sw;
    mm /= sw;
    mp /= sw;
    double sqq = 0.0, sqm = 0.0, sqp = 0.0;
    for (const auto &p : pts) {
        double dq = p.q - mq;
        sqq += p.w * dq * dq;
        sqm += p.w * dq * (p.mag - mm);
        sqp += p.w * dq * (p.phase - mp);
    }
    if (!(sqq > 0.0)) {
        throw IllConditionedFit("fit: no spread in q among weighted points");
    }
    double slope_mag = sqm / sqq;
    double slope_phase = sqp / sqq;

    EffectiveWeakValueFit fit;
    // log z = a + i g q A:  Re -> Re a - g q Im A,  Im -> Im a + g q Re A.
    fit.A_fit = cplx(slope_phase / g, -slope_mag / g);
    fit.a_fit = cplx(mm - slope_mag * mq, mp - slope_phase * mq);
    double ss = 0.0;
    for (const auto &p : pts) {
        cplx model = fit.a_fit + kI * g * p.q * fit.A_fit;
        ss += p.w * std::norm(cplx(p.mag, p.phase) - model);
    }
    fit.residual = std::sqrt(ss / sw);
    fit.accepted = fit.residual <= residual_threshold;
    fit.points = pts.size();
    return fit;
}

MeasurementOutcome measure(const CouplingSpec &spec, const Ket &pre, const Ket &post,
                           const DiscreteGaussianMeter &meter) {
    if (!(pre.signature() == post.signature())) {
        throw SignatureError("measure: pre " + pre.signature().to_string() + " and post " +
                             post.signature().to_string() + " differ");
    }
    cplx overlap = inner(post, pre);
    double modulus = std::abs(overlap) / (pre.norm() * post.norm());
    if (!(modulus > kOverlapThreshold)) {
        std::ostringstream msg;
        msg << "degenerate post-selection: |<post|pre>| = " << modulus;
        throw DegeneratePostselection(modulus, msg.str());
    }
    Ket joint = evolve_exact(spec, pre, meter);
    Ket final_meter = post_select_meter(joint, post);
    MeasurementOutcome out;
    out.overlap = overlap;
    out.readout = readout(final_meter.amplitudes());
    out.fit = fit_effective_weak_value(final_meter.amplitudes(), meter, spec.g);
    return out;
}

std::string_view to_string(DisembodiedTarget t) {
    switch (t) {
        case DisembodiedTarget::sigma_zR:
            return "sigma_zR";
        case DisembodiedTarget::sigma_zL:
            return "sigma_zL";
        case DisembodiedTarget::LxSx_L:
            return "LxSx_L";
        case DisembodiedTarget::LxSx_R:
            return "LxSx_R";
    }
    return "?";
}

Variant variant_for(DisembodiedTarget t) {
    switch (t) {
        case DisembodiedTarget::sigma_zR:
            return Variant::measure_sigma_zR_noisy;
        case DisembodiedTarget::sigma_zL:
            return Variant::measure_sigma_zL_noisy;
        case DisembodiedTarget::LxSx_L:
            return Variant::measure_LxSx_L;
        case DisembodiedTarget::LxSx_R:
            return Variant::measure_LxSx_R;
    }
    return Variant::measure_sigma_zR_noisy;
}

MeasurementOutcome disembodied_measurement(double theta, double alpha, DisembodiedTarget target, double g,
                                           double g_prime, double t, const DiscreteGaussianMeter &meter, Noise noise,
                                           SignConvention sign) {
    optics::StateParams p{theta, alpha};
    Ket pre = optics::prepare_state(optics::StateId::disembody_in, p);
    Ket post = optics::prepare_state(optics::StateId::disembody_f, p);
    CouplingSpec spec;
    spec.variant = variant_for(target);
    spec.g = g;
    spec.g_prime = g_prime;
    spec.t = t;
    spec.noise = noise;
    spec.sign = sign;
    return measure(spec, pre, post, meter);
}

double dyson_operator_error(const CouplingSpec &spec, const SpaceSignature &system, std::size_t half_width) {
    return exact_blocks(spec, system, half_width).distance(dyson2_blocks(spec, system, half_width));
}

double dyson_state_error(const CouplingSpec &spec, const Ket &joint) {
    const auto &factors = joint.signature().factors();
    if (factors.empty() || factors.back().label != labels::kMeter) {
        throw SignatureError("dyson_state_error: joint ket must end with the meter factor");
    }
    std::size_t half_width = (factors.back().dim - 1) / 2;
    SpaceSignature system(std::vector<Factor>(factors.begin(), factors.end() - 1));
    auto exact = exact_blocks(spec, system, half_width).apply(joint);
    auto dyson = dyson2_blocks(spec, system, half_width).apply(joint);
    return (exact.amplitudes() - dyson.amplitudes()).norm();
}

}  // namespace cheshire

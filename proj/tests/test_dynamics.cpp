#include "cheshire/dynamics.hpp"

#include <random>

#include "gtest/gtest.h"

#include "cheshire/errors.hpp"
#include "cheshire/weakvalue.hpp"
#include "oracle.hpp"

using namespace cheshire;
using optics::StateId;

namespace {

constexpr double kPi = std::numbers::pi;

const SpaceSignature kOrbPol = basis::orbital().concat(basis::polarization());
const SpaceSignature kPathPol = basis::path().concat(basis::polarization());
const SpaceSignature kFull = basis::path().concat(basis::orbital()).concat(basis::polarization());

oracle::Mat q_diag(int N) {
    oracle::Mat q = oracle::Mat::Zero(2 * N + 1, 2 * N + 1);
    for (int k = -N; k <= N; ++k) q(k + N, k + N) = double(k);
    return q;
}

oracle::Mat storage(const oracle::Mat &hv) {
    oracle::Mat t = oracle::to_storage_last(static_cast<int>(hv.rows() / 2));
    return t * hv * t.adjoint();
}

/// Hand-evolved post-selected meter for the spin-orbit setup, kick at time zero:
/// m_k = <f| exp(-i g' t S) exp(i g q_k sigma_z) |in> phi_k, S = L_x x sigma_x with S^2 = 1.
oracle::Vec spin_orbit_meter(double alpha, double g, double gpt, int N, double delta) {
    using namespace oracle;
    Mat S = kron(Lx(), sx());
    Mat Z = kron(eye(2), sz());
    Mat noise = std::cos(gpt) * eye(4) - I * std::sin(gpt) * S;
    Vec phi = gaussian(N, delta);
    Vec out(2 * N + 1);
    for (int k = -N; k <= N; ++k) {
        double a = g * k;
        Mat kick = std::cos(a) * eye(4) + I * std::sin(a) * Z;
        out(k + N) = noisy_f(alpha).dot(noise * kick * noisy_in()) * phi(k + N);
    }
    return out;
}

}  // namespace

TEST(names, round_trip) {
    for (auto v : all_variants()) ASSERT_EQ(parse_variant(to_string(v)), v);
    ASSERT_EQ(parse_sign("paper"), SignConvention::paper);
    ASSERT_EQ(parse_noise("default"), Noise::variant_default);
    ASSERT_EQ(parse_noise("parallel_2"), Noise::parallel_2);
    ASSERT_FALSE(parse_variant("H3").has_value());
}

TEST(spec, validation_and_regime) {
    CouplingSpec s;
    s.validate();
    s.kick_time = 2.0;
    ASSERT_THROW(s.validate(), ValueError);
    s.kick_time = 0.0;
    s.t = 0.0;
    ASSERT_THROW(s.validate(), ValueError);
    s.t = 1.0;
    s.g = -1.0;
    ASSERT_THROW(s.validate(), ValueError);

    CouplingSpec r;
    r.g = 1e-6;
    r.g_prime = 1e-4;
    r.t = 1.0;  // g/g' = 0.01, sqrt(g)/g' = 10
    ASSERT_TRUE(r.in_regime());
    r.t = 5.0;
    ASSERT_FALSE(r.in_regime());
}

TEST(hamiltonian, noiseless_kick) {
    CouplingSpec s;
    s.variant = Variant::noiseless_kick;
    s.g = 0.2;
    auto sig = kPathPol.concat(basis::meter(2));
    auto h = build_hamiltonian(s, sig);
    oracle::Mat expected = s.g * oracle::kron(oracle::kron(oracle::eye(2), storage(oracle::sz())), q_diag(2));
    ASSERT_LT((h.kick.matrix() - expected).norm(), 1e-14);
    ASSERT_LT(h.static_term.matrix().norm(), 1e-15);
}

TEST(hamiltonian, spin_orbit_static_term) {
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    s.g_prime = 0.3;
    auto h = build_hamiltonian(s, kOrbPol.concat(basis::meter(1)));
    oracle::Mat expected = s.g_prime * oracle::kron(storage(oracle::kron(oracle::Lx(), oracle::sx())), oracle::eye(3));
    ASSERT_LT((h.static_term.matrix() - expected).norm(), 1e-14);
}

TEST(hamiltonian, right_arm_measurement_structure) {
    using namespace oracle;
    CouplingSpec s;
    s.variant = Variant::measure_sigma_zR_noisy;
    s.g = 0.1;
    s.g_prime = 0.2;
    auto h = build_hamiltonian(s, kFull.concat(basis::meter(1)));
    Mat t = to_storage_last(4);
    Mat zl = t * kron(kron(PL(), eye(2)), sz()) * t.adjoint();
    Mat zr = t * kron(kron(PR(), eye(2)), sz()) * t.adjoint();
    Mat kick = s.g * (kron(zl, eye(3)) + kron(zr, q_diag(1)));
    Mat stat = s.g_prime * kron(Mat(t * kron(kron(eye(2), Lx()), sx()) * t.adjoint()), eye(3));
    ASSERT_LT((h.kick.matrix() - kick).norm(), 1e-14);
    ASSERT_LT((h.static_term.matrix() - stat).norm(), 1e-14);
}

TEST(hamiltonian, meter_must_be_last) {
    CouplingSpec s;
    ASSERT_THROW(build_hamiltonian(s, basis::meter(2).concat(kPathPol)), SignatureError);
}

TEST(blocks, match_dense_exponential) {
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    s.g = 0.05;
    s.g_prime = 0.3;
    s.t = 1.5;
    s.kick_time = 0.4;
    auto sig = kOrbPol.concat(basis::meter(2));
    auto h = build_hamiltonian(s, sig);
    CMatrix u = mat_exp(h.static_term.matrix(), cplx(0, -(s.t - s.kick_time))) * mat_exp(h.kick.matrix(), kI) *
                mat_exp(h.static_term.matrix(), cplx(0, -s.kick_time));
    // Dense layout is system x meter; block k is the (k, k) meter slice.
    auto dense = exact_blocks(s, kOrbPol, 2).dense().matrix();
    ASSERT_LT((dense - u).norm(), 1e-12);
}

TEST(evolve, zero_coupling_is_identity) {
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    s.g = 0;
    s.g_prime = 0;
    auto meter = make_meter(8, 2.0);
    auto pre = optics::prepare_state(StateId::noisy_in);
    auto joint = evolve_exact(s, pre, meter);
    ASSERT_LT((joint.amplitudes() - tensor(pre, meter.ket()).amplitudes()).norm(), 1e-15);
}

TEST(evolve, conserves_norm) {
    std::mt19937 rng(47);
    std::normal_distribution<double> d;
    for (auto v : all_variants()) {
        CouplingSpec s;
        s.variant = v;
        s.g = 0.01;
        s.g_prime = 0.2;
        s.t = 1.0;
        s.kick_time = 0.3;
        auto meter = make_meter(16, 2.0);
        CVector amps(8);
        for (auto &x : amps) x = cplx(d(rng), d(rng));
        Ket pre = Ket(kFull, amps).normalized();
        auto joint = evolve_exact(s, pre, meter);
        ASSERT_NEAR(joint.norm(), 1.0, 1e-12) << to_string(v);
    }
}

TEST(evolve, kick_time_irrelevant_without_static_term) {
    auto meter = make_meter(16, 2.0);
    auto pre = optics::prepare_state(StateId::cheshire_in);
    CouplingSpec s;
    s.variant = Variant::measure_sigma_zR;
    s.g = 0.02;
    s.t = 2.0;
    auto base = evolve_exact(s, pre, meter);
    for (double tau : {1.0, 2.0}) {
        s.kick_time = tau;
        ASSERT_LT((evolve_exact(s, pre, meter).amplitudes() - base.amplitudes()).norm(), 1e-14);
    }
}

TEST(post_select, orthogonal_post_annihilates) {
    auto meter = make_meter(4, 1.0);
    auto joint = tensor(tensor(basis::arm(basis::Arm::left), basis::horizontal()), meter.ket());
    auto post = tensor(basis::arm(basis::Arm::right), basis::horizontal());
    ASSERT_THROW(post_select_meter(joint, post), AnnihilatedState);
}

TEST(post_select, cheshire_meter_first_order) {
    // Noiseless sigma_z^R kick, (sigma_z^R)_w = 1: meter ~ <f|i> (1 + i g q) phi.
    int N = 32;
    double g = 1e-4;
    auto meter = make_meter(N, 3.0);
    CouplingSpec s;
    s.variant = Variant::measure_sigma_zR;
    s.g = g;
    auto pre = optics::prepare_state(StateId::cheshire_in);
    auto post = optics::prepare_state(StateId::cheshire_f);
    auto m = post_select_meter(evolve_exact(s, pre, meter), post);
    cplx overlap = inner(post, pre);
    for (int k = -N; k <= N; ++k) {
        cplx expected = overlap * (1.0 + kI * g * double(k)) * meter.amplitudes()(k + N);
        ASSERT_LT(std::abs(m[k + N] - expected), 10 * g * g * (1.0 + k * k) * std::abs(meter.amplitudes()(k + N)) + 1e-15);
    }
}

TEST(post_select, spin_orbit_matches_hand_evolution) {
    int N = 64;
    double delta = 4.0, g = 1e-3, gp = 0.1, alpha = kPi / 4;
    auto meter = make_meter(N, delta);
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    s.g = g;
    s.g_prime = gp;
    auto m = post_select_meter(evolve_exact(s, optics::prepare_state(StateId::noisy_in),
                                            meter),
                               optics::prepare_state(StateId::noisy_f, {std::nullopt, alpha}));
    auto hand = spin_orbit_meter(alpha, g, gp, N, delta);
    // Storage and {H, V} differ by a unitary on polarization only, so the meter ket is basis free.
    ASSERT_LT((m.amplitudes() - hand).norm(), 1e-13);
}

TEST(fit, reference_against_itself) {
    auto meter = make_meter(64, 4.0);
    auto f = fit_effective_weak_value(meter.amplitudes(), meter, 1e-3);
    ASSERT_LT(std::abs(f.A_fit), 1e-12);
    ASSERT_LT(std::abs(f.a_fit), 1e-12);
    ASSERT_LT(f.residual, 1e-12);
    ASSERT_TRUE(f.accepted);
}

TEST(fit, synthetic_round_trip) {
    int N = 64;
    auto meter = make_meter(N, 4.0);
    double g = 1e-3;
    cplx A(1.0, 0.5), a(-0.3, 0.8);
    CVector v = meter.amplitudes();
    for (int k = -N; k <= N; ++k) v(k + N) *= std::exp(a + kI * g * double(k) * A);
    auto f = fit_effective_weak_value(v, meter, g);
    ASSERT_LT(std::abs(f.A_fit - A), 1e-10);
    ASSERT_LT(std::abs(f.a_fit - a), 1e-10);
}

TEST(fit, phase_unwrapping_for_large_shifts) {
    int N = 64;
    auto meter = make_meter(N, 4.0);
    double g = 0.2;
    cplx A(3.0, 0.1);
    CVector v = meter.amplitudes();
    for (int k = -N; k <= N; ++k) v(k + N) *= std::exp(kI * g * double(k) * A);
    ASSERT_LT(std::abs(fit_effective_weak_value(v, meter, g).A_fit - A), 1e-9);
}

TEST(fit, errors) {
    auto meter = make_meter(8, 1.0);
    ASSERT_THROW(fit_effective_weak_value(meter.amplitudes(), meter, 0.0), ValueError);
    ASSERT_THROW(fit_effective_weak_value(CVector::Zero(17), meter, 1e-3), AnnihilatedState);
    // All weight on one grid point.
    auto spike = make_meter(8, 0.05);
    ASSERT_THROW(fit_effective_weak_value(spike.amplitudes(), spike, 1e-3), IllConditionedFit);
}

TEST(fit, noisy_residual_rejected) {
    auto meter = make_meter(32, 3.0);
    CVector v = meter.amplitudes();
    for (int k = 0; k < v.size(); ++k) v(k) *= (k % 2 ? 1.5 : 0.5);
    auto f = fit_effective_weak_value(v, meter, 1e-3);
    ASSERT_FALSE(f.accepted);
    ASSERT_GT(f.residual, kFitResidualThreshold);
}

TEST(measure, pointer_shift_follows_weak_value) {
    auto meter = make_meter(64, 4.0);
    CouplingSpec s;
    s.variant = Variant::measure_sigma_zR;
    double theta = kPi / 3;
    auto pre = optics::prepare_state(StateId::amp_in, {theta, std::nullopt});
    auto post = optics::prepare_state(StateId::amp_f);
    double aw = std::tan(theta / 2);
    std::vector<double> ratio;
    for (double g : {1e-2, 5e-3, 2.5e-3}) {
        s.g = g;
        ratio.push_back(measure(s, pre, post, meter).readout.mean_p / g);
    }
    double r1 = 2 * ratio[1] - ratio[0], r2 = 2 * ratio[2] - ratio[1];
    double limit = (4 * r2 - r1) / 3;
    ASSERT_NEAR(limit, aw, 1e-3 * aw);
}

TEST(measure, spin_orbit_fit_matches_hand_slope) {
    int N = 64;
    double delta = 4.0, g = 1e-3, gp = 0.05, alpha = kPi / 3;
    auto meter = make_meter(N, delta);
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    s.g = g;
    s.g_prime = gp;
    auto out = measure(s, optics::prepare_state(StateId::noisy_in),
                       optics::prepare_state(StateId::noisy_f, {std::nullopt, alpha}), meter);
    auto hand = spin_orbit_meter(alpha, g, gp, N, delta);
    auto phi = oracle::gaussian(N, delta);
    // Central finite difference of log(m_k / phi_k).
    cplx slope = (std::log(hand(N + 1) / phi(N + 1)) - std::log(hand(N - 1) / phi(N - 1))) / 2.0;
    cplx A_hand = slope / (kI * g);
    ASSERT_LT(std::abs(out.fit.A_fit - A_hand), 1e-3 * std::abs(A_hand));
    // Leading order of the exact evolution: i tan(alpha) exp(2 i g' t).
    cplx lead = kI * std::tan(alpha) * std::exp(2.0 * kI * gp);
    ASSERT_LT(std::abs(out.fit.A_fit - lead), 1e-3 * std::abs(lead));
}

TEST(measure, degenerate_pair) {
    auto meter = make_meter(16, 2.0);
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    ASSERT_THROW(measure(s, optics::prepare_state(StateId::noisy_in),
                         optics::prepare_state(StateId::noisy_f, {std::nullopt, kPi / 2}), meter),
                 DegeneratePostselection);
}

TEST(disembodied, fits_track_weak_values) {
    auto meter = make_meter(64, 4.0);
    for (auto [theta, alpha] : {std::pair{kPi / 2, kPi / 4}, {2 * kPi / 3, kPi / 3}}) {
        auto table = disembodiment_table(theta, alpha);
        auto zr = disembodied_measurement(theta, alpha, DisembodiedTarget::sigma_zR, 1e-3, 1e-3, 1.0, meter);
        auto lx = disembodied_measurement(theta, alpha, DisembodiedTarget::LxSx_L, 1e-3, 1e-3, 1.0, meter);
        auto lxr = disembodied_measurement(theta, alpha, DisembodiedTarget::LxSx_R, 1e-3, 1e-3, 1.0, meter);
        ASSERT_LT(std::abs(zr.fit.A_fit - table[1].value), 0.02 * std::abs(table[1].value));
        ASSERT_LT(std::abs(lx.fit.A_fit - table[2].value), 0.01 * std::abs(table[2].value));
        ASSERT_LT(std::abs(lxr.fit.A_fit), 1e-3);
    }
}

TEST(disembodied, sign_convention_flips_fit) {
    auto meter = make_meter(64, 4.0);
    auto a = disembodied_measurement(kPi / 2, kPi / 4, DisembodiedTarget::sigma_zR, 1e-3, 1e-3, 1.0, meter);
    auto b = disembodied_measurement(kPi / 2, kPi / 4, DisembodiedTarget::sigma_zR, 1e-3, 1e-3, 1.0, meter,
                                     Noise::variant_default, SignConvention::paper);
    ASSERT_LT(std::abs(a.fit.A_fit + b.fit.A_fit), 1e-6);
}

TEST(dyson, paper_sign_matches_printed_expansion) {
    // 1 - i(K + S t) - [t S K + S^2 t^2 / 2], K = g sigma_z q, S = g' L_x sigma_x.
    using namespace oracle;
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    s.g = 0.01;
    s.g_prime = 0.05;
    s.t = 1.0;
    s.sign = SignConvention::paper;
    int N = 3;
    auto blocks = dyson2_blocks(s, kOrbPol, N);
    Mat S = storage(s.g_prime * kron(Lx(), sx()));
    Mat Z = storage(kron(eye(2), sz()));
    for (int k = -N; k <= N; ++k) {
        Mat K = s.g * double(k) * Z;
        Mat hand = eye(4) - I * (K + S * s.t) - (s.t * S * K + S * S * s.t * s.t / 2.0);
        ASSERT_LT((blocks.blocks()[k + N] - hand).norm(), 1e-15);
    }
}

TEST(dyson, no_static_term_is_single_kick) {
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    s.g = 0.01;
    s.g_prime = 0.0;
    auto blocks = dyson2_blocks(s, kOrbPol, 2);
    oracle::Mat Z = storage(oracle::kron(oracle::eye(2), oracle::sz()));
    for (int k = -2; k <= 2; ++k) {
        oracle::Mat hand = oracle::eye(4) + oracle::I * s.g * double(k) * Z;
        ASSERT_LT((blocks.blocks()[k + 2] - hand).norm(), 1e-15);
    }
}

TEST(dyson, error_shrinks_with_coupling) {
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    s.kick_time = 0.0;
    std::vector<double> errs;
    for (int octave = 0; octave < 5; ++octave) {
        double f = std::pow(0.5, octave);
        s.g = 1e-5 * f;
        s.g_prime = 0.05 * f;
        errs.push_back(dyson_operator_error(s, kOrbPol, 64));
    }
    double slope = std::log(errs.front() / errs.back()) / std::log(16.0);
    ASSERT_GE(slope, 2.5);
}

TEST(dyson, norm_deviation_is_second_order) {
    auto meter = make_meter(16, 2.0);
    auto pre = optics::prepare_state(StateId::noisy_in);
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    double previous = 1.0;
    for (double f : {1.0, 0.5, 0.25, 0.125}) {
        s.g = 1e-3 * f;
        s.g_prime = 0.1 * f;
        double dev = std::abs(evolve_dyson2(s, pre, meter).norm() - 1.0);
        double scale = s.g + s.g_prime * s.t;
        ASSERT_LT(dev, scale * scale);
        ASSERT_LT(dev, previous / 4);
        previous = dev;
    }
}

TEST(dyson, state_error_below_operator_error) {
    CouplingSpec s;
    s.variant = Variant::spin_orbit;
    s.g = 1e-4;
    s.g_prime = 0.05;
    auto meter = make_meter(16, 2.0);
    auto joint = tensor(optics::prepare_state(StateId::noisy_in), meter.ket());
    ASSERT_LE(dyson_state_error(s, joint), dyson_operator_error(s, kOrbPol, 16) + 1e-15);
}

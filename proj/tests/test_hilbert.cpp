#include "cheshire/hilbert.hpp"

#include <random>

#include "gtest/gtest.h"

#include "cheshire/basis.hpp"
#include "cheshire/errors.hpp"
#include "oracle.hpp"

using namespace cheshire;

namespace {

SpaceSignature sig(std::initializer_list<Factor> f) {
    return SpaceSignature(f);
}

CMatrix random_matrix(std::mt19937 &rng, int n) {
    std::normal_distribution<double> d;
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
    return m;
}

CVector random_vector(std::mt19937 &rng, int n) {
    std::normal_distribution<double> d;
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(d(rng), d(rng));
    return v;
}

}  // namespace

TEST(signature, digits_round_trip) {
    auto s = sig({{"a", 2}, {"b", 3}, {"c", 4}});
    ASSERT_EQ(s.dimension(), 24u);
    for (std::size_t flat = 0; flat < 24; ++flat) {
        auto d = s.digits(flat);
        ASSERT_EQ(s.flat_index(d), flat);
    }
    auto d = s.digits(1 * 12 + 2 * 4 + 3);
    ASSERT_EQ(d, (std::vector<std::size_t>{1, 2, 3}));
}

TEST(signature, concat_rejects_repeated_label) {
    ASSERT_THROW(basis::path().concat(basis::path()), SignatureError);
    auto s = basis::path().concat(basis::orbital()).concat(basis::polarization());
    ASSERT_EQ(s.without(basis::orbital()), basis::path().concat(basis::polarization()));
}

TEST(tensor, identity_product) {
    auto a = Operator::identity(sig({{"a", 2}}));
    auto b = Operator::identity(sig({{"b", 3}}));
    auto ab = tensor(a, b);
    ASSERT_EQ(ab.dimension(), 6u);
    ASSERT_TRUE(ab.matrix().isApprox(CMatrix::Identity(6, 6)));
}

TEST(tensor, basis_product) {
    auto k = tensor(basis::arm(basis::Arm::left), basis::horizontal());
    auto hv = basis::hv_to_storage();
    // |L> x |H> has amplitude only on the L block.
    ASSERT_NEAR(std::abs(k[0] - hv(0, 0)), 0.0, 1e-15);
    ASSERT_NEAR(std::abs(k[1] - hv(1, 0)), 0.0, 1e-15);
    ASSERT_EQ(k[2], cplx(0.0));
    ASSERT_EQ(k[3], cplx(0.0));
}

TEST(tensor, projector_times_sigma_z) {
    auto m = tensor(basis::projector(basis::Arm::left), basis::sigma_z()).matrix();
    CMatrix expected = CMatrix::Zero(4, 4);
    expected(0, 0) = 1.0;
    expected(1, 1) = -1.0;
    ASSERT_TRUE(m.isApprox(expected));
}

TEST(tensor, matches_brute_force_kronecker) {
    std::mt19937 rng(7);
    auto sa = sig({{"a", 2}});
    auto sb = sig({{"b", 3}});
    Operator A(sa, random_matrix(rng, 2));
    Operator B(sb, random_matrix(rng, 3));
    ASSERT_LT((tensor(A, B).matrix() - oracle::kron(A.matrix(), B.matrix())).norm(), 1e-14);
    Ket a(sa, random_vector(rng, 2));
    Ket b(sb, random_vector(rng, 3));
    CVector ab = oracle::kron(CVector(a.amplitudes()), CVector(b.amplitudes()));
    ASSERT_LT((tensor(a, b).amplitudes() - ab).norm(), 1e-14);
}

TEST(tensor, associativity) {
    std::mt19937 rng(11);
    Ket a(sig({{"a", 2}}), random_vector(rng, 2));
    Ket b(sig({{"b", 3}}), random_vector(rng, 3));
    Ket c(sig({{"c", 2}}), random_vector(rng, 2));
    auto left = tensor(tensor(a, b), c);
    auto right = tensor(a, tensor(b, c));
    ASSERT_EQ(left.signature(), right.signature());
    ASSERT_LT((left.amplitudes() - right.amplitudes()).norm(), 1e-14);
}

TEST(extend, pads_with_identities) {
    auto full = basis::path().concat(basis::orbital()).concat(basis::polarization());
    auto e = extend(basis::sigma_z(), full);
    CMatrix expected = oracle::kron(oracle::eye(4), basis::sigma_z().matrix());
    ASSERT_LT((e.matrix() - expected).norm(), 1e-15);

    auto pr = extend(basis::projector(basis::Arm::right), basis::path().concat(basis::polarization()));
    ASSERT_LT((pr.matrix() - oracle::kron(oracle::PR(), oracle::eye(2))).norm(), 1e-15);
}

TEST(extend, spin_orbit_term_on_four_factors) {
    auto lxsx = tensor(basis::l_x(), basis::sigma_x());
    auto full = basis::path().concat(basis::orbital()).concat(basis::polarization()).concat(basis::meter(2));
    auto e = extend(lxsx, full);
    CMatrix expected = oracle::kron(oracle::kron(oracle::eye(2), lxsx.matrix()), oracle::eye(5));
    ASSERT_LT((e.matrix() - expected).norm(), 1e-15);
}

TEST(extend, respects_target_order) {
    // Operator on (polarization, path) placed into (path, polarization).
    auto op = tensor(basis::sigma_x(), basis::projector(basis::Arm::left));
    auto e = extend(op, basis::path().concat(basis::polarization()));
    auto expected = tensor(basis::projector(basis::Arm::left), basis::sigma_x());
    ASSERT_LT((e.matrix() - expected.matrix()).norm(), 1e-15);
}

TEST(extend, missing_factor_throws) {
    ASSERT_THROW(extend(basis::l_x(), basis::path().concat(basis::polarization())), SignatureError);
}

TEST(extend, is_a_homomorphism) {
    std::mt19937 rng(3);
    auto local = basis::orbital().concat(basis::polarization());
    auto full = basis::path().concat(basis::orbital()).concat(basis::polarization());
    for (int trial = 0; trial < 10; ++trial) {
        Operator A(local, random_matrix(rng, 4));
        Operator B(local, random_matrix(rng, 4));
        auto lhs = extend(A * B, full).matrix();
        auto rhs = (extend(A, full) * extend(B, full)).matrix();
        ASSERT_LT((lhs - rhs).norm(), 1e-12 * (1 + lhs.norm()));
    }
}

TEST(inner, basics) {
    ASSERT_NEAR(std::abs(inner(basis::horizontal(), basis::horizontal()) - 1.0), 0.0, 1e-15);
    ASSERT_NEAR(std::abs(inner(basis::horizontal(), basis::vertical())), 0.0, 1e-15);
    ASSERT_THROW(inner(basis::horizontal(), basis::v_a()), SignatureError);
}

TEST(inner, cheshire_overlap) {
    // <(|LH> + |RV>)/sqrt2 | (i|LH> + |RH>)/sqrt2> = i/2
    auto L = basis::arm(basis::Arm::left);
    auto R = basis::arm(basis::Arm::right);
    auto H = basis::horizontal();
    auto V = basis::vertical();
    auto pre = (tensor(L, H) * kI + tensor(R, H)) * (1 / std::numbers::sqrt2);
    auto post = (tensor(L, H) + tensor(R, V)) * (1 / std::numbers::sqrt2);
    auto z = inner(post, pre);
    ASSERT_NEAR(z.real(), 0.0, 1e-15);
    ASSERT_NEAR(z.imag(), 0.5, 1e-15);
}

TEST(inner, conjugate_linear_in_bra) {
    auto z = inner(basis::horizontal() * kI, basis::horizontal());
    ASSERT_NEAR(std::abs(z - cplx(0, -1)), 0.0, 1e-15);
}

TEST(partial_inner, contracts_named_factors) {
    std::mt19937 rng(5);
    Ket m(basis::meter(2), random_vector(rng, 5));
    auto joint = tensor(tensor(basis::arm(basis::Arm::left), basis::horizontal()), m);
    auto bra = tensor(basis::arm(basis::Arm::left), basis::horizontal());
    auto out = partial_inner(bra, joint);
    ASSERT_EQ(out.signature(), basis::meter(2));
    ASSERT_LT((out.amplitudes() - m.amplitudes()).norm(), 1e-14);
}

TEST(permute, reorders_factors) {
    auto k = tensor(basis::horizontal(), basis::arm(basis::Arm::right));
    auto p = permute(k, basis::path().concat(basis::polarization()));
    auto expected = tensor(basis::arm(basis::Arm::right), basis::horizontal());
    ASSERT_LT((p.amplitudes() - expected.amplitudes()).norm(), 1e-15);
}

TEST(ket, normalized_and_phase_equality) {
    auto k = (basis::horizontal() * 3.0).normalized();
    ASSERT_TRUE(k.is_normalized());
    ASSERT_NEAR(k.norm(), 1.0, 1e-15);
    ASSERT_TRUE(equal_up_to_phase(k, basis::horizontal() * std::polar(1.0, 0.7)));
    ASSERT_FALSE(equal_up_to_phase(k, basis::vertical()));
    ASSERT_THROW((basis::horizontal() * 0.0).normalized(), AnnihilatedState);
}

TEST(operator_kind, checked_at_construction) {
    CMatrix m(2, 2);
    m << 0, 1, 0, 0;
    ASSERT_THROW(Operator(basis::polarization(), m, OperatorKind::hermitian), ValueError);
    ASSERT_THROW(Operator(basis::polarization(), m, OperatorKind::unitary), ValueError);
    ASSERT_THROW(Operator(basis::polarization(), CMatrix::Identity(3, 3)), SignatureError);
}

TEST(mat_exp, zero_gives_identity) {
    auto z = Operator::zero(basis::polarization());
    ASSERT_TRUE(mat_exp(z, cplx(0, -3.0)).matrix().isApprox(CMatrix::Identity(2, 2)));
}

TEST(mat_exp, sigma_z_quarter_turn) {
    auto u = mat_exp(basis::sigma_z(), cplx(0, -std::numbers::pi / 2)).matrix();
    ASSERT_NEAR(std::abs(u(0, 0) - cplx(0, -1)), 0.0, 1e-14);
    ASSERT_NEAR(std::abs(u(1, 1) - cplx(0, 1)), 0.0, 1e-14);
    ASSERT_NEAR(std::abs(u(0, 1)), 0.0, 1e-14);
}

TEST(mat_exp, hermitian_generators_give_unitaries) {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> tdist(-10, 10);
    for (int n : {2, 4, 8, 12}) {
        for (int trial = 0; trial < 5; ++trial) {
            CMatrix a = random_matrix(rng, n);
            CMatrix h = a + a.adjoint();
            h *= 10.0 / h.operatorNorm();
            double t = tdist(rng);
            CMatrix u = mat_exp(h, cplx(0, -t));
            ASSERT_LT((u.adjoint() * u - CMatrix::Identity(n, n)).norm(), 1e-10);
        }
    }
}

TEST(mat_exp, general_matrix_matches_series) {
    std::mt19937 rng(17);
    CMatrix a = random_matrix(rng, 4) * 0.1;
    CMatrix series = CMatrix::Identity(4, 4);
    CMatrix term = CMatrix::Identity(4, 4);
    for (int k = 1; k < 30; ++k) {
        term = term * a / double(k);
        series += term;
    }
    ASSERT_LT((mat_exp(a, 1.0) - series).norm(), 1e-13);
}

TEST(mat_exp, rejects_non_finite) {
    CMatrix m = CMatrix::Identity(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    ASSERT_THROW(mat_exp(m, 1.0), ValueError);
}

TEST(dft, uniform_maps_to_zero_momentum) {
    int M = 9;
    CVector v = CVector::Constant(M, 1.0 / std::sqrt(double(M)));
    auto p = dft_q_to_p(v);
    for (int l = 0; l < M; ++l) {
        ASSERT_NEAR(std::abs(p(l)), l == 4 ? 1.0 : 0.0, 1e-14);
    }
}

TEST(dft, matches_direct_sum) {
    std::mt19937 rng(19);
    for (int N : {1, 4, 31}) {
        CVector v = random_vector(rng, 2 * N + 1);
        ASSERT_LT((dft_q_to_p(v) - oracle::dft(v)).norm(), 1e-12 * v.norm());
    }
}

TEST(dft, round_trip_and_unitarity) {
    std::mt19937 rng(23);
    for (int N : {1, 16, 64, 512}) {
        CVector a = random_vector(rng, 2 * N + 1);
        CVector b = random_vector(rng, 2 * N + 1);
        CVector pa = dft_q_to_p(a);
        CVector pb = dft_q_to_p(b);
        ASSERT_LT((dft_p_to_q(pa) - a).norm(), 1e-12 * a.norm());
        ASSERT_LT(std::abs(pa.dot(pb) - a.dot(b)), 1e-12 * a.norm() * b.norm());
        ASSERT_NEAR(pa.norm(), a.norm(), 1e-12 * a.norm());
    }
}

TEST(dft, even_length_rejected) {
    ASSERT_THROW(dft_q_to_p(CVector::Ones(4)), ValueError);
}

TEST(dft, gaussian_momentum_variance) {
    int N = 32;
    double delta = 2.0;
    CVector p = dft_q_to_p(oracle::gaussian(N, delta));
    double mean = 0, second = 0;
    for (int l = -N; l <= N; ++l) {
        double pl = 2 * std::numbers::pi * l / (2 * N + 1);
        double w = std::norm(p(l + N));
        mean += w * pl;
        second += w * pl * pl;
    }
    double var = second - mean * mean;
    ASSERT_NEAR(var, 1.0 / (4 * delta * delta), 1e-3 / (4 * delta * delta));
}

#include "cheshire/basis.hpp"

#include <cmath>
#include <numbers>

namespace cheshire::basis {

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

Ket two_level(SpaceSignature sig, cplx a, cplx b) {
    CVector v(2);
    v << a, b;
    return Ket(std::move(sig), std::move(v));
}

Operator two_level_op(SpaceSignature sig, const Eigen::Matrix2cd &m, OperatorKind kind) {
    return Operator(std::move(sig), CMatrix(m), kind);
}

// Orthonormal columns v_a, v_b of the retained orbital plane.
Eigen::Matrix<cplx, 3, 2> orbital_frame() {
    Eigen::Matrix<cplx, 3, 2> b;
    b.col(0) = v_a_triplet();
    b.col(1) = v_b_triplet();
    return b;
}

}  // namespace

SpaceSignature path() {
    return SpaceSignature{{std::string(labels::kPath), 2}};
}

SpaceSignature orbital() {
    return SpaceSignature{{std::string(labels::kOrbital), 2}};
}

SpaceSignature polarization() {
    return SpaceSignature{{std::string(labels::kPolarization), 2}};
}

SpaceSignature meter(std::size_t half_width) {
    return SpaceSignature{{std::string(labels::kMeter), 2 * half_width + 1}};
}

Ket arm(Arm a) {
    return Ket::basis(path(), {a == Arm::left ? 0u : 1u});
}

Ket horizontal() {
    return two_level(polarization(), kInvSqrt2, kInvSqrt2).normalized();
}

Ket vertical() {
    return two_level(polarization(), -kI * kInvSqrt2, kI * kInvSqrt2).normalized();
}

Ket plus() {
    return Ket::basis(polarization(), {0});
}

Ket minus() {
    return Ket::basis(polarization(), {1});
}

Ket linear_polarization(double angle) {
    return (horizontal() * std::cos(angle) + vertical() * std::sin(angle)).normalized();
}

Ket v_a() {
    return Ket::basis(orbital(), {0});
}

Ket v_b() {
    return Ket::basis(orbital(), {1});
}

Eigen::Matrix2cd hv_to_storage() {
    Eigen::Matrix2cd b;
    b << kInvSqrt2, -kI * kInvSqrt2, kInvSqrt2, kI * kInvSqrt2;
    return b;
}

Operator polarization_from_hv(const Eigen::Matrix2cd &hv_matrix) {
    Eigen::Matrix2cd b = hv_to_storage();
    return Operator(polarization(), CMatrix(b * hv_matrix * b.adjoint()));
}

Eigen::Vector2cd storage_to_hv(const Eigen::Vector2cd &storage) {
    return hv_to_storage().adjoint() * storage;
}

Operator projector(Arm a) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(a == Arm::left ? 0 : 1, a == Arm::left ? 0 : 1) = 1.0;
    return two_level_op(path(), m, OperatorKind::hermitian);
}

Operator sigma_z() {
    Eigen::Matrix2cd m;
    m << 1.0, 0.0, 0.0, -1.0;
    return two_level_op(polarization(), m, OperatorKind::hermitian);
}

Operator sigma_x() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 1.0, 0.0;
    return two_level_op(polarization(), m, OperatorKind::hermitian);
}

Operator swap_hv() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 1.0, 0.0;
    auto op = polarization_from_hv(m);
    return Operator(op.signature(), op.matrix(), OperatorKind::unitary);
}

Operator l_x() {
    Eigen::Matrix2cd m;
    m << 0.0, -kI, kI, 0.0;
    return two_level_op(orbital(), m, OperatorKind::hermitian);
}

Operator l_z_restricted() {
    auto frame = orbital_frame();
    Eigen::Matrix2cd m = frame.adjoint() * l_z_triplet() * frame;
    return two_level_op(orbital(), m, OperatorKind::hermitian);
}

Eigen::Vector3cd v_a_triplet() {
    return Eigen::Vector3cd(kInvSqrt2, 0.0, kInvSqrt2);
}

Eigen::Vector3cd v_b_triplet() {
    return Eigen::Vector3cd(0.0, -kI, 0.0);
}

Eigen::Matrix3cd l_x_triplet() {
    Eigen::Matrix3cd m;
    m << 0.0, kInvSqrt2, 0.0, kInvSqrt2, 0.0, kInvSqrt2, 0.0, kInvSqrt2, 0.0;
    return m;
}

Eigen::Matrix3cd l_z_triplet() {
    return Eigen::Vector3cd(1.0, 0.0, -1.0).asDiagonal();
}

Operator position(std::size_t half_width) {
    auto n = static_cast<Eigen::Index>(2 * half_width + 1);
    CVector q(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        q(k) = static_cast<double>(k) - static_cast<double>(half_width);
    }
    return Operator(meter(half_width), CMatrix(q.asDiagonal()), OperatorKind::hermitian);
}

}  // namespace cheshire::basis

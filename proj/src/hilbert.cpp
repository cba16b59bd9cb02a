#include "cheshire/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "cheshire/errors.hpp"

namespace cheshire {

namespace {

void require_finite(const CMatrix &m, std::string_view what) {
    if (!m.allFinite()) {
        throw ValueError(std::string(what) + ": non-finite entries");
    }
}

// For each flat index of `target`, the flat index of the same basis element in `source`.
// Both signatures must carry the same labels and dimensions.
std::vector<std::size_t> index_map(const SpaceSignature &source, const SpaceSignature &target) {
    const auto &tf = target.factors();
    std::vector<std::size_t> where(tf.size());
    for (std::size_t i = 0; i < tf.size(); ++i) {
        where[i] = *source.position(tf[i].label);
    }
    std::vector<std::size_t> map(target.dimension());
    std::vector<std::size_t> src_digits(source.rank());
    for (std::size_t flat = 0; flat < target.dimension(); ++flat) {
        auto d = target.digits(flat);
        for (std::size_t i = 0; i < d.size(); ++i) {
            src_digits[where[i]] = d[i];
        }
        map[flat] = source.flat_index(src_digits);
    }
    return map;
}

bool same_factor_set(const SpaceSignature &a, const SpaceSignature &b) {
    if (a.rank() != b.rank()) {
        return false;
    }
    for (const auto &f : a.factors()) {
        auto p = b.position(f.label);
        if (!p || b.factors()[*p].dim != f.dim) {
            return false;
        }
    }
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// SpaceSignature

SpaceSignature::SpaceSignature(std::initializer_list<Factor> factors)
    : SpaceSignature(std::vector<Factor>(factors)) {
}

SpaceSignature::SpaceSignature(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::unordered_set<std::string> seen;
    for (const auto &f : factors_) {
        if (f.label.empty()) {
            throw SignatureError("factor label must be non-empty");
        }
        if (f.dim == 0) {
            throw SignatureError("factor '" + f.label + "' has zero dimension");
        }
        if (!seen.insert(f.label).second) {
            throw SignatureError("duplicate factor label '" + f.label + "'");
        }
        dimension_ *= f.dim;
    }
}

std::optional<std::size_t> SpaceSignature::position(std::string_view label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i].label == label) {
            return i;
        }
    }
    return std::nullopt;
}

const Factor &SpaceSignature::factor(std::string_view label) const {
    auto p = position(label);
    if (!p) {
        throw SignatureError("factor '" + std::string(label) + "' not in " + to_string());
    }
    return factors_[*p];
}

SpaceSignature SpaceSignature::concat(const SpaceSignature &other) const {
    std::vector<Factor> all = factors_;
    all.insert(all.end(), other.factors_.begin(), other.factors_.end());
    return SpaceSignature(std::move(all));
}

SpaceSignature SpaceSignature::without(const SpaceSignature &drop) const {
    std::vector<Factor> kept;
    for (const auto &f : factors_) {
        if (!drop.contains(f.label)) {
            kept.push_back(f);
        }
    }
    return SpaceSignature(std::move(kept));
}

std::vector<std::size_t> SpaceSignature::digits(std::size_t flat) const {
    std::vector<std::size_t> d(factors_.size());
    for (std::size_t i = factors_.size(); i-- > 0;) {
        d[i] = flat % factors_[i].dim;
        flat /= factors_[i].dim;
    }
    return d;
}

std::size_t SpaceSignature::flat_index(std::span<const std::size_t> digits) const {
    if (digits.size() != factors_.size()) {
        throw SignatureError("digit count does not match signature rank");
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (digits[i] >= factors_[i].dim) {
            throw ValueError("basis digit out of range for factor '" + factors_[i].label + "'");
        }
        flat = flat * factors_[i].dim + digits[i];
    }
    return flat;
}

std::string SpaceSignature::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) {
            out << " x ";
        }
        out << factors_[i].label << ':' << factors_[i].dim;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(SpaceSignature signature, CVector amplitudes)
    : signature_(std::move(signature)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != signature_.dimension()) {
        throw SignatureError("ket length " + std::to_string(amplitudes_.size()) + " does not match " +
                             signature_.to_string());
    }
    require_finite(amplitudes_, "ket");
}

Ket Ket::basis(SpaceSignature signature, std::span<const std::size_t> digits) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(signature.dimension()));
    v(static_cast<Eigen::Index>(signature.flat_index(digits))) = 1.0;
    Ket k(std::move(signature), std::move(v));
    k.normalized_ = true;
    return k;
}

Ket Ket::basis(SpaceSignature signature, std::initializer_list<std::size_t> digits) {
    std::vector<std::size_t> d(digits);
    return basis(std::move(signature), std::span<const std::size_t>(d));
}

Ket Ket::normalized() const {
    double n = norm();
    if (n == 0.0) {
        throw AnnihilatedState("cannot normalize the zero ket");
    }
    Ket k(signature_, amplitudes_ / n);
    k.normalized_ = true;
    return k;
}

Ket Ket::operator+(const Ket &other) const {
    if (!(signature_ == other.signature_)) {
        throw SignatureError("ket sum: " + signature_.to_string() + " vs " + other.signature_.to_string());
    }
    return Ket(signature_, amplitudes_ + other.amplitudes_);
}

Ket Ket::operator-(const Ket &other) const {
    return *this + other * cplx(-1.0);
}

Ket Ket::operator*(cplx scale) const {
    return Ket(signature_, amplitudes_ * scale);
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(SpaceSignature signature, CMatrix matrix, OperatorKind kind)
    : signature_(std::move(signature)), matrix_(std::move(matrix)), kind_(kind) {
    auto n = static_cast<Eigen::Index>(signature_.dimension());
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw SignatureError("operator of shape " + std::to_string(matrix_.rows()) + "x" +
                             std::to_string(matrix_.cols()) + " does not match " + signature_.to_string());
    }
    require_finite(matrix_, "operator");
    if (kind_ == OperatorKind::hermitian && !is_hermitian()) {
        throw ValueError("operator flagged Hermitian is not Hermitian to 1e-12");
    }
    if (kind_ == OperatorKind::unitary && !is_unitary()) {
        throw ValueError("operator flagged unitary is not unitary to 1e-12");
    }
}

Operator Operator::identity(SpaceSignature signature) {
    auto n = static_cast<Eigen::Index>(signature.dimension());
    return Operator(std::move(signature), CMatrix::Identity(n, n), OperatorKind::unitary);
}

Operator Operator::zero(SpaceSignature signature) {
    auto n = static_cast<Eigen::Index>(signature.dimension());
    return Operator(std::move(signature), CMatrix::Zero(n, n), OperatorKind::hermitian);
}

Operator Operator::outer(const Ket &ket, const Ket &bra) {
    if (!(ket.signature() == bra.signature())) {
        throw SignatureError("outer product of kets on different signatures");
    }
    return Operator(ket.signature(), ket.amplitudes() * bra.amplitudes().adjoint());
}

Operator Operator::adjoint() const {
    OperatorKind k = kind_;
    return Operator(signature_, matrix_.adjoint(), k);
}

bool Operator::is_hermitian(double tol) const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, matrix_.cwiseAbs().maxCoeff());
}

bool Operator::is_unitary(double tol) const {
    auto n = matrix_.rows();
    return (matrix_.adjoint() * matrix_ - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <= tol;
}

Operator Operator::operator+(const Operator &other) const {
    if (!(signature_ == other.signature_)) {
        throw SignatureError("operator sum: " + signature_.to_string() + " vs " + other.signature_.to_string());
    }
    return Operator(signature_, matrix_ + other.matrix_);
}

Operator Operator::operator-(const Operator &other) const {
    return *this + other * cplx(-1.0);
}

Operator Operator::operator*(const Operator &other) const {
    if (!(signature_ == other.signature_)) {
        throw SignatureError("operator product: " + signature_.to_string() + " vs " +
                             other.signature_.to_string());
    }
    return Operator(signature_, matrix_ * other.matrix_);
}

Operator Operator::operator*(cplx scale) const {
    return Operator(signature_, matrix_ * scale);
}

Ket Operator::operator*(const Ket &ket) const {
    if (!(signature_ == ket.signature())) {
        throw SignatureError("operator on " + signature_.to_string() + " applied to ket on " +
                             ket.signature().to_string());
    }
    return Ket(signature_, matrix_ * ket.amplitudes());
}

// ---------------------------------------------------------------------------
// Free functions

Ket tensor(const Ket &a, const Ket &b) {
    auto sig = a.signature().concat(b.signature());
    const auto &x = a.amplitudes();
    const auto &y = b.amplitudes();
    CVector out(x.size() * y.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        out.segment(i * y.size(), y.size()) = x(i) * y;
    }
    return Ket(std::move(sig), std::move(out));
}

Operator tensor(const Operator &a, const Operator &b) {
    auto sig = a.signature().concat(b.signature());
    const auto &x = a.matrix();
    const auto &y = b.matrix();
    CMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return Operator(std::move(sig), std::move(out));
}

Operator extend(const Operator &op, const SpaceSignature &target) {
    for (const auto &f : op.signature().factors()) {
        auto p = target.position(f.label);
        if (!p) {
            throw SignatureError("extend: factor '" + f.label + "' absent from " + target.to_string());
        }
        if (target.factors()[*p].dim != f.dim) {
            throw SignatureError("extend: factor '" + f.label + "' has a different dimension in target");
        }
    }
    auto missing = target.without(op.signature());
    Operator full = missing.rank() == 0 ? op : tensor(op, Operator::identity(missing));
    if (full.signature() == target) {
        return full;
    }
    auto map = index_map(full.signature(), target);
    auto n = static_cast<Eigen::Index>(target.dimension());
    CMatrix out(n, n);
    const auto &m = full.matrix();
    for (Eigen::Index c = 0; c < n; ++c) {
        auto sc = static_cast<Eigen::Index>(map[c]);
        for (Eigen::Index r = 0; r < n; ++r) {
            out(r, c) = m(static_cast<Eigen::Index>(map[r]), sc);
        }
    }
    return Operator(target, std::move(out));
}

Ket permute(const Ket &ket, const SpaceSignature &target) {
    if (!same_factor_set(ket.signature(), target)) {
        throw SignatureError("permute: " + ket.signature().to_string() + " is not a reordering of " +
                             target.to_string());
    }
    auto map = index_map(ket.signature(), target);
    CVector out(static_cast<Eigen::Index>(target.dimension()));
    for (std::size_t i = 0; i < map.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = ket[map[i]];
    }
    return Ket(target, std::move(out));
}

cplx inner(const Ket &bra, const Ket &ket) {
    if (!(bra.signature() == ket.signature())) {
        throw SignatureError("inner product: " + bra.signature().to_string() + " vs " +
                             ket.signature().to_string());
    }
    return bra.amplitudes().dot(ket.amplitudes());  // Eigen's dot conjugates the left operand
}

Ket partial_inner(const Ket &bra, const Ket &joint) {
    const auto &bsig = bra.signature();
    for (const auto &f : bsig.factors()) {
        auto p = joint.signature().position(f.label);
        if (!p || joint.signature().factors()[*p].dim != f.dim) {
            throw SignatureError("partial_inner: factor '" + f.label + "' missing from " +
                                 joint.signature().to_string());
        }
    }
    auto rest = joint.signature().without(bsig);
    auto ordered = permute(joint, bsig.concat(rest));
    auto nb = static_cast<Eigen::Index>(bsig.dimension());
    auto nr = static_cast<Eigen::Index>(rest.dimension());
    // Row-major (bra index, rest index) view of the reordered amplitudes.
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> j(
        ordered.amplitudes().data(), nb, nr);
    CVector out = j.transpose() * bra.amplitudes().conjugate();
    return Ket(std::move(rest), std::move(out));
}

bool equal_up_to_phase(const Ket &a, const Ket &b, double tol) {
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        return na == nb;
    }
    return std::abs(std::abs(inner(a, b)) - na * nb) <= tol * na * nb &&
           std::abs(na - nb) <= tol * std::max(na, nb);
}

CMatrix mat_exp(const CMatrix &H, cplx scale) {
    if (H.rows() != H.cols()) {
        throw ValueError("mat_exp: matrix is not square");
    }
    require_finite(H, "mat_exp");
    if (!std::isfinite(scale.real()) || !std::isfinite(scale.imag())) {
        throw ValueError("mat_exp: non-finite scale");
    }
    double size = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * size) {
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(H);
        CVector phases = (eig.eigenvalues().cast<cplx>() * scale).array().exp();
        return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
    }
    CMatrix scaled = H * scale;
    return scaled.exp();
}

Operator mat_exp(const Operator &H, cplx scale) {
    return Operator(H.signature(), mat_exp(H.matrix(), scale));
}

CVector dft_q_to_p(const CVector &q_amplitudes) {
    auto m = q_amplitudes.size();
    if (m % 2 == 0) {
        throw ValueError("dft_q_to_p: length must be odd (2N+1), got " + std::to_string(m));
    }
    long n = (m - 1) / 2;
    const double w = 2.0 * std::numbers::pi / static_cast<double>(m);
    std::vector<cplx> in(static_cast<std::size_t>(m));
    for (long j = 0; j < m; ++j) {
        in[static_cast<std::size_t>(j)] = q_amplitudes(j) * std::polar(1.0, w * static_cast<double>(j * n % m));
    }
    std::vector<cplx> out;
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    CVector result(m);
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(m));
    for (long j = 0; j < m; ++j) {
        long l = j - n;
        long phase_index = ((n * l) % m + m) % m;
        result(j) = out[static_cast<std::size_t>(j)] * std::polar(inv_sqrt, w * static_cast<double>(phase_index));
    }
    return result;
}

CVector dft_p_to_q(const CVector &p_amplitudes) {
    return dft_q_to_p(p_amplitudes.conjugate()).conjugate();
}

}  // namespace cheshire

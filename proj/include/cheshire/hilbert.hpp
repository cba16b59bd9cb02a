#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cheshire {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Canonical factor labels used across the project.
namespace labels {
inline constexpr std::string_view kPath = "path";
inline constexpr std::string_view kOrbital = "orbital";
inline constexpr std::string_view kPolarization = "polarization";
inline constexpr std::string_view kMeter = "meter";
}  // namespace labels

struct Factor {
    std::string label;
    std::size_t dim = 0;

    bool operator==(const Factor &) const = default;
};

/// Ordered list of labeled tensor factors. Factor order is part of the identity;
/// the first factor is the most significant digit of the flat basis index.
class SpaceSignature {
   public:
    SpaceSignature() = default;
    SpaceSignature(std::initializer_list<Factor> factors);
    explicit SpaceSignature(std::vector<Factor> factors);

    const std::vector<Factor> &factors() const noexcept {
        return factors_;
    }
    std::size_t dimension() const noexcept {
        return dimension_;
    }
    std::size_t rank() const noexcept {
        return factors_.size();
    }
    std::optional<std::size_t> position(std::string_view label) const;
    bool contains(std::string_view label) const {
        return position(label).has_value();
    }
    const Factor &factor(std::string_view label) const;

    /// Concatenation; throws SignatureError on a repeated label.
    SpaceSignature concat(const SpaceSignature &other) const;
    /// The factors of this signature not named in `drop`, in order.
    SpaceSignature without(const SpaceSignature &drop) const;

    /// Per-factor digits of a flat basis index.
    std::vector<std::size_t> digits(std::size_t flat) const;
    std::size_t flat_index(std::span<const std::size_t> digits) const;

    std::string to_string() const;

    bool operator==(const SpaceSignature &other) const {
        return factors_ == other.factors_;
    }

   private:
    std::vector<Factor> factors_;
    std::size_t dimension_ = 1;
};

/// Complex amplitude vector over a signature. Kets are not normalized unless
/// built with `normalized()`; post-selection outputs are generally not.
class Ket {
   public:
    Ket(SpaceSignature signature, CVector amplitudes);

    static Ket basis(SpaceSignature signature, std::span<const std::size_t> digits);
    static Ket basis(SpaceSignature signature, std::initializer_list<std::size_t> digits);

    const SpaceSignature &signature() const noexcept {
        return signature_;
    }
    const CVector &amplitudes() const noexcept {
        return amplitudes_;
    }
    cplx operator[](std::size_t i) const {
        return amplitudes_(static_cast<Eigen::Index>(i));
    }
    std::size_t size() const noexcept {
        return static_cast<std::size_t>(amplitudes_.size());
    }

    double norm() const {
        return amplitudes_.norm();
    }
    /// Returns a unit-norm copy; throws AnnihilatedState for the zero vector.
    Ket normalized() const;
    bool is_normalized() const noexcept {
        return normalized_;
    }

    Ket operator+(const Ket &other) const;
    Ket operator-(const Ket &other) const;
    Ket operator*(cplx scale) const;
    friend Ket operator*(cplx scale, const Ket &ket) {
        return ket * scale;
    }

   private:
    SpaceSignature signature_;
    CVector amplitudes_;
    bool normalized_ = false;
};

enum class OperatorKind { general, hermitian, unitary };

/// Dense square matrix over a signature. Operators built with a Hermitian or
/// unitary kind are checked to 1e-12 at construction.
class Operator {
   public:
    Operator(SpaceSignature signature, CMatrix matrix, OperatorKind kind = OperatorKind::general);

    static Operator identity(SpaceSignature signature);
    static Operator zero(SpaceSignature signature);
    /// |ket><bra|
    static Operator outer(const Ket &ket, const Ket &bra);

    const SpaceSignature &signature() const noexcept {
        return signature_;
    }
    const CMatrix &matrix() const noexcept {
        return matrix_;
    }
    OperatorKind kind() const noexcept {
        return kind_;
    }
    std::size_t dimension() const noexcept {
        return signature_.dimension();
    }

    Operator adjoint() const;
    bool is_hermitian(double tol = 1e-12) const;
    bool is_unitary(double tol = 1e-12) const;

    Operator operator+(const Operator &other) const;
    Operator operator-(const Operator &other) const;
    Operator operator*(const Operator &other) const;
    Operator operator*(cplx scale) const;
    friend Operator operator*(cplx scale, const Operator &op) {
        return op * scale;
    }
    Ket operator*(const Ket &ket) const;

   private:
    SpaceSignature signature_;
    CMatrix matrix_;
    OperatorKind kind_ = OperatorKind::general;
};

Ket tensor(const Ket &a, const Ket &b);
Operator tensor(const Operator &a, const Operator &b);

/// Tensors `op` with identities on every factor of `target` it lacks, in target order.
Operator extend(const Operator &op, const SpaceSignature &target);

/// Reorders the factors of a ket (same labels, new order).
Ket permute(const Ket &ket, const SpaceSignature &target);

/// <bra|ket>, conjugate-linear in `bra`.
cplx inner(const Ket &bra, const Ket &ket);

/// Contracts `bra` against the matching factors of `joint`; the result lives on the remaining factors.
Ket partial_inner(const Ket &bra, const Ket &joint);

/// |<a|b>| == |a||b| within `tol` (relative).
bool equal_up_to_phase(const Ket &a, const Ket &b, double tol = 1e-12);

/// exp(scale * H). Hermitian H uses an eigendecomposition, anything else Pade scaling-and-squaring.
Operator mat_exp(const Operator &H, cplx scale);
CMatrix mat_exp(const CMatrix &H, cplx scale);

/// Unitary centered DFT on 2N+1 points: out_l = (2N+1)^{-1/2} sum_k exp(-2 pi i k l / (2N+1)) in_k,
/// with k, l in {-N..N} stored at offset N.
CVector dft_q_to_p(const CVector &q_amplitudes);
CVector dft_p_to_q(const CVector &p_amplitudes);

}  // namespace cheshire

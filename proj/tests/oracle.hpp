#pragma once

// Reference constructions for the tests. Everything here is written in the {H, V}
// polarization basis with hand-rolled loops, independent of the library's storage
// conventions; `to_storage` is the only bridge.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cd I{0.0, 1.0};
inline const double r2 = std::numbers::sqrt2;

inline Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < b.rows(); ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

inline Vec kron(const Vec &a, const Vec &b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index k = 0; k < b.size(); ++k) out(i * b.size() + k) = a(i) * b(k);
    return out;
}

inline Vec unit(int n, int i) {
    Vec v = Vec::Zero(n);
    v(i) = 1.0;
    return v;
}

inline Mat eye(int n) {
    return Mat::Identity(n, n);
}

inline Mat mat2(cd a, cd b, cd c, cd d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

// path {L, R}, orbital {v_a, v_b}, polarization {H, V}
inline Vec L() { return unit(2, 0); }
inline Vec R() { return unit(2, 1); }
inline Vec H() { return unit(2, 0); }
inline Vec V() { return unit(2, 1); }
inline Vec va() { return unit(2, 0); }
inline Vec vb() { return unit(2, 1); }

inline Mat PL() { return mat2(1, 0, 0, 0); }
inline Mat PR() { return mat2(0, 0, 0, 1); }

// sigma_z is diagonal on |+-> = (|H> +- i|V>)/sqrt2; in {H, V} it is the Pauli y form.
inline Mat sz() { return mat2(0, -I, I, 0); }
// sigma_x swaps |+> and |->; in {H, V} it is diag(1, -1).
inline Mat sx() { return mat2(1, 0, 0, -1); }
inline Mat Lx() { return mat2(0, -I, I, 0); }

/// Maps {H, V} polarization amplitudes to the library's (+, -) storage.
inline Mat to_storage() {
    Mat t(2, 2);
    t << 1.0 / r2, -I / r2, 1.0 / r2, I / r2;
    return t;
}

/// Basis change on a product whose polarization factor is last.
inline Mat to_storage_last(int other_dim) {
    return kron(eye(other_dim), to_storage());
}

inline cd weak(const Vec &pre, const Vec &post, const Mat &A) {
    return post.dot(A * pre) / post.dot(pre);
}

// Named states, written out as closed forms.
inline Vec cheshire_in() { return (I * kron(L(), H()) + kron(R(), H())) / r2; }
inline Vec cheshire_f() { return (kron(L(), H()) + kron(R(), V())) / r2; }
inline Vec amp_in(double theta) {
    return std::cos(theta / 2) * kron(L(), H()) - I * std::sin(theta / 2) * kron(R(), H());
}
inline Vec noisy_in() { return kron(Vec((va() + I * vb()) / r2), H()); }
inline Vec noisy_f(double alpha) { return kron(va(), Vec(std::cos(alpha) * H() + std::sin(alpha) * V())); }
inline Vec disembody_in(double theta) {
    Vec orb = (va() + I * vb()) / r2;
    return std::cos(theta / 2) * kron(kron(L(), orb), H()) - I * std::sin(theta / 2) * kron(kron(R(), orb), H());
}
inline Vec disembody_f(double alpha) {
    return std::cos(alpha) * kron(kron(L(), va()), H()) + std::sin(alpha) * kron(kron(R(), va()), V());
}

/// Normalized discrete Gaussian exp(-k^2 / 4 Delta^2), k = -N..N.
inline Vec gaussian(int N, double delta) {
    Vec v(2 * N + 1);
    for (int k = -N; k <= N; ++k) v(k + N) = std::exp(-double(k) * k / (4 * delta * delta));
    return v / v.norm();
}

/// Direct O(M^2) centered DFT.
inline Vec dft(const Vec &in) {
    int M = static_cast<int>(in.size());
    int N = (M - 1) / 2;
    Vec out = Vec::Zero(M);
    for (int l = -N; l <= N; ++l)
        for (int k = -N; k <= N; ++k)
            out(l + N) += std::exp(-I * (2 * std::numbers::pi * k * l / M)) * in(k + N);
    return out / std::sqrt(double(M));
}

}  // namespace oracle

#include "e2f/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace e2f {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

// In-place iterative radix-2 Cooley-Tukey.  n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv;
    }
}

}  // namespace

Dft::Dft(std::size_t n) : n_(n) {
    if (n_ == 0) throw std::invalid_argument("dft size must be positive");
    if (is_pow2(n_)) {
        m_ = n_;
        return;  // plain radix-2 path, no chirp tables needed
    }
    // Bluestein: x_k e^{-i pi k^2 / n} convolved with e^{+i pi k^2 / n}.
    // k^2 mod 2n keeps the angle argument small so cos/sin stay accurate for large k.
    m_ = next_pow2(2 * n_ - 1);
    chirp_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t r = (k * k) % (2 * n_);
        double ang = kPi * static_cast<double>(r) / static_cast<double>(n_);
        chirp_[k] = std::complex<double>(std::cos(ang), -std::sin(ang));
    }
    std::vector<std::complex<double>> b(m_, std::complex<double>(0.0, 0.0));
    b[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n_; ++k) {
        b[k] = std::conj(chirp_[k]);
        b[m_ - k] = std::conj(chirp_[k]);
    }
    fft_pow2(b, false);
    bhat_ = std::move(b);
}

void Dft::forward(const double* in, std::complex<double>* out) const {
    if (m_ == n_ && chirp_.empty()) {
        std::vector<std::complex<double>> a(n_);
        for (std::size_t i = 0; i < n_; ++i) a[i] = std::complex<double>(in[i], 0.0);
        fft_pow2(a, false);
        for (std::size_t i = 0; i < n_; ++i) out[i] = a[i];
        return;
    }
    std::vector<std::complex<double>> a(m_, std::complex<double>(0.0, 0.0));
    for (std::size_t k = 0; k < n_; ++k) a[k] = in[k] * chirp_[k];
    fft_pow2(a, false);
    for (std::size_t k = 0; k < m_; ++k) a[k] *= bhat_[k];
    fft_pow2(a, true);
    for (std::size_t k = 0; k < n_; ++k) out[k] = a[k] * chirp_[k];
}

std::vector<std::complex<double>> Dft::forward(const std::vector<double>& in) const {
    if (in.size() != n_) throw std::invalid_argument("dft input length mismatch");
    std::vector<std::complex<double>> out(n_);
    forward(in.data(), out.data());
    return out;
}

std::vector<double> Dft::magnitudes(const std::vector<double>& in) const {
    auto spec = forward(in);
    std::vector<double> mag(n_);
    for (std::size_t i = 0; i < n_; ++i) mag[i] = std::abs(spec[i]);
    return mag;
}

}  // namespace e2f

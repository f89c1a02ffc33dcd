#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace e2f {

// Discrete Fourier transform plan for a fixed length. Power-of-two lengths
// run an iterative radix-2 transform; other lengths go through Bluestein's
// chirp-z reduction onto a padded radix-2 transform.
class Dft {
public:
    explicit Dft(std::size_t n);

    std::size_t size() const { return n_; }

    // X_k = sum_n x_n exp(-2*pi*i*n*k/N) for all N bins.
    void forward(const double* in, std::complex<double>* out) const;

    std::vector<std::complex<double>> forward(const std::vector<double>& in) const;

    // |X_k| for all N bins.
    std::vector<double> magnitudes(const std::vector<double>& in) const;

private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;  // padded power-of-two length (equals n_ when n_ is pow2)
    std::vector<std::complex<double>> chirp_;  // exp(-i*pi*k^2/n)
    std::vector<std::complex<double>> bhat_;   // transform of the chirp filter
};

}  // namespace e2f

#include "e2f/dct.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace e2f {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Orthonormal DCT-II matrix, M[k][j] = s_k sqrt(2/n) cos(pi (j + 1/2) k / n)
// with s_0 = 1/sqrt(2).  Its transpose is the orthonormal DCT-III.
std::vector<double> dct2_matrix(std::size_t n) {
    std::vector<double> m(n * n);
    const double scale = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double sk = (k == 0) ? scale / std::sqrt(2.0) : scale;
        for (std::size_t j = 0; j < n; ++j) {
            m[k * n + j] =
                sk * std::cos(kPi * (static_cast<double>(j) + 0.5) * static_cast<double>(k) /
                              static_cast<double>(n));
        }
    }
    return m;
}

// Applies the n x n matrix along `axis` of a (d0,d1,d2) tensor.
// transpose=false applies M (DCT-II), transpose=true applies M^T (DCT-III).
Tensor apply_axis(const Tensor& v, std::size_t axis, const std::vector<double>& m, bool transpose) {
    const std::size_t d0 = v.dims[0], d1 = v.dims[1], d2 = v.dims[2];
    const std::size_t n = v.dims[axis];
    Tensor out(v.dims);
    std::vector<double> line(n), res(n);
    const std::size_t outer0 = (axis == 0) ? d1 : d0;
    const std::size_t outer1 = (axis == 2) ? d1 : d2;
    for (std::size_t a = 0; a < outer0; ++a) {
        for (std::size_t b = 0; b < outer1; ++b) {
            for (std::size_t i = 0; i < n; ++i) {
                if (axis == 0)
                    line[i] = v.at3(i, a, b);
                else if (axis == 1)
                    line[i] = v.at3(a, i, b);
                else
                    line[i] = v.at3(a, b, i);
            }
            for (std::size_t k = 0; k < n; ++k) {
                double acc = 0.0;
                if (!transpose) {
                    for (std::size_t j = 0; j < n; ++j) acc += m[k * n + j] * line[j];
                } else {
                    for (std::size_t j = 0; j < n; ++j) acc += m[j * n + k] * line[j];
                }
                res[k] = acc;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (axis == 0)
                    out.at3(i, a, b) = res[i];
                else if (axis == 1)
                    out.at3(a, i, b) = res[i];
                else
                    out.at3(a, b, i) = res[i];
            }
        }
    }
    return out;
}

Tensor transform_3d(const Tensor& v, bool inverse) {
    if (v.ndim() != 3) throw std::invalid_argument("dct expects a 3-d tensor, got " + shape_str(v.dims));
    Tensor out = v;
    for (std::size_t axis = 0; axis < 3; ++axis) {
        auto m = dct2_matrix(v.dims[axis]);
        out = apply_axis(out, axis, m, inverse);
    }
    return out;
}

}  // namespace

Tensor dct2_3d(const Tensor& v) { return transform_3d(v, false); }

Tensor dct3_3d(const Tensor& v) { return transform_3d(v, true); }

}  // namespace e2f

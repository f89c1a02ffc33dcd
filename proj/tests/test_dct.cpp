#include <cmath>
#include <vector>

#include "doctest.h"

#include "e2f/dct.hpp"
#include "test_util.hpp"

using namespace e2f;
using e2f_test::random_tensor;

namespace {

constexpr double kPi = 3.14159265358979323846;

double ortho_scale(std::size_t k, std::size_t n) {
    return (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
}

// separable brute-force orthonormal DCT-II over all three axes
Tensor naive_dct2_3d(const Tensor& v) {
    const std::size_t d = v.dims[0], w = v.dims[1], h = v.dims[2];
    Tensor out({d, w, h});
    for (std::size_t k1 = 0; k1 < d; ++k1)
        for (std::size_t k2 = 0; k2 < w; ++k2)
            for (std::size_t k3 = 0; k3 < h; ++k3) {
                double acc = 0.0;
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < w; ++j)
                        for (std::size_t l = 0; l < h; ++l)
                            acc += v.at3(i, j, l) *
                                   std::cos(kPi * (i + 0.5) * k1 / d) *
                                   std::cos(kPi * (j + 0.5) * k2 / w) *
                                   std::cos(kPi * (l + 0.5) * k3 / h);
                out.at3(k1, k2, k3) =
                    acc * ortho_scale(k1, d) * ortho_scale(k2, w) * ortho_scale(k3, h);
            }
    return out;
}

}  // namespace

TEST_SUITE("dct") {

TEST_CASE("forward transform matches the brute-force definition") {
    Tensor v = random_tensor({3, 4, 5}, 101, -1.0, 1.0);
    Tensor got = dct2_3d(v);
    Tensor want = naive_dct2_3d(v);
    REQUIRE(got.dims == want.dims);
    CHECK(e2f_test::max_abs_diff(got, want) < 1e-10);
}

TEST_CASE("type-III inverts type-II") {
    Tensor v = random_tensor({6, 7, 8}, 102, 0.0, 1.0);
    Tensor back = dct3_3d(dct2_3d(v));
    CHECK(e2f_test::max_abs_diff(back, v) < 1e-12);
}

TEST_CASE("round trip in the other order") {
    Tensor v = random_tensor({5, 3, 9}, 103, -2.0, 2.0);
    Tensor back = dct2_3d(dct3_3d(v));
    CHECK(e2f_test::max_abs_diff(back, v) < 1e-12);
}

TEST_CASE("constant volume maps to a single DC coefficient") {
    Tensor v = Tensor::full({4, 6, 8}, 0.3);
    Tensor c = dct2_3d(v);
    CHECK(c.at3(0, 0, 0) == doctest::Approx(0.3 * std::sqrt(4.0 * 6.0 * 8.0)).epsilon(1e-12));
    double off_dc = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) off_dc = std::max(off_dc, std::fabs(c.data[i]));
    CHECK(off_dc < 1e-12);
}

TEST_CASE("orthonormality preserves energy") {
    Tensor v = random_tensor({7, 5, 6}, 104, -1.0, 3.0);
    Tensor c = dct2_3d(v);
    double ev = 0.0, ec = 0.0;
    for (double x : v.data) ev += x * x;
    for (double x : c.data) ec += x * x;
    CHECK(std::fabs(ev - ec) / ev < 1e-12);
}

TEST_CASE("single-cosine volume concentrates on one coefficient") {
    const std::size_t d = 4, w = 8, h = 8;
    Tensor v({d, w, h});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < w; ++j)
            for (std::size_t l = 0; l < h; ++l)
                v.at3(i, j, l) = std::cos(kPi * (j + 0.5) * 3.0 / w);
    Tensor c = dct2_3d(v);
    // only (0, 3, 0) should be non-zero: sqrt(d) * sqrt(w/2) * sqrt(h)
    CHECK(c.at3(0, 3, 0) ==
          doctest::Approx(std::sqrt(d * 1.0) * std::sqrt(w / 2.0) * std::sqrt(h * 1.0))
              .epsilon(1e-12));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i == (0 * w + 3) * h + 0) continue;
        CHECK(std::fabs(c.data[i]) < 1e-12);
    }
}

}  // TEST_SUITE

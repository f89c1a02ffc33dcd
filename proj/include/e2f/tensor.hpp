#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace e2f {

// Dense row-major array of doubles, last axis fastest-varying.
struct Tensor {
    std::vector<std::size_t> dims;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<std::size_t> shape, double value);

    std::size_t ndim() const { return dims.size(); }
    std::size_t size() const { return data.size(); }

    double* ptr() { return data.data(); }
    const double* ptr() const { return data.data(); }

    double& at2(std::size_t i, std::size_t j) { return data[i * dims[1] + j]; }
    double at2(std::size_t i, std::size_t j) const { return data[i * dims[1] + j]; }

    double& at3(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * dims[1] + j) * dims[2] + k];
    }
    double at3(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * dims[1] + j) * dims[2] + k];
    }

    double& at4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data[((i * dims[1] + j) * dims[2] + k) * dims[3] + l];
    }
    double at4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data[((i * dims[1] + j) * dims[2] + k) * dims[3] + l];
    }

    bool same_shape(const Tensor& o) const { return dims == o.dims; }
};

std::string shape_str(const std::vector<std::size_t>& dims);
bool all_finite(const Tensor& t);
double min_value(const Tensor& t);
double max_value(const Tensor& t);

}  // namespace e2f

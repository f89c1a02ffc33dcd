#include "e2f/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace e2f {

Tensor::Tensor(std::vector<std::size_t> shape) : dims(std::move(shape)) {
    std::size_t n = dims.empty() ? 0 : 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("tensor dimension must be positive");
        n *= d;
    }
    data.assign(n, 0.0);
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    Tensor t(std::move(shape));
    for (double& v : t.data) v = value;
    return t;
}

std::string shape_str(const std::vector<std::size_t>& dims) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) os << "x";
        os << dims[i];
    }
    os << ")";
    return os.str();
}

bool all_finite(const Tensor& t) {
    for (double v : t.data)
        if (!std::isfinite(v)) return false;
    return true;
}

double min_value(const Tensor& t) {
    if (t.data.empty()) throw std::invalid_argument("min of empty tensor");
    double m = t.data[0];
    for (double v : t.data) m = std::min(m, v);
    return m;
}

double max_value(const Tensor& t) {
    if (t.data.empty()) throw std::invalid_argument("max of empty tensor");
    double m = t.data[0];
    for (double v : t.data) m = std::max(m, v);
    return m;
}

}  // namespace e2f

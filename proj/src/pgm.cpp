#include "e2f/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace e2f {

void write_pgm(const std::string& path, const Tensor& volume, std::size_t depth_slice) {
    if (volume.ndim() != 3) throw std::invalid_argument("pgm export expects a 3-d volume");
    if (depth_slice >= volume.dims[0])
        throw std::invalid_argument("depth slice " + std::to_string(depth_slice) +
                                    " out of range for " + shape_str(volume.dims));
    const std::size_t rows = volume.dims[1], cols = volume.dims[2];
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "P5\n" << cols << " " << rows << "\n255\n";
    std::vector<unsigned char> line(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = std::clamp(volume.at3(depth_slice, r, c), 0.0, 1.0);
            line[c] = static_cast<unsigned char>(std::lround(255.0 * v));
        }
        os.write(reinterpret_cast<const char*>(line.data()), static_cast<long>(cols));
    }
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace e2f

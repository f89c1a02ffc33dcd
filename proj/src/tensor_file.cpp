#include "e2f/tensor_file.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace e2f {

namespace {

constexpr char kMagic[4] = {'E', '2', 'F', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    os.write(b, 4);
}

bool get_u32(std::istream& is, std::uint32_t& v) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
    v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
        (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    return true;
}

}  // namespace

void write_tensor_record(std::ostream& os, const Tensor& t) {
    if (t.ndim() < 1) throw std::invalid_argument("tensor must have ndim >= 1");
    os.write(kMagic, 4);
    put_u32(os, static_cast<std::uint32_t>(t.ndim()));
    for (std::size_t d : t.dims) put_u32(os, static_cast<std::uint32_t>(d));
    for (double v : t.data) {
        float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(os, bits);
    }
}

Tensor read_tensor_record(std::istream& is, const std::string& context) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a tensor file: " + context);
    std::uint32_t ndim = 0;
    if (!get_u32(is, ndim) || ndim == 0 || ndim > 16)
        throw std::runtime_error("corrupt tensor file: " + context);
    std::vector<std::size_t> dims(ndim);
    std::size_t numel = 1;
    for (auto& d : dims) {
        std::uint32_t v = 0;
        if (!get_u32(is, v) || v == 0) throw std::runtime_error("corrupt tensor file: " + context);
        d = v;
        numel *= v;
        if (numel > (1ull << 31)) throw std::runtime_error("corrupt tensor file: " + context);
    }
    Tensor t(dims);
    for (std::size_t i = 0; i < numel; ++i) {
        std::uint32_t bits = 0;
        if (!get_u32(is, bits)) throw std::runtime_error("corrupt tensor file: " + context);
        float f;
        std::memcpy(&f, &bits, 4);
        t.data[i] = static_cast<double>(f);
    }
    return t;
}

void write_tensor(const std::string& path, const Tensor& t) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_tensor_record(os, t);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path);
}

Tensor read_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    Tensor t = read_tensor_record(is, path);
    // trailing garbage means the file was not produced by write_tensor
    is.peek();
    if (!is.eof()) throw std::runtime_error("corrupt tensor file: " + path);
    return t;
}

}  // namespace e2f

#include "e2f/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "e2f/config_json.hpp"
#include "e2f/tensor_file.hpp"

namespace e2f {

void save_checkpoint(const ModelParams& params, const std::string& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json j{{"arch", arch_to_json(params.config)}, {"weights", params.names}};
    {
        std::ofstream os(dir + "/arch.json", std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for writing: " + dir + "/arch.json");
        os << j.dump(2) << "\n";
    }
    std::ofstream os(dir + "/params.e2fw", std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + dir + "/params.e2fw");
    for (const auto& t : params.values) write_tensor_record(os, t);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + dir + "/params.e2fw");
}

ModelParams load_checkpoint(const std::string& dir) {
    const std::string arch_path = dir + "/arch.json";
    std::ifstream is(arch_path);
    if (!is) throw std::runtime_error("cannot open: " + arch_path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("checkpoint parse failure at " + arch_path + ": " + e.what());
    }
    ModelParams params = zero_params(arch_from_json(j.at("arch")));
    const auto names = j.at("weights").get<std::vector<std::string>>();
    if (names != params.names)
        throw std::runtime_error("checkpoint weight list does not match its architecture: " + dir);

    const std::string weights_path = dir + "/params.e2fw";
    std::ifstream ws(weights_path, std::ios::binary);
    if (!ws) throw std::runtime_error("cannot open: " + weights_path);
    for (std::size_t i = 0; i < params.values.size(); ++i) {
        Tensor t = read_tensor_record(ws, weights_path);
        if (t.dims != params.values[i].dims)
            throw std::runtime_error("checkpoint weight " + params.names[i] +
                                     " has shape " + shape_str(t.dims) + ", expected " +
                                     shape_str(params.values[i].dims));
        params.values[i] = std::move(t);
    }
    ws.peek();
    if (!ws.eof()) throw std::runtime_error("corrupt tensor file: " + weights_path);
    return params;
}

}  // namespace e2f

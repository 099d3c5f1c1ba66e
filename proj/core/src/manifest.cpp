#include "crosstask/manifest.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"
#include "crosstask/hash.hpp"

namespace crosstask {

using json = nlohmann::json;

std::string Manifest::to_json() const {
    json j;
    j["command"] = command;
    json inputs = json::array();
    for (const auto& path : input_paths)
        inputs.push_back({{"path", path}, {"fnv1a64", hex64(hash_file(path))}});
    j["inputs"] = inputs;
    j["parameters"] = parameters;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

void Manifest::write(const std::string& out_dir) const {
    const std::string path = out_dir + "/manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write manifest: " + path);
    out << to_json();
}

}  // namespace crosstask

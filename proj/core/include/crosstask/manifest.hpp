#pragma once

#include <map>
#include <string>
#include <vector>

namespace crosstask {

/// Provenance record every subcommand writes next to its artifacts:
/// inputs (with content hashes), parameters, outputs. No timestamps, so
/// reruns are byte-identical.
struct Manifest {
    std::string command;
    std::vector<std::string> input_paths;           // hashed at write time
    std::map<std::string, std::string> parameters;  // flag -> rendered value
    std::vector<std::string> outputs;               // file names relative to out dir

    std::string to_json() const;
    void write(const std::string& out_dir) const;  // <out_dir>/manifest.json
};

}  // namespace crosstask

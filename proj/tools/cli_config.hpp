// JSON run configuration for the command-line tool.
//
// A config file is a flat object {"command": "region", "mu": 0.1, ...}. Its
// keys are expanded into `--key value` tokens ahead of the user's own
// arguments, so any flag given on the command line overrides the file.
#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kapitza::cli {

using json = nlohmann::json;

/// Invalid configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rewrites `args` (without the program name). `--config <path>` and
/// `--config=<path>` are consumed; `commands` lists the known subcommands.
[[nodiscard]] std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                                     const std::set<std::string>& commands);

/// Same, with the configuration already loaded.
[[nodiscard]] std::vector<std::string> expand_config(const json& config,
                                                     const std::vector<std::string>& args,
                                                     const std::set<std::string>& commands);

/// Resolved values of every bound option, in registration order, for the
/// manifest.
class Manifest {
public:
    template <class T>
    void bind(const std::string& name, const T& value) {
        fields_.emplace_back(name, [&value] { return json(value); });
    }
    void bind_json(const std::string& name, std::function<json()> emit) {
        fields_.emplace_back(name, std::move(emit));
    }

    [[nodiscard]] json resolve(const std::string& command) const;

private:
    std::vector<std::pair<std::string, std::function<json()>>> fields_;
};

} // namespace kapitza::cli

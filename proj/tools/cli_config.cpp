#include "cli_config.hpp"

#include <charconv>
#include <fstream>

namespace kapitza::cli {

namespace {

std::string scalar_token(const json& v, const std::string& key) {
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_integer())
        return std::to_string(v.get<long long>());
    if (v.is_number()) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
        return std::string(buf, res.ptr);
    }
    if (v.is_object() || v.is_array())
        return v.dump();
    throw ConfigError(key + ": unsupported value in config file");
}

std::string option_name(const std::string& token) {
    const auto eq = token.find('=');
    return eq == std::string::npos ? token : token.substr(0, eq);
}

} // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                       const std::set<std::string>& commands) {
    std::vector<std::string> rest;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw ConfigError("--config: missing path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty())
        return rest;

    std::ifstream in(path);
    if (!in)
        throw ConfigError("--config: cannot open " + path);
    json config;
    try {
        in >> config;
    } catch (const json::exception& e) {
        throw ConfigError("--config: " + path + " is not valid JSON (" + e.what() + ")");
    }
    return expand_config(config, rest, commands);
}

std::vector<std::string> expand_config(const json& config, const std::vector<std::string>& args,
                                       const std::set<std::string>& commands) {
    if (!config.is_object())
        throw ConfigError("--config: top level must be an object");

    std::string user_command;
    std::vector<std::string> user_rest;
    std::set<std::string> user_options;
    for (const auto& a : args) {
        if (user_command.empty() && commands.count(a)) {
            user_command = a;
            continue;
        }
        if (a.rfind("--", 0) == 0)
            user_options.insert(option_name(a));
        user_rest.push_back(a);
    }

    std::string command = user_command;
    if (config.contains("command")) {
        if (!config["command"].is_string() || !commands.count(config["command"].get<std::string>()))
            throw ConfigError("command: unknown command in config file");
        const std::string file_command = config["command"];
        if (!user_command.empty() && user_command != file_command)
            throw ConfigError("command: config file is for '" + file_command +
                              "' but '" + user_command + "' was requested");
        command = file_command;
    }

    std::vector<std::string> out;
    if (!command.empty())
        out.push_back(command);
    for (const auto& [key, value] : config.items()) {
        if (key == "command" || key == "config" || value.is_null())
            continue;
        const std::string flag = "--" + key;
        if (user_options.count(flag))
            continue;
        if (value.is_boolean()) {
            out.push_back(flag + (value.get<bool>() ? "=true" : "=false"));
        } else if (value.is_array()) {
            if (value.empty())
                throw ConfigError(key + ": empty list in config file");
            out.push_back(flag);
            for (const auto& v : value)
                out.push_back(scalar_token(v, key));
        } else {
            out.push_back(flag);
            out.push_back(scalar_token(value, key));
        }
    }
    out.insert(out.end(), user_rest.begin(), user_rest.end());
    return out;
}

json Manifest::resolve(const std::string& command) const {
    json j{{"command", command}};
    for (const auto& [name, emit] : fields_)
        j[name] = emit();
    return j;
}

} // namespace kapitza::cli

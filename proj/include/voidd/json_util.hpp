#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "voidd/error.hpp"

namespace voidd::detail {

using nlohmann::json;

inline std::string join_field(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

template <typename T>
T get_as(const json& value, const std::string& field) {
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        throw_validation(field, std::string("wrong type (") + e.what() + ")");
    }
}

template <typename T>
T require(const json& obj, const std::string& key, const std::string& prefix = {}) {
    const std::string field = join_field(prefix, key);
    if (!obj.is_object() || !obj.contains(key)) throw_validation(field, "missing required field");
    return get_as<T>(obj.at(key), field);
}

template <typename T>
T value_or(const json& obj, const std::string& key, T fallback, const std::string& prefix = {}) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
    return get_as<T>(obj.at(key), join_field(prefix, key));
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& prefix) {
    if (!obj.is_object()) throw_validation(prefix.empty() ? "<root>" : prefix, "expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw_validation(join_field(prefix, key), "unknown key");
    }
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Validation, path.string() + ": invalid JSON (" + e.what() + ")");
    }
}

inline void write_json_file(const json& j, const std::filesystem::path& path, int indent = 2) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << j.dump(indent) << "\n";
    if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

}  // namespace voidd::detail

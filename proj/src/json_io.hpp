#pragma once

#include "mvi/geometry.hpp"
#include "mvi/targets.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace mvi::detail {

using nlohmann::json;

json to_json(const VibrationComponent& c);
VibrationComponent component_from_json(const json& j);
json components_to_json(const std::vector<VibrationComponent>& cs);
std::vector<VibrationComponent> components_from_json(const json& j);

json to_json(const Target& target);
Target target_from_json(const json& j, const std::filesystem::path& base_dir);

json to_json(const SystemGeometry& g);
SystemGeometry geometry_from_json(const json& j);

json parse_json_text(const std::string& text, const std::string& what);
void write_json_file(const std::filesystem::path& path, const json& j);

// Rethrows nlohmann type/key errors as InvalidArgument naming `what`.
template <typename F>
auto with_json_context(const std::string& what, F&& f) -> decltype(f());

} // namespace mvi::detail

#include "mvi/errors.hpp"

namespace mvi::detail {

template <typename F>
auto with_json_context(const std::string& what, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw InvalidArgument(what + ": " + e.what());
    }
}

} // namespace mvi::detail

#pragma once

#include <string>
#include <string_view>

#include "pmean/types.hpp"

namespace pmean {

// JSON form: { "n": int, "goods": [[v_1, ..., v_n], ...], "meta": string }.
Instance parse_instance_json(std::string_view text);
std::string instance_to_json(const Instance& instance);

// CSV form: header "agent_1,...,agent_n", one row per good. Meta is not
// representable in CSV and is dropped on write.
Instance parse_instance_csv(std::string_view text);
std::string instance_to_csv(const Instance& instance);

// Dispatches on the .json / .csv extension.
Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

} // namespace pmean

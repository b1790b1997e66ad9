#pragma once

#include <string>
#include <vector>

namespace anonkit::qi_presets {

/// Named quasi-identifier sets for the evaluation datasets.
std::vector<std::string> adult12();
std::vector<std::string> adult10();
std::vector<std::string> adult8();
std::vector<std::string> loan18();

/// Lookup for {adult12, adult10, adult8, loan18}; throws ValidationError.
std::vector<std::string> by_name(const std::string& name);
std::vector<std::string> names();

}  // namespace anonkit::qi_presets

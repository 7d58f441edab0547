#pragma once

#include <string>
#include <vector>

#include "mves/types.hpp"

namespace mves {

// One row per slot, days and slots numbered from 1, values printed at full
// round-trip precision. Loaders take the expected slot count and reject
// malformed cells by line number and short days by day number.

void save_profiles_csv(const std::string& path, const std::vector<DayProfile>& days);
std::vector<DayProfile> load_profiles_csv(const std::string& path, int slots);

void save_errors_csv(const std::string& path, const std::vector<ErrorSample>& errors);
std::vector<ErrorSample> load_errors_csv(const std::string& path, int slots);

}  // namespace mves

#pragma once

#include <filesystem>
#include <string>

#include "truncfit/frequency_table.hpp"

#ifndef TRUNCFIT_DATA_DIR
#error "TRUNCFIT_DATA_DIR must be defined"
#endif

namespace test {

inline std::filesystem::path data(const std::string& name) {
    return std::filesystem::path(TRUNCFIT_DATA_DIR) / name;
}

inline truncfit::FrequencyTable load(const std::string& name) { return truncfit::load_csv(data(name)); }

}  // namespace test

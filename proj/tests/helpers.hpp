#pragma once

#include <filesystem>
#include <string>

#include "alns/tsp.hpp"

#ifndef ALNS_DATA_DIR
#define ALNS_DATA_DIR "data"
#endif

namespace testing {

inline std::filesystem::path data_dir() { return ALNS_DATA_DIR; }
inline std::filesystem::path tsplib(const std::string& name) { return data_dir() / "tsplib" / name; }

inline alns::Instance points(std::vector<alns::Point> pts, std::string name = "pts") {
  return alns::Instance(std::move(name), std::move(pts), alns::EdgeWeightType::euc_2d);
}

inline alns::Instance triangle() { return points({{0, 0}, {3, 0}, {0, 4}}, "triangle"); }

}  // namespace testing

#pragma once
// Persistent store for the single per-n scalar that fixes the global
// normalization constant against the character-series oracle.  All
// quantitative cross-checks are ratios, so the default of 1 is safe.

#include <cstdlib>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace hv {

inline std::string calibration_path() {
    if (const char* p = std::getenv("HONEYVOL_CALIBRATION")) return p;
    return "honeyvol_calibration.json";
}

inline std::map<int, double> load_calibration(const std::string& path = calibration_path()) {
    std::map<int, double> out;
    std::ifstream in(path);
    if (!in) return out;
    nlohmann::json j;
    in >> j;
    for (auto it = j.begin(); it != j.end(); ++it) out[std::stoi(it.key())] = it->get<double>();
    return out;
}

inline void save_calibration(const std::map<int, double>& table,
                             const std::string& path = calibration_path()) {
    nlohmann::json j;
    for (const auto& [n, v] : table) j[std::to_string(n)] = v;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

inline double calibration_for(int n, const std::string& path = calibration_path()) {
    auto t = load_calibration(path);
    auto it = t.find(n);
    return it == t.end() ? 1.0 : it->second;
}

}  // namespace hv

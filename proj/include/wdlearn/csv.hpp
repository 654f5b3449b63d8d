#pragma once

#include <string>

#include "wdlearn/acx.hpp"

namespace wdl {

class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& msg, long line)
        : std::runtime_error(msg), line(line) {}
    long line;
};

// Trajectory CSV, header `t,y,chi_1..chi_dx`; doubles are round-trip exact.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

// Round-trip exact double formatting shared by all CSV emitters.
std::string format_double(double v);

} // namespace wdl

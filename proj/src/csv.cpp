#include "wdlearn/csv.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wdl {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "t,y";
    for (int i = 1; i <= traj.d_x; ++i) out << ",chi_" << i;
    out << "\n";
    for (std::size_t t = 0; t < traj.size(); ++t) {
        out << t << ',' << format_double(traj.y[t]);
        for (double c : traj.chi_row(t)) out << ',' << format_double(c);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open: " + path, 0);

    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw CsvError("empty file: " + path, 0);
    ++lineno;

    // header: t,y,chi_1..chi_dx
    int d_x = 0;
    {
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 2 || fields[0] != "t" || fields[1] != "y")
            throw CsvError(path + ": bad header, expected t,y,chi_1.. (line 1)", 1);
        d_x = static_cast<int>(fields.size()) - 2;
    }

    Trajectory traj;
    traj.d_x = std::max(d_x, 1);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(ss, field, ',')) {
            double v = 0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc{} || ptr != field.data() + field.size())
                throw CsvError(path + ": malformed number '" + field + "' at line " +
                                   std::to_string(lineno),
                               lineno);
            row.push_back(v);
        }
        if (static_cast<int>(row.size()) != 2 + d_x)
            throw CsvError(path + ": wrong field count at line " + std::to_string(lineno),
                           lineno);
        traj.y.push_back(row[1]);
        if (d_x == 0)
            traj.chi.push_back(0.0);
        else
            for (int i = 0; i < d_x; ++i) traj.chi.push_back(row[2 + i]);
    }
    return traj;
}

} // namespace wdl

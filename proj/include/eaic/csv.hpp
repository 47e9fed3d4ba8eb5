#pragma once

#include "eaic/world.hpp"

#include <string>
#include <vector>

namespace eaic {

/// CSV column layout of a run log, one row per step:
///   t, q0..q{n-1}, qdot0..qdot{n-1}, ee_x, ee_y, ee_z, ee_zd, f_ext_z,
///   f_contact_z, lambda, beta, gamma, k, j, E_tank, P_task, E_total,
///   T_total, U_total, screw_state
/// Floating point is printed with 9 significant digits; the header row is
/// always present.
std::vector<std::string> log_columns(int dof);
std::string format_log_row(const LogRecord& record);
void write_log_csv(const std::string& path, const std::vector<LogRecord>& log, int dof);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
    double number(size_t row, int col) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace eaic

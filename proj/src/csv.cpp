#include "eaic/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eaic {

namespace {

std::string fmt(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

}  // namespace

std::vector<std::string> log_columns(int dof) {
    std::vector<std::string> cols;
    cols.emplace_back("t");
    for (int i = 0; i < dof; ++i) cols.push_back("q" + std::to_string(i));
    for (int i = 0; i < dof; ++i) cols.push_back("qdot" + std::to_string(i));
    for (const char* name : {"ee_x", "ee_y", "ee_z", "ee_zd", "f_ext_z", "f_contact_z", "lambda",
                             "beta", "gamma", "k", "j", "E_tank", "P_task", "E_total", "T_total",
                             "U_total", "screw_state"}) {
        cols.emplace_back(name);
    }
    return cols;
}

std::string format_log_row(const LogRecord& record) {
    std::ostringstream os;
    os << fmt(record.t);
    for (Eigen::Index i = 0; i < record.q.size(); ++i) os << ',' << fmt(record.q[i]);
    for (Eigen::Index i = 0; i < record.qdot.size(); ++i) os << ',' << fmt(record.qdot[i]);
    os << ',' << fmt(record.ee_position.x()) << ',' << fmt(record.ee_position.y()) << ','
       << fmt(record.ee_position.z()) << ',' << fmt(record.desired_z) << ','
       << fmt(record.external_force_z) << ',' << fmt(record.contact_force_z) << ','
       << fmt(record.diag.energy_scale) << ',' << fmt(record.diag.damping_scale) << ','
       << fmt(record.diag.power_scale) << ',' << record.diag.drain_gate << ','
       << record.diag.fill_gate << ',' << fmt(record.diag.tank_energy) << ','
       << fmt(record.diag.task_power) << ',' << fmt(record.diag.total_energy) << ','
       << fmt(record.diag.kinetic_energy) << ',' << fmt(record.diag.potential_energy) << ','
       << ScrewProcess::state_name(record.screw_state);
    return os.str();
}

void write_log_csv(const std::string& path, const std::vector<LogRecord>& log, int dof) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write log file: " + path);
    const auto cols = log_columns(dof);
    for (size_t i = 0; i < cols.size(); ++i) {
        if (i) out << ',';
        out << cols[i];
    }
    out << '\n';
    for (const auto& record : log) {
        out << format_log_row(record) << '\n';
    }
}

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

double CsvTable::number(size_t row, int col) const {
    return std::stod(rows.at(row).at(static_cast<size_t>(col)));
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open log file: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

}  // namespace eaic

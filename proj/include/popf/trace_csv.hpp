// Copyright 2026 The popf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POPF_TRACE_CSV_HPP_
#define POPF_TRACE_CSV_HPP_

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "popf/config_io.hpp"
#include "popf/errors.hpp"
#include "popf/scenario.hpp"

namespace popf {

/// Column order of the trace CSV. Optional fields serialize as empty cells.
inline const char* kTraceCsvHeader =
    "step,time,true_x,true_y,true_theta,est_x,est_y,est_theta,"
    "pred_x,pred_y,pred_theta,cmd_v,cmd_omega,applied_v,applied_omega,"
    "rho,alpha,phi,meas_x,meas_y,meas_theta,err_x,err_y,err_theta";

namespace csv {

inline void put(std::ostream& out, double v) { out << cfg::format_double(v); }

inline void put_opt(std::ostream& out, const std::optional<double>& v) {
    if (v) put(out, *v);
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

inline std::optional<double> cell_opt(const std::string& cell, long line_no) {
    if (cell.empty()) return std::nullopt;
    size_t pos = 0;
    double v;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw ParseError("bad number '" + cell + "'", line_no);
    }
    if (pos != cell.size()) throw ParseError("bad number '" + cell + "'", line_no);
    return v;
}

inline double cell(const std::string& c, long line_no) {
    const auto v = cell_opt(c, line_no);
    if (!v) throw ParseError("unexpected empty cell", line_no);
    return *v;
}

}  // namespace csv

/// Writes the rows in full decimal precision ('.' decimal separator, '\n'
/// endings); values survive a write/read round trip exactly.
inline void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << kTraceCsvHeader << "\n";
    for (const TraceRow& r : trace.rows) {
        out << r.step << ",";
        csv::put(out, r.time);
        out << ",";
        csv::put(out, r.truth.x);
        out << ",";
        csv::put(out, r.truth.y);
        out << ",";
        csv::put(out, r.truth.theta);
        out << ",";
        csv::put_opt(out, r.estimate ? std::optional(r.estimate->x) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.estimate ? std::optional(r.estimate->y) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.estimate ? std::optional(r.estimate->theta) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.predicted ? std::optional(r.predicted->x) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.predicted ? std::optional(r.predicted->y) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.predicted ? std::optional(r.predicted->theta) : std::nullopt);
        out << ",";
        csv::put(out, r.cmd_sent.v);
        out << ",";
        csv::put(out, r.cmd_sent.omega);
        out << ",";
        csv::put(out, r.cmd_applied.v);
        out << ",";
        csv::put(out, r.cmd_applied.omega);
        out << ",";
        csv::put(out, r.polar.rho);
        out << ",";
        csv::put(out, r.polar.alpha);
        out << ",";
        csv::put(out, r.polar.phi);
        out << ",";
        csv::put_opt(out, r.measurement ? std::optional((*r.measurement)(0)) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.measurement ? std::optional((*r.measurement)(1)) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.measurement ? std::optional((*r.measurement)(2)) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.est_error ? std::optional((*r.est_error)(0)) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.est_error ? std::optional((*r.est_error)(1)) : std::nullopt);
        out << ",";
        csv::put_opt(out, r.est_error ? std::optional((*r.est_error)(2)) : std::nullopt);
        out << "\n";
    }
}

inline void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write trace file '" + path + "'");
    write_trace_csv(trace, out);
}

inline std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    ++line_no;
    if (line != kTraceCsvHeader) throw ParseError("unexpected header", 1);
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = csv::split_line(line);
        if (cells.size() != 24) {
            throw ParseError("expected 24 cells, got " + std::to_string(cells.size()),
                             line_no);
        }
        TraceRow r;
        r.step = static_cast<long>(csv::cell(cells[0], line_no));
        r.time = csv::cell(cells[1], line_no);
        r.truth = {csv::cell(cells[2], line_no), csv::cell(cells[3], line_no),
                   csv::cell(cells[4], line_no)};
        const auto ex = csv::cell_opt(cells[5], line_no);
        if (ex) {
            r.estimate = RobotState{*ex, csv::cell(cells[6], line_no),
                                    csv::cell(cells[7], line_no)};
        }
        const auto px = csv::cell_opt(cells[8], line_no);
        if (px) {
            r.predicted = RobotState{*px, csv::cell(cells[9], line_no),
                                     csv::cell(cells[10], line_no)};
        }
        r.cmd_sent = {csv::cell(cells[11], line_no), csv::cell(cells[12], line_no)};
        r.cmd_applied = {csv::cell(cells[13], line_no), csv::cell(cells[14], line_no)};
        r.polar = {csv::cell(cells[15], line_no), csv::cell(cells[16], line_no),
                   csv::cell(cells[17], line_no)};
        const auto mx = csv::cell_opt(cells[18], line_no);
        if (mx) {
            r.measurement = Eigen::Vector3d(*mx, csv::cell(cells[19], line_no),
                                            csv::cell(cells[20], line_no));
        }
        const auto gx = csv::cell_opt(cells[21], line_no);
        if (gx) {
            r.est_error = Eigen::Vector3d(*gx, csv::cell(cells[22], line_no),
                                          csv::cell(cells[23], line_no));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<TraceRow> read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trace file '" + path + "'");
    return read_trace_csv(in);
}

}  // namespace popf

#endif  // POPF_TRACE_CSV_HPP_

// Trajectory and matrix serialization. The CSV layout is fixed: a header
//   t,f,penalty,residual,x_0_0,...,x_{n-1}_{p-1}
// followed by one row per sample, with the state flattened row-major and
// every value printed with "%.17g" so that files round-trip bit-exactly.
// The JSON variant carries the same fields plus the termination reason.

#pragma once

#include "landing/flow.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace landing::io {

using nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw std::invalid_argument("matrix_from_json: expected an array of rows");
    }
    const Index n = static_cast<Index>(j.size());
    const Index p = static_cast<Index>(j.front().size());
    Matrix m(n, p);
    for (Index i = 0; i < n; ++i) {
        if (static_cast<Index>(j[i].size()) != p) {
            throw std::invalid_argument("matrix_from_json: ragged rows");
        }
        for (Index jj = 0; jj < p; ++jj) m(i, jj) = j[i][jj].get<double>();
    }
    return m;
}

inline std::string trajectory_csv_header(Index n, Index p) {
    std::string header = "t,f,penalty,residual";
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) {
            header += ",x_" + std::to_string(i) + "_" + std::to_string(j);
        }
    }
    return header;
}

inline void write_trajectory_csv(const flow::Trajectory& traj, std::ostream& os) {
    os << trajectory_csv_header(traj.n, traj.p) << '\n';
    for (const auto& s : traj.samples) {
        os << format_double(s.t) << ',' << format_double(s.f) << ',' << format_double(s.penalty)
           << ',' << format_double(s.residual);
        for (Index i = 0; i < traj.n; ++i) {
            for (Index j = 0; j < traj.p; ++j) {
                os << ',' << format_double(s.x(i, j));
            }
        }
        os << '\n';
    }
}

inline std::string trajectory_to_csv(const flow::Trajectory& traj) {
    std::ostringstream os;
    write_trajectory_csv(traj, os);
    return os.str();
}

/// Parse the fixed CSV layout back into a trajectory. The CSV carries no
/// termination reason; loaded trajectories report t_max.
inline flow::Trajectory read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw std::invalid_argument("read_trajectory_csv: empty input");
    }
    Index n = 0, p = 0;
    {
        std::istringstream hs(line);
        std::string col;
        int fixed = 0;
        while (std::getline(hs, col, ',')) {
            if (col.rfind("x_", 0) == 0) {
                const auto sep = col.find('_', 2);
                if (sep == std::string::npos) {
                    throw std::invalid_argument("read_trajectory_csv: bad state column " + col);
                }
                n = std::max(n, static_cast<Index>(std::stol(col.substr(2, sep - 2))) + 1);
                p = std::max(p, static_cast<Index>(std::stol(col.substr(sep + 1))) + 1);
            } else {
                ++fixed;
            }
        }
        if (fixed != 4 || n < 1 || p < 1) {
            throw std::invalid_argument("read_trajectory_csv: unrecognized header");
        }
    }
    flow::Trajectory traj;
    traj.n = n;
    traj.p = p;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        flow::TrajectorySample s;
        s.x.resize(n, p);
        const auto next = [&]() {
            if (!std::getline(ls, cell, ',')) {
                throw std::invalid_argument("read_trajectory_csv: short row");
            }
            return std::stod(cell);
        };
        s.t = next();
        s.f = next();
        s.penalty = next();
        s.residual = next();
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < p; ++j) s.x(i, j) = next();
        }
        traj.samples.push_back(std::move(s));
    }
    return traj;
}

inline json trajectory_to_json(const flow::Trajectory& traj) {
    json samples = json::array();
    for (const auto& s : traj.samples) {
        samples.push_back({{"t", s.t},
                           {"f", s.f},
                           {"penalty", s.penalty},
                           {"residual", s.residual},
                           {"X", matrix_to_json(s.x)}});
    }
    return json{{"format", "landing-trajectory-v1"},
                {"n", traj.n},
                {"p", traj.p},
                {"terminated_by", flow::to_string(traj.terminated_by)},
                {"samples", std::move(samples)}};
}

inline flow::Trajectory trajectory_from_json(const json& j) {
    flow::Trajectory traj;
    traj.n = j.at("n").get<Index>();
    traj.p = j.at("p").get<Index>();
    const std::string reason = j.value("terminated_by", "t_max");
    if (reason == "residual_tol") traj.terminated_by = flow::Termination::residual_tol;
    else if (reason == "rank_failure") traj.terminated_by = flow::Termination::rank_failure;
    else traj.terminated_by = flow::Termination::t_max;
    for (const auto& js : j.at("samples")) {
        flow::TrajectorySample s;
        s.t = js.at("t").get<double>();
        s.f = js.at("f").get<double>();
        s.penalty = js.at("penalty").get<double>();
        s.residual = js.at("residual").get<double>();
        s.x = matrix_from_json(js.at("X"));
        if (s.x.rows() != traj.n || s.x.cols() != traj.p) {
            throw std::invalid_argument("trajectory_from_json: sample shape mismatch");
        }
        traj.samples.push_back(std::move(s));
    }
    return traj;
}

inline void save_trajectory(const flow::Trajectory& traj, const std::string& path,
                            const std::string& format) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_trajectory: cannot open " + path);
    if (format == "csv") {
        write_trajectory_csv(traj, os);
    } else if (format == "json") {
        os << trajectory_to_json(traj).dump(2) << '\n';
    } else {
        throw std::invalid_argument("save_trajectory: unknown format " + format);
    }
}

inline flow::Trajectory load_trajectory(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_trajectory: cannot open " + path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        json j;
        is >> j;
        return trajectory_from_json(j);
    }
    return read_trajectory_csv(is);
}

} // namespace landing::io

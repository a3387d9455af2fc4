#include "otabc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace otabc {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open file for writing: " + path.string());
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open file for reading: " + path.string());
    }
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

} // namespace

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_draws_csv(const std::filesystem::path& path, const AbcRun& run) {
    auto out = open_out(path);
    out << "draw_index";
    for (int c = 1; c <= run.theta_dim; ++c) {
        out << ",theta_" << c;
    }
    out << ",discrepancy,accepted\n";
    for (std::size_t i = 0; i < run.n_draws(); ++i) {
        out << i;
        const auto theta = run.theta(i);
        for (const double t : theta) {
            out << ',' << format_g17(t);
        }
        out << ',' << format_g17(run.discrepancies[i]) << ',' << (run.accepted(i) ? 1 : 0) << '\n';
    }
}

DrawsTable read_draws_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw InvalidInputError("read_draws_csv: empty file " + path.string());
    }
    const auto header = split_csv_line(line);
    if (header.size() < 4 || header.front() != "draw_index" || header.back() != "accepted") {
        throw InvalidInputError("read_draws_csv: unexpected header in " + path.string());
    }
    DrawsTable table;
    table.theta_dim = static_cast<int>(header.size()) - 3;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw InvalidInputError("read_draws_csv: wrong field count at line " +
                                    std::to_string(lineno));
        }
        double v = 0.0;
        for (int c = 0; c < table.theta_dim; ++c) {
            if (!parse_double(fields[1 + static_cast<std::size_t>(c)], v)) {
                throw InvalidInputError("read_draws_csv: bad theta at line " +
                                        std::to_string(lineno));
            }
            table.thetas.push_back(v);
        }
        if (!parse_double(fields[fields.size() - 2], v)) {
            throw InvalidInputError("read_draws_csv: bad discrepancy at line " +
                                    std::to_string(lineno));
        }
        table.discrepancies.push_back(v);
        if (!parse_double(fields.back(), v)) {
            throw InvalidInputError("read_draws_csv: bad accepted flag at line " +
                                    std::to_string(lineno));
        }
        table.accepted.push_back(v != 0.0 ? 1 : 0);
    }
    return table;
}

DataSet read_samples_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    DataSet data;
    data.dim = 0;
    std::string line;
    std::size_t lineno = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        bool numeric = true;
        for (const auto& f : fields) {
            double v = 0.0;
            if (!parse_double(f, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first_content_line) {
                first_content_line = false; // header row
                continue;
            }
            throw InvalidInputError("read_samples_csv: non-numeric field at line " +
                                    std::to_string(lineno) + " of " + path.string());
        }
        first_content_line = false;
        if (data.dim == 0) {
            data.dim = static_cast<int>(row.size());
        } else if (static_cast<int>(row.size()) != data.dim) {
            throw InvalidInputError("read_samples_csv: inconsistent column count at line " +
                                    std::to_string(lineno) + " of " + path.string());
        }
        data.values.insert(data.values.end(), row.begin(), row.end());
    }
    if (data.dim == 0 || data.values.empty()) {
        throw InvalidInputError("read_samples_csv: no data rows in " + path.string());
    }
    return data;
}

void write_convergence_csv(const std::filesystem::path& path,
                           std::span<const ConvergenceRow> rows) {
    auto out = open_out(path);
    out << "epsilon,region,abc_estimate,oracle_value,abs_error,mc_stderr\n";
    for (const auto& r : rows) {
        out << format_g17(r.epsilon) << ',' << r.region << ',' << format_g17(r.abc_estimate) << ','
            << format_g17(r.oracle_value) << ',' << format_g17(r.abs_error) << ','
            << format_g17(r.mc_stderr) << '\n';
    }
}

void write_t_map_csv(const std::filesystem::path& path, const AsymptoticEstimates& est) {
    auto out = open_out(path);
    out << "theta,t_hat\n";
    for (std::size_t i = 0; i < est.theta_grid.size(); ++i) {
        out << format_g17(est.theta_grid[i]) << ',' << format_g17(est.t_map[i]) << '\n';
    }
}

void write_bound_lines_csv(const std::filesystem::path& path, const LowerBoundReport& report) {
    auto out = open_out(path);
    out << "part,zeta,lhs,rhs,std_error,passes\n";
    for (const auto& l : report.lines) {
        out << l.part << ',' << format_g17(l.zeta) << ',' << format_g17(l.lhs) << ','
            << format_g17(l.rhs) << ',' << format_g17(l.std_error) << ',' << (l.passes ? 1 : 0)
            << '\n';
    }
}

} // namespace otabc

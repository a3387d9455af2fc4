#pragma once

#include <filesystem>

#include "otabc/abc.hpp"
#include "otabc/asymptotics.hpp"

namespace otabc {

// Decimal form with 17 significant digits; round-trips every double exactly.
std::string format_g17(double x);

// draws.csv: draw_index,theta_1..theta_dH,discrepancy,accepted
void write_draws_csv(const std::filesystem::path& path, const AbcRun& run);

struct DrawsTable {
    int theta_dim = 1;
    std::vector<double> thetas;
    std::vector<double> discrepancies;
    std::vector<std::uint8_t> accepted;

    std::size_t n_draws() const { return discrepancies.size(); }
};
DrawsTable read_draws_csv(const std::filesystem::path& path);

// One observation per row, d_Y columns, header row optional.
DataSet read_samples_csv(const std::filesystem::path& path);

// convergence.csv: epsilon,region,abc_estimate,oracle_value,abs_error,mc_stderr
void write_convergence_csv(const std::filesystem::path& path, std::span<const ConvergenceRow> rows);

// t_map.csv: theta,t_hat
void write_t_map_csv(const std::filesystem::path& path, const AsymptoticEstimates& est);

// bounds_lines.csv: part,zeta,lhs,rhs,std_error,passes
void write_bound_lines_csv(const std::filesystem::path& path, const LowerBoundReport& report);

} // namespace otabc

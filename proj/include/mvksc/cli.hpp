#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mvksc/data.hpp"
#include "mvksc/solver.hpp"

namespace mvksc {

/// FNV-1a content hash over the manifest and every file it references.
std::string dataset_fingerprint(const std::filesystem::path& manifest_path);

/// Everything needed to account for one fit run.
struct RunRecord {
    SolverConfig config;
    NormalizeMode normalize = NormalizeMode::UnitColumn;
    std::string manifest;
    std::string fingerprint;
    int views = 0;
    long samples = 0;
    int iterations = 0;
    bool converged = false;
    double residual_ca = 0.0;
    double residual_sum1 = 0.0;
    std::optional<double> acc;
    std::optional<double> nmi_score;
    std::vector<TraceRow> trace;
    double duration_ms = 0.0;
};

void save_run_record(const RunRecord& record, const std::filesystem::path& path);
RunRecord load_run_record(const std::filesystem::path& path);

/// Binary 8-bit PGM with pixel (i,j) = 255 * (1 - |M(i,j)| / max|M|); an all
/// zero matrix maps to solid white.
void write_pgm_heatmap(const Matrix& m, const std::filesystem::path& path);

/// Entry point behind the executable. Exit codes: 0 success, 2 usage/config
/// error, 3 data error, 4 numerical failure.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace mvksc

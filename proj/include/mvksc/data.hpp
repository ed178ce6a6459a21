#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvksc/types.hpp"

namespace mvksc {

/// Ordered per-view feature matrices (features x samples) sharing the sample
/// axis, with optional ground-truth labels.
struct MultiViewDataset {
    std::vector<Matrix> views;
    std::optional<std::vector<int>> labels;
    std::vector<std::string> names;

    int view_count() const { return static_cast<int>(views.size()); }
    Eigen::Index n() const { return views.empty() ? 0 : views.front().cols(); }
    void validate() const;
};

enum class NormalizeMode { None, UnitColumn, ZScore };

NormalizeMode parse_normalize_mode(const std::string& text);
std::string to_string(NormalizeMode mode);

// ---------------------------------------------------------------------------
// file formats
//
// Manifest: key = value lines, '#' comments. Keys: name, view.<i>.path,
// view.<i>.transpose (optional), labels.path (optional). Paths are resolved
// relative to the manifest. View files are headerless CSV with samples as
// columns unless transpose is set; the labels file holds one integer per line.
// ---------------------------------------------------------------------------

Matrix load_matrix_csv(const std::filesystem::path& path);
void save_matrix_csv(const Matrix& m, const std::filesystem::path& path);

std::vector<int> load_labels(const std::filesystem::path& path);
void save_labels(const std::vector<int>& labels, const std::filesystem::path& path);

/// Ordered key=value parser shared by manifests and solver config files.
std::map<std::string, std::string> load_key_values(const std::filesystem::path& path);

MultiViewDataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes view_<i>.csv, labels.csv (when present) and manifest.txt under dir.
/// Numbers carry 17 significant digits so a reload is bit-exact.
std::filesystem::path save_dataset(const MultiViewDataset& ds, const std::filesystem::path& dir,
                                   const std::string& name);

MultiViewDataset normalize(MultiViewDataset ds, NormalizeMode mode);

/// k clusters drawn from random low-dimensional linear subspaces, one ambient
/// dimension per view, Gaussian ambient noise, balanced labels.
MultiViewDataset synth_linear_subspaces(int n_per_cluster, int k, const std::vector<int>& dims_per_view,
                                        double ambient_noise, std::uint64_t seed);

/// Concentric 2-D rings sharing memberships across two views; each view gets
/// its own rotation and noise draw. Labels are ring indices.
MultiViewDataset synth_rings(int n_per_ring, int rings, const std::vector<double>& radii,
                             double noise, std::uint64_t seed);

}  // namespace mvksc

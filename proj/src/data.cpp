#include "mvksc/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace mvksc {

namespace fs = std::filesystem;

void MultiViewDataset::validate() const {
    if (views.empty()) throw data_error("dataset: no views");
    Eigen::Index cols = views.front().cols();
    if (cols < 2) throw data_error("dataset: need at least 2 samples");
    for (std::size_t v = 0; v < views.size(); ++v) {
        if (views[v].rows() < 1) throw data_error("dataset: view " + std::to_string(v) + " has no features");
        if (views[v].cols() != cols)
            throw data_error("dataset: sample count mismatch between views 0 and " + std::to_string(v));
        if (!all_finite(views[v]))
            throw data_error("dataset: non-finite entry in view " + std::to_string(v));
    }
    if (labels && static_cast<Eigen::Index>(labels->size()) != cols)
        throw data_error("dataset: label count does not match sample count");
    if (labels)
        for (int l : *labels)
            if (l < 0) throw data_error("dataset: negative label");
}

NormalizeMode parse_normalize_mode(const std::string& text) {
    if (text == "none") return NormalizeMode::None;
    if (text == "unit") return NormalizeMode::UnitColumn;
    if (text == "zscore") return NormalizeMode::ZScore;
    throw config_error("unrecognized normalize mode '" + text + "' (expected none, unit, zscore)");
}

std::string to_string(NormalizeMode mode) {
    switch (mode) {
        case NormalizeMode::None: return "none";
        case NormalizeMode::UnitColumn: return "unit";
        case NormalizeMode::ZScore: return "zscore";
    }
    return "none";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, const fs::path& file, std::size_t line, std::size_t col) {
    std::string t = trim(cell);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw data_error(file.string() + ": non-numeric cell '" + cell + "' at line " +
                         std::to_string(line) + ", column " + std::to_string(col));
    return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw config_error("expected a boolean for '" + key + "', got '" + text + "'");
}

}  // namespace

Matrix load_matrix_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path.string() + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        std::size_t col = 1;
        for (;;) {
            std::size_t comma = line.find(',', start);
            std::string cell = (comma == std::string::npos) ? line.substr(start)
                                                            : line.substr(start, comma - start);
            row.push_back(parse_cell(cell, path, lineno, col));
            if (comma == std::string::npos) break;
            start = comma + 1;
            ++col;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw data_error(path.string() + ": ragged row at line " + std::to_string(lineno) +
                             " (expected " + std::to_string(rows.front().size()) + " cells, got " +
                             std::to_string(row.size()) + ")");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error(path.string() + ": empty matrix file");

    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

void save_matrix_csv(const Matrix& m, const fs::path& path) {
    std::FILE* out = std::fopen(path.string().c_str(), "wb");
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            std::fprintf(out, "%s%.17g", j == 0 ? "" : ",", m(i, j));
        std::fputc('\n', out);
    }
    std::fclose(out);
}

std::vector<int> load_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        int value = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc{} || ptr != t.data() + t.size())
            throw data_error(path.string() + ": non-integer label '" + t + "' at line " +
                             std::to_string(lineno));
        labels.push_back(value);
    }
    if (labels.empty()) throw data_error(path.string() + ": empty label file");
    return labels;
}

void save_labels(const std::vector<int>& labels, const fs::path& path) {
    std::FILE* out = std::fopen(path.string().c_str(), "wb");
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    for (int l : labels) std::fprintf(out, "%d\n", l);
    std::fclose(out);
}

std::map<std::string, std::string> load_key_values(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw data_error(path.string() + ": expected 'key = value' at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw data_error(path.string() + ": empty key at line " + std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

MultiViewDataset load_dataset(const fs::path& manifest_path) {
    auto kv = load_key_values(manifest_path);
    fs::path base = manifest_path.parent_path();

    MultiViewDataset ds;
    std::vector<fs::path> view_files;
    for (int i = 0;; ++i) {
        auto it = kv.find("view." + std::to_string(i) + ".path");
        if (it == kv.end()) break;
        fs::path view_path = base / it->second;
        Matrix m = load_matrix_csv(view_path);
        auto tr = kv.find("view." + std::to_string(i) + ".transpose");
        if (tr != kv.end() && parse_bool(tr->second, tr->first)) m.transposeInPlace();
        ds.views.push_back(std::move(m));
        ds.names.push_back(it->second);
        view_files.push_back(view_path);
    }
    if (ds.views.empty()) {
        for (const auto& [key, value] : kv)
            if (key.rfind("view.", 0) == 0)
                throw data_error(manifest_path.string() +
                                 ": view indices must be contiguous and start at view.0");
        throw data_error(manifest_path.string() + ": no view.<i>.path entries");
    }

    for (std::size_t v = 1; v < ds.views.size(); ++v)
        if (ds.views[v].cols() != ds.views[0].cols())
            throw data_error("sample count mismatch: '" + view_files[0].string() + "' has " +
                             std::to_string(ds.views[0].cols()) + " columns, '" +
                             view_files[v].string() + "' has " + std::to_string(ds.views[v].cols()));

    if (auto it = kv.find("labels.path"); it != kv.end())
        ds.labels = load_labels(base / it->second);

    ds.validate();
    return ds;
}

fs::path save_dataset(const MultiViewDataset& ds, const fs::path& dir, const std::string& name) {
    ds.validate();
    fs::create_directories(dir);

    std::ofstream manifest(dir / "manifest.txt");
    if (!manifest) throw data_error("cannot write '" + (dir / "manifest.txt").string() + "'");
    manifest << "name = " << name << "\n";
    for (int v = 0; v < ds.view_count(); ++v) {
        std::string file = "view_" + std::to_string(v) + ".csv";
        save_matrix_csv(ds.views[v], dir / file);
        manifest << "view." << v << ".path = " << file << "\n";
    }
    if (ds.labels) {
        save_labels(*ds.labels, dir / "labels.csv");
        manifest << "labels.path = labels.csv\n";
    }
    return dir / "manifest.txt";
}

MultiViewDataset normalize(MultiViewDataset ds, NormalizeMode mode) {
    ds.validate();
    if (mode == NormalizeMode::None) return ds;

    for (Matrix& view : ds.views) {
        if (mode == NormalizeMode::UnitColumn) {
            for (Eigen::Index j = 0; j < view.cols(); ++j) {
                double norm = view.col(j).norm();
                if (norm > 0.0) view.col(j) /= norm;
            }
        } else {
            for (Eigen::Index i = 0; i < view.rows(); ++i) {
                double mean = view.row(i).mean();
                Eigen::RowVectorXd centered = (view.row(i).array() - mean).matrix();
                double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(view.cols()));
                view.row(i) = sd < 1e-12 ? Eigen::RowVectorXd::Zero(view.cols()) : (centered / sd).eval();
            }
        }
    }
    return ds;
}

MultiViewDataset synth_linear_subspaces(int n_per_cluster, int k, const std::vector<int>& dims_per_view,
                                        double ambient_noise, std::uint64_t seed) {
    if (k < 2) throw config_error("synth_linear_subspaces: need k >= 2");
    if (n_per_cluster < 1) throw config_error("synth_linear_subspaces: need n_per_cluster >= 1");
    if (dims_per_view.empty()) throw config_error("synth_linear_subspaces: need at least one view");
    for (int d : dims_per_view)
        if (d < 2) throw config_error("synth_linear_subspaces: view dimension must be >= 2");
    if (ambient_noise < 0.0) throw config_error("synth_linear_subspaces: negative noise");

    Rng rng(seed);
    const int n = n_per_cluster * k;
    const int max_sub_dim = 3;
    MultiViewDataset ds;

    // Shared latent coordinates per cluster; every view observes the same
    // intrinsic points through its own random subspace basis.
    std::vector<Matrix> latent(k);
    for (int c = 0; c < k; ++c) {
        latent[c] = Matrix(max_sub_dim, n_per_cluster);
        for (Eigen::Index i = 0; i < latent[c].rows(); ++i)
            for (Eigen::Index j = 0; j < latent[c].cols(); ++j) latent[c](i, j) = rng.normal();
    }

    for (std::size_t v = 0; v < dims_per_view.size(); ++v) {
        const int dim = dims_per_view[v];
        const int sub_dim = std::min(max_sub_dim, dim - 1);
        Matrix view(dim, n);
        for (int c = 0; c < k; ++c) {
            Matrix raw(dim, sub_dim);
            for (Eigen::Index i = 0; i < raw.rows(); ++i)
                for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(i, j) = rng.normal();
            Eigen::HouseholderQR<Matrix> qr(raw);
            Matrix basis = qr.householderQ() * Matrix::Identity(dim, sub_dim);

            view.middleCols(c * n_per_cluster, n_per_cluster) = basis * latent[c].topRows(sub_dim);
        }
        if (ambient_noise > 0.0)
            for (Eigen::Index i = 0; i < view.rows(); ++i)
                for (Eigen::Index j = 0; j < view.cols(); ++j) view(i, j) += ambient_noise * rng.normal();
        ds.views.push_back(std::move(view));
        ds.names.push_back("subspace_view_" + std::to_string(v));
    }

    std::vector<int> labels(n);
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < n_per_cluster; ++i) labels[c * n_per_cluster + i] = c;
    ds.labels = std::move(labels);
    ds.validate();
    return ds;
}

MultiViewDataset synth_rings(int n_per_ring, int rings, const std::vector<double>& radii,
                             double noise, std::uint64_t seed) {
    if (rings < 2) throw config_error("synth_rings: need at least 2 rings");
    if (n_per_ring < 1) throw config_error("synth_rings: need n_per_ring >= 1");
    if (static_cast<int>(radii.size()) != rings) throw config_error("synth_rings: one radius per ring");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1])) throw config_error("synth_rings: radii must be strictly increasing");
    if (!(radii.front() > 0.0)) throw config_error("synth_rings: radii must be positive");
    if (noise < 0.0) throw config_error("synth_rings: negative noise");

    Rng rng(seed);
    const int n = n_per_ring * rings;
    const double two_pi = 6.283185307179586476925286766559;

    std::vector<double> base_angle(n);
    std::vector<int> labels(n);
    for (int r = 0; r < rings; ++r)
        for (int i = 0; i < n_per_ring; ++i) {
            int idx = r * n_per_ring + i;
            base_angle[idx] = rng.uniform01() * two_pi;
            labels[idx] = r;
        }

    MultiViewDataset ds;
    const int n_views = 2;
    for (int v = 0; v < n_views; ++v) {
        double rotation = rng.uniform01() * two_pi;
        Matrix view(2, n);
        for (int idx = 0; idx < n; ++idx) {
            double angle = base_angle[idx] + rotation;
            double radius = radii[labels[idx]];
            view(0, idx) = radius * std::cos(angle) + noise * rng.normal();
            view(1, idx) = radius * std::sin(angle) + noise * rng.normal();
        }
        ds.views.push_back(std::move(view));
        ds.names.push_back("ring_view_" + std::to_string(v));
    }
    ds.labels = std::move(labels);
    ds.validate();
    return ds;
}

}  // namespace mvksc

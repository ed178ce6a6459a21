#include "mvksc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvksc {

namespace {

void check_pair(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.empty() || truth.empty()) throw data_error("metrics: empty label vector");
    if (pred.size() != truth.size()) throw data_error("metrics: label length mismatch");
    for (int v : pred)
        if (v < 0) throw data_error("metrics: negative label");
    for (int v : truth)
        if (v < 0) throw data_error("metrics: negative label");
}

std::vector<std::vector<long long>> confusion(const std::vector<int>& pred,
                                              const std::vector<int>& truth, int& k) {
    int kp = 1 + *std::max_element(pred.begin(), pred.end());
    int kt = 1 + *std::max_element(truth.begin(), truth.end());
    k = std::max(kp, kt);
    std::vector<std::vector<long long>> counts(k, std::vector<long long>(k, 0));
    for (std::size_t i = 0; i < pred.size(); ++i) counts[pred[i]][truth[i]]++;
    return counts;
}

// Hungarian algorithm on a square cost matrix (minimization): potentials plus
// shortest augmenting paths, O(k^3).
long long min_cost_assignment(const std::vector<std::vector<long long>>& cost) {
    const int n = static_cast<int>(cost.size());
    const long long inf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> match(n + 1, 0);  // column -> assigned row
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = match[j0];
            long long delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    long long total = 0;
    for (int j = 1; j <= n; ++j) total += cost[match[j] - 1][j - 1];
    return total;
}

}  // namespace

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_pair(pred, truth);
    int k = 0;
    auto counts = confusion(pred, truth, k);

    long long top = 0;
    for (const auto& row : counts)
        for (long long c : row) top = std::max(top, c);

    // maximize matched counts == minimize (top - count)
    std::vector<std::vector<long long>> cost(k, std::vector<long long>(k, 0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) cost[i][j] = top - counts[i][j];

    long long matched = static_cast<long long>(k) * top - min_cost_assignment(cost);
    return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_pair(pred, truth);
    int k = 0;
    auto counts = confusion(pred, truth, k);
    const double n = static_cast<double>(pred.size());

    std::vector<double> row_sum(k, 0.0), col_sum(k, 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            row_sum[i] += static_cast<double>(counts[i][j]);
            col_sum[j] += static_cast<double>(counts[i][j]);
        }

    auto entropy = [&](const std::vector<double>& marginal) {
        double h = 0.0;
        for (double c : marginal)
            if (c > 0.0) h -= (c / n) * std::log(c / n);
        return h;
    };
    double h_pred = entropy(row_sum);
    double h_truth = entropy(col_sum);

    if (h_pred == 0.0 || h_truth == 0.0) {
        // a constant partition carries no information; two constant partitions
        // agree up to relabeling
        return (h_pred == 0.0 && h_truth == 0.0) ? 1.0 : 0.0;
    }

    double mi = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            double c = static_cast<double>(counts[i][j]);
            if (c > 0.0) mi += (c / n) * std::log(c * n / (row_sum[i] * col_sum[j]));
        }

    return std::clamp(mi / std::sqrt(h_pred * h_truth), 0.0, 1.0);
}

}  // namespace mvksc

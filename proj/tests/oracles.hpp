#pragma once

// Independent reference computations used only by the tests. None of these
// call into the code paths they are used to check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "advda/core_model.hpp"
#include "advda/featurize.hpp"
#include "advda/matrix.hpp"

namespace oracle {

inline long double sigmoid_ld(long double z) {
    return 1.0L / (1.0L + std::exp(-z));
}

// Summed NLL in long double, no clamping (callers keep logits moderate).
inline double nll(const std::vector<double>& theta, const advda::Matrix& X, const std::vector<double>& y) {
    long double total = 0.0L;
    const std::size_t d = X.cols();
    for (std::size_t i = 0; i < X.rows(); ++i) {
        long double z = theta[d];
        for (std::size_t j = 0; j < d; ++j) {
            z += static_cast<long double>(theta[j]) * X(i, j);
        }
        const long double p = sigmoid_ld(z);
        total -= y[i] == 1.0 ? std::log(p) : std::log(1.0L - p);
    }
    return static_cast<double>(total);
}

// Central differences of f at v with step h.
inline std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> v, double h = 1e-6) {
    std::vector<double> g(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double orig = v[k];
        v[k] = orig + h;
        const double up = f(v);
        v[k] = orig - h;
        const double down = f(v);
        v[k] = orig;
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

// max_k |a_k - b_k| / max(1, |b_k|)
inline double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(1.0, std::abs(b[k])));
    }
    return worst;
}

// Pairwise count over every (positive, negative) pair.
inline double auroc_pairs(const std::vector<double>& s, const std::vector<double>& y) {
    double num = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1.0) {
            continue;
        }
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] != 0.0) {
                continue;
            }
            pairs += 1.0;
            num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    }
    return num / pairs;
}

// Builds O and E explicitly with weights |i-j|/(C-1).
inline double weighted_kappa(const std::vector<int>& pred, const std::vector<int>& truth, int C) {
    std::vector<std::vector<double>> O(C, std::vector<double>(C, 0.0));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        O[pred[i]][truth[i]] += 1.0;
    }
    std::vector<double> rows(C, 0.0);
    std::vector<double> cols(C, 0.0);
    for (int a = 0; a < C; ++a) {
        for (int b = 0; b < C; ++b) {
            rows[a] += O[a][b];
            cols[b] += O[a][b];
        }
    }
    const double n = static_cast<double>(pred.size());
    double wo = 0.0;
    double we = 0.0;
    for (int a = 0; a < C; ++a) {
        for (int b = 0; b < C; ++b) {
            const double w = std::abs(a - b) / static_cast<double>(C - 1);
            wo += w * O[a][b];
            we += w * rows[a] * cols[b] / n;
        }
    }
    return 1.0 - wo / we;
}

// Iterative FGSM that re-evaluates the input gradient at every step.
inline std::vector<double> fgsm_stepwise(const std::vector<double>& theta, const std::vector<double>& x, double y,
                                         double eps, std::size_t steps) {
    std::vector<double> adv = x;
    const std::size_t d = x.size();
    const double step = eps / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        double z = theta[d];
        for (std::size_t j = 0; j < d; ++j) {
            z += theta[j] * adv[j];
        }
        const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        for (std::size_t j = 0; j < d; ++j) {
            const double g = (p - y) * theta[j];
            const double sg = g > 0 ? 1.0 : (g < 0 ? -1.0 : 0.0);
            adv[j] = std::min(std::max(adv[j] + step * sg, x[j] - eps), x[j] + eps);
        }
    }
    return adv;
}

// Window statistics by scanning every measurement against the window bounds.
inline std::vector<double> featurize_bruteforce(const advda::TimeSeriesEpisode& ep, double fill) {
    std::vector<double> out;
    const double L = ep.length_hours;
    const double bounds[7][2] = {{0, L},           {0, 0.1 * L},      {0, 0.25 * L}, {0, 0.5 * L},
                                 {L - 0.5 * L, L}, {L - 0.25 * L, L}, {L - 0.1 * L, L}};
    for (const auto& series : ep.variables) {
        for (const auto& b : bounds) {
            std::vector<double> vals;
            for (const auto& m : series) {
                if (m.time_hours >= b[0] && m.time_hours <= b[1]) {
                    vals.push_back(m.value);
                }
            }
            if (vals.empty()) {
                out.insert(out.end(), {fill, fill, fill, fill, fill, 0.0});
                continue;
            }
            const double n = static_cast<double>(vals.size());
            double mn = vals[0], mx = vals[0], sum = 0.0;
            for (double v : vals) {
                mn = std::min(mn, v);
                mx = std::max(mx, v);
                sum += v;
            }
            const double mean = sum / n;
            double m2 = 0.0, m3 = 0.0;
            for (double v : vals) {
                m2 += (v - mean) * (v - mean);
                m3 += (v - mean) * (v - mean) * (v - mean);
            }
            m2 /= n;
            m3 /= n;
            const double skew = (vals.size() < 3 || m2 == 0.0) ? 0.0 : m3 / std::pow(m2, 1.5);
            out.insert(out.end(), {mn, mx, mean, std::sqrt(m2), skew, n});
        }
    }
    return out;
}

inline advda::Matrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    advda::Matrix m(n, d);
    for (auto& v : m.data()) {
        v = normal(rng);
    }
    return m;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = normal(rng);
    }
    return v;
}

inline std::vector<double> random_labels(std::mt19937_64& rng, std::size_t n) {
    std::bernoulli_distribution coin(0.5);
    std::vector<double> y(n);
    for (auto& v : y) {
        v = coin(rng) ? 1.0 : 0.0;
    }
    return y;
}

}  // namespace oracle

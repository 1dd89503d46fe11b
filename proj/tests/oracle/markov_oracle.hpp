// Independent revenue oracle for one selfish miner on a longest-chain protocol.
//
// States of the lead chain: 0 (no lead), 0' (tie after a match), 1, 2, ..., N.
// The chain is truncated at N; with alpha < 1/2 the stationary mass beyond a few
// hundred states is far below double precision. The stationary distribution is
// solved densely (Gaussian elimination with partial pivoting), then revenue is the
// expected attacker reward per transition over the expected total reward.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

struct MarkovRevenue {
    double attacker = 0.0;  // expected attacker blocks per transition
    double honest = 0.0;
    double revenue() const { return attacker / (attacker + honest); }
};

inline std::vector<double> stationary(const std::vector<std::vector<double>>& P) {
    const std::size_t n = P.size();
    // Solve pi (P - I) = 0 with sum(pi) = 1: transpose, replace last equation.
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1.0;
    A[n - 1][n] = 1.0;

    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        }
        if (std::abs(A[piv][c]) < 1e-300) throw std::runtime_error("stationary: singular system");
        std::swap(A[c], A[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || A[r][c] == 0.0) continue;
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
    return pi;
}

// Index 0 = state 0, 1 = state 0', k + 1 = lead k for k >= 1.
inline MarkovRevenue selfish_revenue(double alpha, double gamma, std::size_t max_lead = 200) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("alpha must lie in (0, 0.5)");
    const double a = alpha, b = 1.0 - alpha;
    const std::size_t n = max_lead + 2;
    auto lead = [](std::size_t k) { return k + 1; };
    std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
    // Reward earned on each transition, indexed like P.
    std::vector<std::vector<double>> ra(n, std::vector<double>(n, 0.0)), rh(n, std::vector<double>(n, 0.0));

    P[0][lead(1)] = a;
    P[0][0] = b;
    rh[0][0] = 1.0;

    // Tie: the next block settles it. Attacker on its branch wins 2; honest on the
    // attacker's branch splits 1/1; honest on its own branch wins 2.
    P[1][0] = 1.0;
    ra[1][0] = a * 2.0 + b * gamma * 1.0;
    rh[1][0] = b * gamma * 1.0 + b * (1.0 - gamma) * 2.0;

    P[lead(1)][lead(2)] = a;
    P[lead(1)][1] = b;
    for (std::size_t k = 2; k <= max_lead; ++k) {
        const std::size_t up = std::min(k + 1, max_lead);
        P[lead(k)][lead(up)] += a;
        if (k == 2) {
            P[lead(k)][0] += b;
            ra[lead(k)][0] = 2.0;
        } else {
            P[lead(k)][lead(k - 1)] += b;
            ra[lead(k)][lead(k - 1)] = 1.0;
        }
    }

    const auto pi = stationary(P);
    MarkovRevenue out;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (P[i][j] == 0.0) continue;
            // ra/rh on the tie row are already expectations over the next block.
            const double w = i == 1 ? pi[i] : pi[i] * P[i][j];
            out.attacker += w * ra[i][j];
            out.honest += w * rh[i][j];
        }
    }
    return out;
}

// Closed form from the original selfish-mining analysis, used to sanity-check the
// chain construction above.
inline double closed_form_revenue(double a, double g) {
    const double num = a * (1 - a) * (1 - a) * (4 * a + g * (1 - 2 * a)) - a * a * a;
    const double den = 1 - a * (1 + (2 - a) * a);
    return num / den;
}

}  // namespace oracle

#include "oracles.hpp"

#include <cmath>

namespace cac::oracle {

double erlang_b(int channels, double offered_load) {
    double b = 1.0;
    for (int k = 1; k <= channels; ++k) {
        b = offered_load * b / (k + offered_load * b);
    }
    return b;
}

std::vector<long double> band_distribution(int channels, int m, int n, double alpha,
                                           double lambda_n, double lambda_h, double mu) {
    const long double full = static_cast<long double>(lambda_n) + lambda_h;
    const long double thin = static_cast<long double>(alpha) * lambda_n + lambda_h;
    const long double hand = lambda_h;
    std::vector<long double> w(static_cast<std::size_t>(channels) + 1);
    long double factorial = 1.0L;
    for (int i = 0; i <= channels; ++i) {
        if (i > 0) factorial *= i;
        const int low = std::min(i, m);
        const int mid = std::max(0, std::min(i, n) - m);
        const int high = std::max(0, i - n);
        long double num = 1.0L;
        if (low > 0) num *= std::pow(full, low);
        if (mid > 0) num *= std::pow(thin, mid);
        if (high > 0) num *= std::pow(hand, high);
        w[static_cast<std::size_t>(i)] = num / (factorial * std::pow(static_cast<long double>(mu), i));
    }
    long double sum = 0.0L;
    for (auto v : w) sum += v;
    for (auto& v : w) v /= sum;
    return w;
}

BandMetrics band_metrics(int channels, int m, int n, double alpha, double lambda_n,
                         double lambda_h, double mu) {
    const auto p = band_distribution(channels, m, n, alpha, lambda_n, lambda_h, mu);
    long double mid = 0.0L, top = 0.0L;
    for (int i = m; i < n; ++i) mid += p[static_cast<std::size_t>(i)];
    for (int i = n; i <= channels; ++i) top += p[static_cast<std::size_t>(i)];
    return {static_cast<double>((1.0L - alpha) * mid + top),
            static_cast<double>(p[static_cast<std::size_t>(channels)])};
}

double flow_balance_root(int channels, int m, int n, double alpha, double lambda_n, double mu_a,
                         double eta) {
    const double mu = mu_a + eta;
    const double p_h = eta / (eta + mu_a);
    auto gap = [&](double lambda_h) {
        const BandMetrics b = band_metrics(channels, m, n, alpha, lambda_n, lambda_h, mu);
        return lambda_n * p_h * (1.0 - b.p_block) / (1.0 - p_h * (1.0 - b.p_drop)) - lambda_h;
    };
    double lo = 0.0;
    double hi = lambda_n * p_h / (1.0 - p_h);
    for (int k = 0; k < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++k) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace cac::oracle

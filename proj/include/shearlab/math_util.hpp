#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace shearlab {

// <x>^s = (1+x^2)^{s/2}
inline double japanese_bracket(double x, double s = 1.0) {
    return std::pow(1.0 + x * x, 0.5 * s);
}

// <k,eta>^s = (1+k^2)^{s/2} + (1+eta^2)^{s/2}  (sum convention used throughout)
inline double sobolev_bracket(double k, double eta, double s) {
    return japanese_bracket(k, s) + japanese_bracket(eta, s);
}

// Deterministic normal deviates (Box-Muller over splitmix64/xorshift stream),
// so seeded data is reproducible across standard libraries.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    double uniform() {  // in (0,1)
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Monotone cubic interpolant (Steffen 1990). Never overshoots, preserves
// monotonicity of the data; C^1.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: bad data");
        slopes_.resize(n);
        std::vector<double> h(n - 1), s(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            if (h[i] <= 0) throw std::invalid_argument("MonotoneCubic: x not increasing");
            s[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        slopes_[0] = s[0];
        slopes_[n - 1] = s[n - 2];
        for (size_t i = 1; i + 1 < n; ++i) {
            double p = (s[i - 1] * h[i] + s[i] * h[i - 1]) / (h[i - 1] + h[i]);
            double lim = 2.0 * std::min(std::abs(s[i - 1]), std::abs(s[i]));
            if (s[i - 1] * s[i] <= 0)
                slopes_[i] = 0.0;
            else if (std::abs(p) > lim)
                slopes_[i] = (p > 0 ? lim : -lim);
            else
                slopes_[i] = p;
        }
    }

    double operator()(double xq) const {
        const size_t n = x_.size();
        if (xq <= x_.front()) return y_.front() + slopes_.front() * (xq - x_.front());
        if (xq >= x_.back()) return y_.back() + slopes_.back() * (xq - x_.back());
        size_t i = static_cast<size_t>(std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin()) - 1;
        double h = x_[i + 1] - x_[i];
        double u = (xq - x_[i]) / h;
        double a = y_[i], b = slopes_[i] * h;
        double c = 3.0 * (y_[i + 1] - y_[i]) - (2.0 * slopes_[i] + slopes_[i + 1]) * h;
        double d = 2.0 * (y_[i] - y_[i + 1]) + (slopes_[i] + slopes_[i + 1]) * h;
        return a + u * (b + u * (c + u * d));
    }

  private:
    std::vector<double> x_, y_;
    std::vector<double> slopes_;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;  // standard error of the slope
};

// Ordinary least squares y ~ intercept + slope*x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 points");
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double ss = 0;
        for (size_t i = 0; i < n; ++i) {
            double r = y[i] - fit.intercept - fit.slope * x[i];
            ss += r * r;
        }
        fit.slope_stderr = std::sqrt(ss / ((n - 2) * sxx));
    }
    return fit;
}

// Gauss-Legendre nodes/weights on [a,b]. Newton iteration on Legendre roots.
inline void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                           std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = 0.5 * (b - a) * x + 0.5 * (a + b);
        weights[i] = (b - a) / ((1.0 - x * x) * dp * dp);
    }
}

// C-infinity bump, == 1 on [-r1, r1], == 0 outside [-r2, r2], |x| transitions
// by the standard exp(-1/x) smoothstep.
inline double smooth_cutoff(double x, double r1, double r2) {
    double ax = std::abs(x);
    if (ax <= r1) return 1.0;
    if (ax >= r2) return 0.0;
    auto f = [](double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; };
    double u = (r2 - ax) / (r2 - r1);
    return f(u) / (f(u) + f(1.0 - u));
}

}  // namespace shearlab

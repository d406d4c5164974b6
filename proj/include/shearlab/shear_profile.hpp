#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shearlab/fft.hpp"
#include "shearlab/math_util.hpp"

namespace shearlab {

// 1-d periodic spectral helpers on y (or v) in [-L, L), n even.
namespace prof1d {

inline double xi_of(int j, int n, double L) {
    int m = j < n / 2 ? j : j - n;
    return (M_PI / L) * m;
}

inline std::vector<std::complex<double>> to_spectral(const std::vector<double>& f, double /*L*/) {
    const int n = static_cast<int>(f.size());
    std::vector<std::complex<double>> c(n);
    for (int j = 0; j < n; ++j) c[j] = f[j];
    fft1(c.data(), c.data(), n, FFTW_FORWARD);
    for (int j = 0; j < n; ++j) {
        int m = j < n / 2 ? j : j - n;
        double s = (m % 2 == 0) ? 1.0 : -1.0;  // grid starts at -L
        c[j] *= s / n;
    }
    return c;
}

inline std::vector<double> to_physical(std::vector<std::complex<double>> c) {
    const int n = static_cast<int>(c.size());
    for (int j = 0; j < n; ++j) {
        int m = j < n / 2 ? j : j - n;
        double s = (m % 2 == 0) ? 1.0 : -1.0;
        c[j] *= s;
    }
    fft1(c.data(), c.data(), n, FFTW_BACKWARD);
    std::vector<double> f(n);
    for (int j = 0; j < n; ++j) f[j] = c[j].real();
    return f;
}

inline std::vector<double> derivative(const std::vector<double>& f, double L, int order = 1) {
    auto c = to_spectral(f, L);
    const int n = static_cast<int>(c.size());
    for (int j = 0; j < n; ++j) {
        std::complex<double> ix(0.0, xi_of(j, n, L));
        std::complex<double> w = 1.0;
        for (int o = 0; o < order; ++o) w *= ix;
        c[j] *= w;
    }
    // Nyquist mode of odd-order derivatives has no consistent real counterpart
    if (order % 2 == 1) c[n / 2] = 0.0;
    return to_physical(std::move(c));
}

/// evaluate a spectral series at an arbitrary point (real part)
inline double eval_trig(const std::vector<std::complex<double>>& c, double L, double y) {
    const int n = static_cast<int>(c.size());
    double acc = c[0].real();
    for (int m = 1; m < n / 2; ++m) {
        double xi = (M_PI / L) * m;
        std::complex<double> e(std::cos(xi * y), std::sin(xi * y));
        acc += 2.0 * (c[m] * e).real();  // conjugate pair folded
    }
    return acc;
}

/// exact trigonometric upsampling by an integer factor
inline std::vector<double> upsample(const std::vector<double>& f, double L, int factor) {
    auto c = to_spectral(f, L);
    const int n = static_cast<int>(c.size());
    const int N = n * factor;
    std::vector<std::complex<double>> C(N, 0.0);
    for (int j = 0; j < n; ++j) {
        int m = j < n / 2 ? j : j - n;
        if (m == -n / 2) continue;  // drop Nyquist
        int J = m >= 0 ? m : m + N;
        C[J] = c[j];
    }
    return to_physical(std::move(C));
}

}  // namespace prof1d

struct AssumptionReport {
    double monotone_min = 0.0;   // min dy b
    double monotone_max = 0.0;   // max dy b
    double sigma0 = 0.0;         // largest sigma with dy b in [sigma, 1/sigma]
    bool monotone_ok = false;
    double support_radius = 0.0;  // of b'' at relative threshold
    double support_limit = 0.0;
    bool support_ok = false;
    double gevrey_theta = 0.0;  // fitted decay exponent of log|b''^| vs <xi>^{1/2}
    bool gevrey_ok = false;
    std::string spectral_verdict = "not-run";  // delegated to rayleigh-spectrum
    bool all_pass() const { return monotone_ok && support_ok && gevrey_ok; }
};

/// Background shear b(y) = y + compactly supported corrector, heat-evolved in
/// time, together with the moving-frame coefficients B(t,v), B'(t,v) and the
/// frozen copies B_0, B_0'.
class ShearProfile {
  public:
    ShearProfile() = default;

    /// corrector: values of b(y) - y on the y grid (must vanish near +-L)
    ShearProfile(std::vector<double> corrector, int n, double L, double nu,
                 double support_limit = 0.0)
        : n_(n), L_(L), nu_(nu), t_(0.0), corrector_(std::move(corrector)),
          support_limit_(support_limit) {
        if (static_cast<int>(corrector_.size()) != n_ || n_ % 2 != 0)
            throw std::invalid_argument("ShearProfile: corrector size / parity");
        rebuild_derived();
        B0_ = B_;
        B0prime_ = Bprime_;
        y_of_v0_ = y_of_v_;
    }

    static ShearProfile couette(int n, double L, double nu) {
        return ShearProfile(std::vector<double>(n, 0.0), n, L, nu);
    }

    /// b(y) = y + a * w * sech^2(y / w): tanh-family corrector with rapidly
    /// decaying (not compactly supported) b''
    static ShearProfile tanh_bump(double amplitude, double width, int n, double L, double nu) {
        std::vector<double> c(n);
        for (int j = 0; j < n; ++j) {
            double y = -L + 2.0 * L * j / n;
            double sech = 1.0 / std::cosh(y / width);
            c[j] = amplitude * width * sech * sech;
        }
        return ShearProfile(std::move(c), n, L, nu);
    }

    /// b(y) = y + a * w * exp(1 - 1/(1-(y/w)^2)) on |y| < w: compactly
    /// supported b'', Gevrey-2 regular -- the paper-class profile
    static ShearProfile gevrey_bump(double amplitude, double width, int n, double L, double nu) {
        std::vector<double> c(n);
        for (int j = 0; j < n; ++j) {
            double y = -L + 2.0 * L * j / n;
            double u = y / width;
            c[j] = std::abs(u) < 1.0 ? amplitude * width * std::exp(1.0 - 1.0 / (1.0 - u * u))
                                     : 0.0;
        }
        return ShearProfile(std::move(c), n, L, nu);
    }

    /// b' = 1 + a cos(q y) * bump(y / w): oscillatory slope, large b''; used to
    /// construct spectrally unstable monotone shears
    static ShearProfile oscillatory_bump(double amplitude, double q, double width, int n, double L,
                                         double nu) {
        std::vector<double> dc(n);
        for (int j = 0; j < n; ++j) {
            double y = -L + 2.0 * L * j / n;
            dc[j] = amplitude * std::cos(q * y) * smooth_cutoff(y, 0.6 * width, width);
        }
        auto ch = prof1d::to_spectral(dc, L);
        ch[0] = 0.0;  // drop the mean: keeps the far field exactly linear
        std::vector<std::complex<double>> ih(ch.size(), 0.0);
        for (size_t j = 1; j < ch.size(); ++j) {
            if (static_cast<int>(j) == n / 2) continue;
            double xi = prof1d::xi_of(static_cast<int>(j), n, L);
            ih[j] = ch[j] / std::complex<double>(0.0, xi);
        }
        auto c = prof1d::to_physical(std::move(ih));
        return ShearProfile(std::move(c), n, L, nu);
    }

    /// parse "couette", "tanh-bump:a,w", "gevrey-bump:a,w", "oscillatory:a,q,w"
    /// or a CSV path with rows y,b(y)
    static ShearProfile named(const std::string& spec, int n, double L, double nu);

    int n() const { return n_; }
    double L() const { return L_; }
    double nu() const { return nu_; }
    double t() const { return t_; }
    double y(int j) const { return -L_ + 2.0 * L_ * j / n_; }
    double v(int j) const { return y(j); }  // v grid coincides with the y grid

    const std::vector<double>& b() const { return b_; }
    const std::vector<double>& dyb() const { return dyb_; }
    const std::vector<double>& d2yb() const { return d2yb_; }
    const std::vector<double>& B() const { return B_; }
    const std::vector<double>& Bprime() const { return Bprime_; }
    const std::vector<double>& B0() const { return B0_; }
    const std::vector<double>& B0prime() const { return B0prime_; }
    const std::vector<double>& y_of_v() const { return y_of_v_; }
    const std::vector<double>& y_of_v0() const { return y_of_v0_; }
    double theta0() const { return theta0_; }
    double sigma0() const { return sigma0_; }
    bool is_couette() const { return couette_like_; }

    double b_inverse(double v) const { return binv_(v); }
    double b_inverse0(double v) const { return binv0_(v); }

    /// advance b by the heat equation: exact Fourier multiplier on the corrector,
    /// linear part preserved
    ShearProfile evolve_heat(double dt) const {
        if (dt < 0) throw std::invalid_argument("evolve_heat: dt must be >= 0");
        ShearProfile out = *this;
        if (dt == 0 || couette_like_) {
            // Couette is a fixed point of the heat flow
            out.t_ = t_ + dt;
            return out;
        }
        auto ch = prof1d::to_spectral(corrector_, L_);
        for (size_t j = 0; j < ch.size(); ++j) {
            double xi = prof1d::xi_of(static_cast<int>(j), n_, L_);
            ch[j] *= std::exp(-nu_ * xi * xi * dt);
        }
        out.corrector_ = prof1d::to_physical(std::move(ch));
        out.t_ = t_ + dt;
        out.rebuild_derived();
        if (out.monotone_min_ <= 0)
            throw std::runtime_error(
                "evolve_heat: profile degeneracy (monotonicity lost; grid underresolved?)");
        return out;
    }

    AssumptionReport check_assumption() const {
        AssumptionReport rep;
        rep.monotone_min = monotone_min_;
        rep.monotone_max = monotone_max_;
        rep.sigma0 = sigma0_;
        rep.monotone_ok = monotone_min_ > 0;
        rep.support_limit = support_limit_ > 0 ? support_limit_ : 1.0 / std::max(sigma0_, 1e-12);
        rep.support_radius = support_radius(1e-4);
        rep.support_ok = rep.support_radius <= rep.support_limit;
        rep.gevrey_theta = gevrey_decay_fit();
        rep.gevrey_ok = couette_like_ || rep.gevrey_theta >= 0.9 * sigma0_;
        return rep;
    }

    /// smallest radius R with int_{|y|<=R} |b''| >= (1 - tail_mass) * int |b''|;
    /// mass-based so spectral ringing of the derivative does not inflate it
    double support_radius(double tail_mass) const {
        double total = 0.0;
        for (double x : d2yb_) total += std::abs(x);
        if (total == 0.0) return 0.0;
        // accumulate outward from y = 0
        std::vector<std::pair<double, double>> by_radius(n_);
        for (int j = 0; j < n_; ++j) by_radius[j] = {std::abs(y(j)), std::abs(d2yb_[j])};
        std::sort(by_radius.begin(), by_radius.end());
        double acc = 0.0;
        for (const auto& [r, m] : by_radius) {
            acc += m;
            if (acc >= (1.0 - tail_mass) * total) return r;
        }
        return by_radius.back().first;
    }

    /// least-squares fit of log|b''^(xi)| ~ C - theta * <xi>^{1/2}
    double gevrey_decay_fit() const {
        auto ch = prof1d::to_spectral(d2yb_, L_);
        std::vector<double> xs, ys;
        double mx = 0.0;
        for (const auto& c : ch) mx = std::max(mx, std::abs(c));
        if (mx == 0.0) return 0.0;
        for (int j = 0; j < n_; ++j) {
            double xi = prof1d::xi_of(j, n_, L_);
            double a = std::abs(ch[j]);
            if (xi > 0 && a > 1e-13 * mx && a > 1e-280) {
                xs.push_back(japanese_bracket(xi, 0.5));
                ys.push_back(std::log(a));
            }
        }
        if (xs.size() < 4) return 0.0;
        return -fit_line(xs, ys).slope;
    }

    /// sup_xi e^{theta <xi>^{1/2}} |(d_v B)^(xi)| <= 1/theta : largest feasible
    /// theta (bisection); 0 if even tiny theta fails
    double gevrey_theta_of_B() const {
        auto bh = prof1d::to_spectral(B_, L_);
        for (size_t j = 1; j < bh.size(); ++j)
            bh[j] *= std::complex<double>(0.0, prof1d::xi_of(static_cast<int>(j), n_, L_));
        bh[n_ / 2] = 0.0;
        auto feasible = [&](double th) {
            for (int j = 0; j < n_; ++j) {
                double xi = prof1d::xi_of(j, n_, L_);
                double a = std::abs(bh[j]);
                if (a < 1e-300) continue;
                if (std::log(a) + th * japanese_bracket(xi, 0.5) > std::log(1.0 / th))
                    return false;
            }
            return true;
        };
        double lo = 0.0, hi = 1.0;
        if (!feasible(1e-6)) return 0.0;
        lo = 1e-6;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (feasible(mid) ? lo : hi) = mid;
        }
        return lo;
    }

    /// operator-norm surrogate for || <dz,dv>^s [ (d_v^alpha B(t) - d_v^alpha B_0) f ] ||
    /// over a fixed probe set of normalized band-limited f; certifies the
    /// gamma-smallness used by the Neumann inversion
    double coefficient_drift(int alpha, double s = 2.0, int n_probes = 8) const {
        std::vector<double> diff(n_);
        if (alpha == 0)
            for (int j = 0; j < n_; ++j) diff[j] = B_[j] - B0_[j];
        else {
            auto dB = prof1d::derivative(B_, L_);
            auto dB0 = prof1d::derivative(B0_, L_);
            for (int j = 0; j < n_; ++j) diff[j] = dB[j] - dB0[j];
        }
        GaussianRng rng(12345);
        double worst = 0.0;
        for (int p = 0; p < n_probes; ++p) {
            std::vector<std::complex<double>> fh(n_, 0.0);
            for (int j = 0; j < n_; ++j) {
                double xi = prof1d::xi_of(j, n_, L_);
                if (std::abs(xi) > 0.25 * (M_PI / L_) * n_ / 2) continue;
                fh[j] = std::complex<double>(rng.normal(), rng.normal()) /
                        japanese_bracket(xi, s + 1.0);
            }
            auto f = prof1d::to_physical(fh);
            std::vector<double> g(n_);
            for (int j = 0; j < n_; ++j) g[j] = diff[j] * f[j];
            auto wnorm = [&](const std::vector<double>& u) {
                auto uh = prof1d::to_spectral(u, L_);
                double acc = 0.0;
                for (int j = 0; j < n_; ++j) {
                    double w = sobolev_bracket(0.0, prof1d::xi_of(j, n_, L_), s);
                    acc += w * w * std::norm(uh[j]);
                }
                return std::sqrt(acc);
            };
            double denom = wnorm(f);
            if (denom > 0) worst = std::max(worst, wnorm(g) / denom);
        }
        return worst;
    }

    /// reference heat evolution of dy b by dense quadrature of the heat kernel
    /// against b'' (test oracle; O(n^2))
    std::vector<double> dyb_heat_reference(double dt) const {
        std::vector<double> out(n_);
        if (dt == 0) return dyb_;
        const double h = 2.0 * L_ / n_;
        const double denom = 4.0 * nu_ * dt;
        for (int i = 0; i < n_; ++i) {
            // dyb(t+dt, y_i) = 1 + int G_{nu dt}(y_i - y') (dyb(t,y') - 1) dy'
            double acc = 0.0;
            for (int j = 0; j < n_; ++j) {
                double d = y(i) - y(j);
                acc += std::exp(-d * d / denom) * (dyb_[j] - 1.0);
            }
            out[i] = 1.0 + acc * h / std::sqrt(M_PI * denom);
        }
        return out;
    }

    /// B(t, v) recomputed through the heat-kernel representation: convolve the
    /// initial slope with the heat kernel and evaluate at y = b^{-1}(t, v)
    std::vector<double> B_integral_reference(const ShearProfile& initial) const {
        std::vector<double> out(n_);
        const double h = 2.0 * L_ / n_;
        if (t_ == 0) return B_;
        const double denom = 4.0 * nu_ * t_;
        for (int i = 0; i < n_; ++i) {
            double yq = y_of_v_[i];
            double acc = 0.0;
            for (int j = 0; j < n_; ++j) {
                double d = yq - initial.y(j);
                acc += std::exp(-d * d / denom) * (initial.dyb()[j] - 1.0);
            }
            out[i] = 1.0 + acc * h / std::sqrt(M_PI * denom);
        }
        return out;
    }

    void write_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("ShearProfile::write_csv: cannot open " + path);
        out << "y,b,dyb,d2yb,B,Bprime\n";
        out.precision(17);
        for (int j = 0; j < n_; ++j)
            out << y(j) << ',' << b_[j] << ',' << dyb_[j] << ',' << d2yb_[j] << ',' << B_[j] << ','
                << Bprime_[j] << '\n';
    }

  private:
    void rebuild_derived() {
        b_.resize(n_);
        for (int j = 0; j < n_; ++j) b_[j] = y(j) + corrector_[j];
        auto dc = prof1d::derivative(corrector_, L_);
        auto d2c = prof1d::derivative(corrector_, L_, 2);
        dyb_.resize(n_);
        d2yb_.resize(n_);
        double cmax = 0.0;
        for (int j = 0; j < n_; ++j) {
            dyb_[j] = 1.0 + dc[j];
            d2yb_[j] = d2c[j];
            cmax = std::max(cmax, std::abs(corrector_[j]));
        }
        couette_like_ = cmax < 1e-14;
        monotone_min_ = *std::min_element(dyb_.begin(), dyb_.end());
        monotone_max_ = *std::max_element(dyb_.begin(), dyb_.end());
        sigma0_ = std::min(monotone_min_, 1.0 / monotone_max_);
        if (monotone_min_ <= 0)
            throw std::invalid_argument("ShearProfile: profile is not strictly monotone");

        // b^{-1}: monotone cubic on a 4x refined grid for the bracketing guess,
        // then Newton refinement with exact trigonometric evaluation
        const int refine = 4;
        auto c_fine = prof1d::upsample(corrector_, L_, refine);
        const int N = n_ * refine;
        std::vector<double> bf(N + 1), yf(N + 1);
        for (int j = 0; j < N; ++j) {
            yf[j] = -L_ + 2.0 * L_ * j / N;
            bf[j] = yf[j] + c_fine[j];
        }
        yf[N] = L_;
        bf[N] = L_ + c_fine[0];  // periodic extension of the corrector
        binv_ = MonotoneCubic(bf, yf);

        auto ch = prof1d::to_spectral(corrector_, L_);
        auto dch = ch;
        for (int j = 0; j < n_; ++j) {
            std::complex<double> ix(0.0, prof1d::xi_of(j, n_, L_));
            dch[j] *= ix;
        }
        dch[n_ / 2] = 0.0;

        y_of_v_.resize(n_);
        B_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            double vv = v(j);
            double yq = binv_(vv);
            for (int it = 0; it < 3; ++it) {
                double f = yq + prof1d::eval_trig(ch, L_, yq) - vv;
                double df = 1.0 + prof1d::eval_trig(dch, L_, yq);
                yq -= f / df;
            }
            y_of_v_[j] = yq;
            B_[j] = 1.0 + prof1d::eval_trig(dch, L_, yq);
        }
        auto dB = prof1d::derivative(B_, L_);
        Bprime_.resize(n_);
        for (int j = 0; j < n_; ++j) Bprime_[j] = B_[j] * dB[j];
        theta0_ = *std::min_element(B_.begin(), B_.end()) - 1e-10;
        if (y_of_v0_.empty()) {
            binv0_ = binv_;
        }
    }

    int n_ = 0;
    double L_ = 0.0;
    double nu_ = 0.0;
    double t_ = 0.0;
    std::vector<double> corrector_;
    double support_limit_ = 0.0;

    std::vector<double> b_, dyb_, d2yb_;
    std::vector<double> B_, Bprime_, B0_, B0prime_;
    std::vector<double> y_of_v_, y_of_v0_;
    MonotoneCubic binv_, binv0_;
    double theta0_ = 0.0, sigma0_ = 0.0;
    double monotone_min_ = 0.0, monotone_max_ = 0.0;
    bool couette_like_ = true;
};

inline ShearProfile ShearProfile::named(const std::string& spec, int n, double L, double nu) {
    auto parse_args = [](const std::string& s) {
        std::vector<double> args;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
        return args;
    };
    if (spec == "couette") return couette(n, L, nu);
    if (spec.rfind("tanh-bump:", 0) == 0) {
        auto a = parse_args(spec.substr(10));
        if (a.size() != 2) throw std::invalid_argument("tanh-bump wants amplitude,width");
        return tanh_bump(a[0], a[1], n, L, nu);
    }
    if (spec.rfind("gevrey-bump:", 0) == 0) {
        auto a = parse_args(spec.substr(12));
        if (a.size() != 2) throw std::invalid_argument("gevrey-bump wants amplitude,width");
        return gevrey_bump(a[0], a[1], n, L, nu);
    }
    if (spec.rfind("oscillatory:", 0) == 0) {
        auto a = parse_args(spec.substr(12));
        if (a.size() != 3) throw std::invalid_argument("oscillatory wants amplitude,q,width");
        return oscillatory_bump(a[0], a[1], a[2], n, L, nu);
    }
    // otherwise a CSV file with rows y,b(y) on a uniform grid
    std::ifstream in(spec);
    if (!in) throw std::invalid_argument("unknown profile spec or missing file: " + spec);
    std::vector<double> ys, bs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'y') continue;
        std::stringstream ss(line);
        std::string ty, tb;
        std::getline(ss, ty, ',');
        std::getline(ss, tb, ',');
        ys.push_back(std::stod(ty));
        bs.push_back(std::stod(tb));
    }
    if (static_cast<int>(ys.size()) != n)
        throw std::invalid_argument("profile CSV row count does not match n");
    std::vector<double> c(n);
    for (int j = 0; j < n; ++j) c[j] = bs[j] - ys[j];
    return ShearProfile(std::move(c), n, L, nu);
}

}  // namespace shearlab

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include "shearlab/shear_profile.hpp"

namespace shearlab {

/// Discrete spectrum of the linearized Euler operator
///   L_k g = b g - b'' H_k g,   H_k = (d_y^2 - k^2)^{-1}
/// on the periodized y grid; decides spectral stability numerically.
struct SpectrumReport {
    int k = 0;
    std::vector<std::complex<double>> eigenvalues;
    double max_imag = 0.0;
    int resolution = 0;
    std::string verdict = "inconclusive";  // continuous-only | unstable-mode-found | inconclusive
    double tolerance = 1e-6;
    // when unstable: the confirmed eigenvalue and its drift under doubling
    std::complex<double> unstable_eigenvalue{0.0, 0.0};
    double doubling_drift = 0.0;
};

/// dense matrix of L_k: diag(b) - diag(b'') H_k, with H_k realized spectrally
/// on the periodic grid (b'' is compactly supported, so the product is
/// insensitive to the far-field periodization)
inline Eigen::MatrixXd assemble_Lk(const ShearProfile& profile, int k) {
    if (k == 0) throw std::invalid_argument("assemble_Lk: k must be nonzero");
    const int n = profile.n();
    const double L = profile.L();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) A(i, i) = profile.b()[i];

    // H_k column by column through the 1-d FFT
    std::vector<std::complex<double>> col(n);
    for (int j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), std::complex<double>(0.0, 0.0));
        col[j] = 1.0;
        fft1(col.data(), col.data(), n, FFTW_FORWARD);
        for (int m = 0; m < n; ++m) {
            double xi = prof1d::xi_of(m, n, L);
            col[m] /= -(k * static_cast<double>(k) + xi * xi);
        }
        fft1(col.data(), col.data(), n, FFTW_BACKWARD);
        for (int i = 0; i < n; ++i) A(i, j) -= profile.d2yb()[i] * col[i].real() / n;
    }
    return A;
}

inline std::vector<std::complex<double>> eigenvalues_Lk(const ShearProfile& profile, int k) {
    Eigen::MatrixXd A = assemble_Lk(profile, k);
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> ev(A.rows());
    for (int i = 0; i < A.rows(); ++i) ev[i] = es.eigenvalues()(i);
    return ev;
}

/// per-k verdict with resolution-doubling confirmation: an eigenvalue counts
/// as unstable only if Im above tolerance persists at twice the resolution
/// within 1% relative drift
inline SpectrumReport spectrum_report(const ShearProfile& profile, int k, double tolerance = 1e-6) {
    SpectrumReport rep;
    rep.k = k;
    rep.tolerance = tolerance;
    rep.resolution = profile.n();
    rep.eigenvalues = eigenvalues_Lk(profile, k);
    auto worst = *std::max_element(
        rep.eigenvalues.begin(), rep.eigenvalues.end(),
        [](const auto& a, const auto& b) { return a.imag() < b.imag(); });
    rep.max_imag = worst.imag();
    if (rep.max_imag <= tolerance) {
        rep.verdict = "continuous-only";
        return rep;
    }
    // confirm at doubled resolution (trigonometric upsampling of the corrector)
    std::vector<double> corr(profile.n());
    for (int j = 0; j < profile.n(); ++j) corr[j] = profile.b()[j] - profile.y(j);
    auto corr2 = prof1d::upsample(corr, profile.L(), 2);
    ShearProfile fine(corr2, 2 * profile.n(), profile.L(), profile.nu());
    auto ev2 = eigenvalues_Lk(fine, k);
    // match by distance to the candidate
    double best = 1e300;
    std::complex<double> match;
    for (const auto& e : ev2)
        if (std::abs(e - worst) < best) {
            best = std::abs(e - worst);
            match = e;
        }
    double drift = std::abs(match - worst) / std::max(1e-300, std::abs(worst));
    if (match.imag() > tolerance && drift <= 0.01) {
        rep.verdict = "unstable-mode-found";
        rep.unstable_eigenvalue = match;
        rep.doubling_drift = drift;
    } else {
        rep.verdict = "inconclusive";
        rep.unstable_eigenvalue = worst;
        rep.doubling_drift = drift;
    }
    return rep;
}

/// per-k reports for k = 1..k_max; the global verdict is the worst case
inline std::vector<SpectrumReport> stability_verdict(const ShearProfile& profile, int k_max,
                                                     double tolerance = 1e-6) {
    std::vector<SpectrumReport> out;
    for (int k = 1; k <= k_max; ++k) out.push_back(spectrum_report(profile, k, tolerance));
    return out;
}

inline std::string global_verdict(const std::vector<SpectrumReport>& reports) {
    bool inconclusive = false;
    for (const auto& r : reports) {
        if (r.verdict == "unstable-mode-found") return "unstable-mode-found";
        if (r.verdict == "inconclusive") inconclusive = true;
    }
    return inconclusive ? "inconclusive" : "continuous-only";
}

}  // namespace shearlab
